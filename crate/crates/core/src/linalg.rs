//! Exact linear algebra over arbitrary-precision rationals.
//!
//! Rank computation clears denominators row by row and runs fraction-free
//! (Bareiss) elimination over integers, which keeps intermediate entries as
//! minors of the input instead of letting rationals blow up. A Montgomery-free
//! modular rank over a 61-bit prime serves as a fast certificate: the modular
//! rank never exceeds the rational rank, so hitting a known upper bound
//! certifies the exact value without big-integer work.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Zero};

pub type Scalar = BigRational;

pub fn scalar_int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn scalar_ratio(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Dense row-major matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Matrix with a subset of rows, in the given order.
    pub fn select_rows(&self, keep: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(keep.len() * self.cols);
        for &r in keep {
            data.extend_from_slice(self.row(r));
        }
        Matrix {
            rows: keep.len(),
            cols: self.cols,
            data,
        }
    }

    /// Matrix without the columns in `drop` (sorted or not).
    pub fn drop_columns(&self, drop: &[usize]) -> Matrix {
        let keep: Vec<usize> = (0..self.cols).filter(|c| !drop.contains(c)).collect();
        let mut data = Vec::with_capacity(self.rows * keep.len());
        for r in 0..self.rows {
            for &c in &keep {
                data.push(self.at(r, c).clone());
            }
        }
        Matrix {
            rows: self.rows,
            cols: keep.len(),
            data,
        }
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = Scalar::zero();
                for c in 0..self.cols {
                    if !self.at(r, c).is_zero() && !v[c].is_zero() {
                        acc += self.at(r, c) * &v[c];
                    }
                }
                acc
            })
            .collect()
    }

    /// Rows scaled to integers (each row multiplied by the lcm of its
    /// denominators; row scaling preserves rank).
    fn integerized(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| {
                let mut lcm = BigInt::one();
                for c in 0..self.cols {
                    let den = self.at(r, c).denom();
                    lcm = num::integer::lcm(lcm, den.clone());
                }
                (0..self.cols)
                    .map(|c| {
                        let q = self.at(r, c);
                        q.numer() * (&lcm / q.denom())
                    })
                    .collect()
            })
            .collect()
    }

    /// Exact rank by fraction-free Gaussian elimination. Pivots are chosen as
    /// the first row with a nonzero entry in column order (deterministic).
    pub fn rank(&self) -> usize {
        let mut m = self.integerized();
        bareiss_rank(&mut m, self.cols)
    }

    /// Rank of the matrix reduced modulo a fixed 61-bit prime. Always a lower
    /// bound for [`Matrix::rank`].
    pub fn rank_mod_p(&self) -> usize {
        let m = self.integerized();
        let mut rows: Vec<Vec<u64>> = m
            .iter()
            .map(|row| row.iter().map(reduce_mod_p).collect())
            .collect();
        modular_rank(&mut rows, self.cols)
    }

    /// Exact rank, certified fast when a proven upper bound is available:
    /// if the modular rank reaches `upper` the exact rank equals it,
    /// otherwise falls back to fraction-free elimination.
    pub fn rank_with_upper_bound(&self, upper: usize) -> usize {
        let lower = self.rank_mod_p();
        if lower == upper {
            return upper;
        }
        self.rank()
    }

    /// Reduced row echelon form; returns (rref, pivot columns).
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..m.cols {
                    let tmp = m.at(p, c).clone();
                    m.set(p, c, m.at(row, c).clone());
                    m.set(row, c, tmp);
                }
            }
            let inv = m.at(row, col).clone();
            for c in 0..m.cols {
                let v = m.at(row, c) / &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r != row && !m.at(r, col).is_zero() {
                    let factor = m.at(r, col).clone();
                    for c in 0..m.cols {
                        let v = m.at(r, c) - &factor * m.at(row, c);
                        m.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    /// Canonical basis of the right null space, from the reduced row echelon
    /// form: one vector per free column, with a 1 in the free position.
    pub fn null_space(&self) -> Vec<Vec<Scalar>> {
        let (rref, pivots) = self.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![Scalar::zero(); self.cols];
                v[fc] = Scalar::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -rref.at(r, fc).clone();
                }
                v
            })
            .collect()
    }

    /// One exact solution of `self * x = rhs`, if the system is consistent.
    pub fn solve(&self, rhs: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, self.cols, rhs[r].clone());
        }
        let (rref, pivots) = aug.rref();
        // Inconsistent iff a pivot lands in the rhs column.
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = rref.at(r, self.cols).clone();
        }
        Some(x)
    }
}

/// Fraction-free elimination on integer rows; returns the rank.
fn bareiss_rank(m: &mut [Vec<BigInt>], cols: usize) -> usize {
    let rows = m.len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][col].clone();
        for r in (rank + 1)..rows {
            for c in (col + 1)..cols {
                let num = &m[r][c] * &pivot - &m[r][col] * &m[rank][c];
                m[r][c] = num / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

/// 61-bit Mersenne prime; products fit in u128.
const P: u64 = (1u64 << 61) - 1;

fn reduce_mod_p(x: &BigInt) -> u64 {
    let m = x.mod_floor(&BigInt::from(P));
    let (_, digits) = m.to_u64_digits();
    digits.first().copied().unwrap_or(0)
}

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base);
        }
        base = mul_mod(base, base);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, P - 2)
}

fn modular_rank(m: &mut [Vec<u64>], cols: usize) -> usize {
    let rows = m.len();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, p);
        let inv = inv_mod(m[rank][col]);
        for c in col..cols {
            m[rank][c] = mul_mod(m[rank][c], inv);
        }
        for r in (rank + 1)..rows {
            if m[r][col] != 0 {
                let f = m[r][col];
                for c in col..cols {
                    let sub = mul_mod(f, m[rank][c]);
                    m[r][c] = (m[r][c] + P - sub) % P;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| scalar_int(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_examples() {
        assert_eq!(mat(&[&[1, 0], &[0, 1]]).rank(), 2);
        assert_eq!(mat(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(mat(&[&[0, 0], &[0, 0]]).rank(), 0);
        assert_eq!(
            mat(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]).rank(),
            2
        );
        assert_eq!(Matrix::zeros(0, 5).rank(), 0);
    }

    #[test]
    fn rank_with_rationals() {
        let m = Matrix::from_rows(vec![
            vec![scalar_ratio(1, 2), scalar_ratio(1, 3)],
            vec![scalar_ratio(3, 2), scalar_int(1)],
        ]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.rank_mod_p(), 1);
    }

    #[test]
    fn modular_rank_agrees_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let r = rng.gen_range(1..6);
            let c = rng.gen_range(1..6);
            let m = Matrix::from_rows(
                (0..r)
                    .map(|_| {
                        (0..c)
                            .map(|_| scalar_ratio(rng.gen_range(-9..10), rng.gen_range(1..5)))
                            .collect()
                    })
                    .collect(),
            );
            assert_eq!(m.rank(), m.rank_mod_p());
        }
    }

    #[test]
    fn null_space_is_annihilated() {
        let m = mat(&[&[1, 2, 3], &[4, 5, 6]]);
        let ns = m.null_space();
        assert_eq!(ns.len(), 1);
        for v in &ns {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_examples() {
        let m = mat(&[&[2, 0], &[0, 4]]);
        let x = m.solve(&[scalar_int(6), scalar_int(8)]).unwrap();
        assert_eq!(x, vec![scalar_int(3), scalar_int(2)]);

        let inconsistent = mat(&[&[1, 1], &[1, 1]]);
        assert!(inconsistent
            .solve(&[scalar_int(0), scalar_int(1)])
            .is_none());
    }
}
