//! Exact projective geometry over the rationals: homogeneous points,
//! Pluecker coordinate vectors (extensors), joins, hinges and their
//! extensors, translation extensors, orthogonal-complement bases, panels
//! (hyperplanes avoiding the origin) and panel intersections.
//!
//! Coordinate convention, fixed once and used everywhere: the Pluecker
//! vector of `k` points lists, in lexicographic order of the deleted column
//! tuples `i_1 < ... < i_{d+1-k}` (1-based), the value
//! `(-1)^(1 + i_1 + ... + i_{d+1-k})` times the `k x k` minor of the kept
//! columns.

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Scalar};
use crate::multigraph::Dimension;

/// A point of projective d-space. Finite points carry a final coordinate 1,
/// points at infinity a final coordinate 0. Never the zero vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneousPoint {
    pub coords: Vec<Scalar>,
}

impl HomogeneousPoint {
    /// Embeds an affine point of `R^d`.
    pub fn finite(affine: &[Scalar]) -> Self {
        let mut coords = affine.to_vec();
        coords.push(Scalar::one());
        HomogeneousPoint { coords }
    }

    /// Point at infinity in the given direction.
    pub fn infinite(direction: &[Scalar]) -> Self {
        let mut coords = direction.to_vec();
        coords.push(Scalar::zero());
        HomogeneousPoint { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn is_finite(&self) -> bool {
        !self.coords[self.coords.len() - 1].is_zero()
    }

    /// The affine part (all but the last coordinate).
    pub fn affine(&self) -> &[Scalar] {
        &self.coords[..self.coords.len() - 1]
    }
}

/// A coordinatized k-extensor: the Pluecker vector of its generating points.
/// The generators are carried along so that joins stay well defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extensor {
    pub step: usize,
    pub coords: Vec<Scalar>,
    pub points: Vec<HomogeneousPoint>,
}

impl Extensor {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// True iff the two extensors span the same line (are proportional).
    pub fn proportional_to(&self, other: &Extensor) -> bool {
        if self.coords.len() != other.coords.len() {
            return false;
        }
        // Cross-ratio check: a_i b_j == a_j b_i for all i, j.
        for i in 0..self.coords.len() {
            for j in (i + 1)..self.coords.len() {
                if &self.coords[i] * &other.coords[j] != &self.coords[j] * &other.coords[i] {
                    return false;
                }
            }
        }
        !self.is_zero() && !other.is_zero()
    }
}

/// Lexicographic `r`-subsets of `{0, .., n-1}`.
pub fn subsets_lex(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    let mut acc = 1usize;
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Determinant by exact cofactor-free Gaussian elimination.
fn det(rows: &[Vec<Scalar>]) -> Scalar {
    let n = rows.len();
    let mut m: Vec<Vec<Scalar>> = rows.to_vec();
    let mut sign = Scalar::one();
    let mut result = Scalar::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Scalar::zero();
        };
        if p != col {
            m.swap(p, col);
            sign = -sign;
        }
        let pivot = m[col][col].clone();
        result *= &pivot;
        for r in (col + 1)..n {
            if !m[r][col].is_zero() {
                let f = &m[r][col] / &pivot;
                for c in col..n {
                    let v = &m[r][c] - &f * &m[col][c];
                    m[r][c] = v;
                }
            }
        }
    }
    result * sign
}

/// Pluecker coordinate vector of the span of `k` projective points,
/// `1 <= k <= d+1`. The result has `C(d+1, k)` coordinates in lexicographic
/// deleted-tuple order and is zero iff the points are linearly dependent.
pub fn pluecker(points: &[HomogeneousPoint], dim: &Dimension) -> Result<Extensor> {
    let k = points.len();
    let cols = dim.d() + 1;
    if k == 0 || k > cols {
        return Err(Error::Precondition(format!(
            "a {k}-extensor is out of range for d = {}",
            dim.d()
        )));
    }
    for p in points {
        if p.coords.len() != cols {
            return Err(Error::Precondition(
                "point has wrong homogeneous length".into(),
            ));
        }
    }
    let deleted_size = cols - k;
    let mut coords = Vec::with_capacity(binomial(cols, k));
    for deleted in subsets_lex(cols, deleted_size) {
        let kept: Vec<usize> = (0..cols).filter(|c| !deleted.contains(c)).collect();
        let sub: Vec<Vec<Scalar>> = points
            .iter()
            .map(|p| kept.iter().map(|&c| p.coords[c].clone()).collect())
            .collect();
        // 1-based deleted indices in the sign.
        let sign_exp = 1 + deleted.iter().map(|i| i + 1).sum::<usize>();
        let mut value = det(&sub);
        if sign_exp % 2 == 1 {
            value = -value;
        }
        coords.push(value);
    }
    Ok(Extensor {
        step: k,
        coords,
        points: points.to_vec(),
    })
}

/// Join of two extensors, computed from the concatenated generators. Zero
/// (empty coordinate vector) when the combined step exceeds `d+1`.
pub fn join(p: &Extensor, q: &Extensor, dim: &Dimension) -> Result<Extensor> {
    let step = p.step + q.step;
    if step > dim.d() + 1 {
        return Ok(Extensor {
            step,
            coords: Vec::new(),
            points: Vec::new(),
        });
    }
    let mut points = p.points.clone();
    points.extend(q.points.iter().cloned());
    pluecker(&points, dim)
}

/// Join of a coordinate vector of step `k` with a single point, computed
/// coordinate-wise. For a vector that is itself the Pluecker vector of `k`
/// points this agrees with [`join`]; applied to an arbitrary vector it is
/// the unique bilinear extension.
pub fn join_point_coords(
    step: usize,
    coords: &[Scalar],
    q: &HomogeneousPoint,
    dim: &Dimension,
) -> Result<Vec<Scalar>> {
    let cols = dim.d() + 1;
    if step + 1 > cols {
        return Ok(Vec::new());
    }
    let deleted_in = subsets_lex(cols, cols - step);
    if coords.len() != deleted_in.len() {
        return Err(Error::Precondition(format!(
            "coordinate vector of step {step} must have length {}",
            deleted_in.len()
        )));
    }
    let index_of: std::collections::BTreeMap<Vec<usize>, usize> = deleted_in
        .iter()
        .cloned()
        .zip(0..)
        .collect();
    let deleted_out = subsets_lex(cols, cols - step - 1);
    let mut out = Vec::with_capacity(deleted_out.len());
    for t in &deleted_out {
        let kept: Vec<usize> = (0..cols).filter(|c| !t.contains(c)).collect();
        let mut acc = Scalar::zero();
        for (m, &c) in kept.iter().enumerate() {
            if q.coords[c].is_zero() {
                continue;
            }
            let mut t_plus: Vec<usize> = t.clone();
            t_plus.push(c);
            t_plus.sort_unstable();
            let coeff = &coords[index_of[&t_plus]];
            if coeff.is_zero() {
                continue;
            }
            // Sign (-1)^(k + 1 + m + c) with m, c 1-based.
            let exp = step + 1 + (m + 1) + (c + 1);
            let term = coeff * &q.coords[c];
            if exp.is_multiple_of(2) {
                acc += term;
            } else {
                acc -= term;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// A hinge: a `(d-2)`-affine subspace given by `d-1` affinely independent
/// finite spanning points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hinge {
    pub points: Vec<HomogeneousPoint>,
}

impl Hinge {
    pub fn new(points: Vec<HomogeneousPoint>, dim: &Dimension) -> Result<Self> {
        if points.len() != dim.hinge_points() {
            return Err(Error::Precondition(format!(
                "a hinge in d = {} needs {} spanning points",
                dim.d(),
                dim.hinge_points()
            )));
        }
        let hinge = Hinge { points };
        if hinge.extensor(dim)?.is_zero() {
            return Err(Error::Precondition(
                "hinge spanning points are affinely dependent".into(),
            ));
        }
        Ok(hinge)
    }

    /// The `(d-1)`-extensor spanned by the hinge; its line is independent of
    /// the choice of spanning points.
    pub fn extensor(&self, dim: &Dimension) -> Result<Extensor> {
        pluecker(&self.points, dim)
    }

    /// Same subspace iff the extensors are proportional.
    pub fn same_subspace(&self, other: &Hinge, dim: &Dimension) -> Result<bool> {
        Ok(self
            .extensor(dim)?
            .proportional_to(&other.extensor(dim)?))
    }
}

/// Extensor of the hinge of a `(d-2)`-affine subspace; checks the invariants.
pub fn hinge_extensor(hinge: &Hinge, dim: &Dimension) -> Result<Extensor> {
    let ext = hinge.extensor(dim)?;
    if ext.is_zero() {
        return Err(Error::Precondition(
            "hinge spanning points are dependent".into(),
        ));
    }
    Ok(ext)
}

/// Extensor of a translation in direction `x`: the join of `d-1` points at
/// infinity spanning the orthogonal complement of `x`.
pub fn translation_extensor(direction: &[Scalar], dim: &Dimension) -> Result<Extensor> {
    if direction.len() != dim.d() || direction.iter().all(|c| c.is_zero()) {
        return Err(Error::Precondition(
            "translation direction must be a nonzero d-vector".into(),
        ));
    }
    let row = Matrix::from_rows(vec![direction.to_vec()]);
    let basis = row.null_space();
    let points: Vec<HomogeneousPoint> = basis
        .iter()
        .map(|b| HomogeneousPoint::infinite(b))
        .collect();
    let ext = pluecker(&points, dim)?;
    debug_assert!(!ext.is_zero());
    Ok(ext)
}

/// Canonical basis of the orthogonal complement of a nonzero `(d-1)`-extensor
/// in `R^D`: `D-1` rows, each exactly orthogonal to the extensor, derived
/// from the reduced echelon form of the extensor as a 1 x D matrix.
pub fn complement_basis(extensor: &Extensor, dim: &Dimension) -> Result<Matrix> {
    let dd = dim.screw_dim();
    if extensor.coords.len() != dd || extensor.is_zero() {
        return Err(Error::Precondition(
            "complement basis needs a nonzero (d-1)-extensor".into(),
        ));
    }
    let row = Matrix::from_rows(vec![extensor.coords.clone()]);
    let basis = row.null_space();
    debug_assert_eq!(basis.len(), dd - 1);
    Ok(Matrix::from_rows(basis))
}

/// A panel: the hyperplane `{ x : x . c = 1 }` for a nonzero normal `c`.
/// By construction it never passes through the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Panel {
    pub normal: Vec<Scalar>,
}

impl Panel {
    pub fn new(normal: Vec<Scalar>, dim: &Dimension) -> Result<Self> {
        if normal.len() != dim.d() || normal.iter().all(|c| c.is_zero()) {
            return Err(Error::Precondition(
                "panel normal must be a nonzero d-vector".into(),
            ));
        }
        Ok(Panel { normal })
    }

    pub fn contains(&self, p: &HomogeneousPoint) -> bool {
        // Finite x on the panel satisfies x . c = 1; a direction (point at
        // infinity) lies on the panel's hyperplane iff x . c = 0.
        let lhs: Scalar = self
            .normal
            .iter()
            .zip(p.affine())
            .map(|(c, x)| c * x)
            .sum();
        let last = &p.coords[p.coords.len() - 1];
        lhs == last.clone()
    }

    /// True iff the normals are linearly dependent.
    pub fn parallel_to(&self, other: &Panel) -> bool {
        let n = self.normal.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if &self.normal[i] * &other.normal[j] != &self.normal[j] * &other.normal[i] {
                    return false;
                }
            }
        }
        true
    }

    /// A deterministic finite point on the panel: `c / (c . c)`.
    pub fn base_point(&self) -> HomogeneousPoint {
        let norm2: Scalar = self.normal.iter().map(|c| c * c).sum();
        let affine: Vec<Scalar> = self.normal.iter().map(|c| c / &norm2).collect();
        HomogeneousPoint::finite(&affine)
    }

    /// Directions spanning the panel (null space of the normal).
    pub fn directions(&self) -> Vec<Vec<Scalar>> {
        Matrix::from_rows(vec![self.normal.clone()]).null_space()
    }
}

/// Result of intersecting two panels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PanelIntersection {
    /// Nonparallel normals: the `(d-2)`-affine intersection as a hinge.
    Hinge(Hinge),
    /// Identical panels.
    Coincident,
    /// Parallel but distinct panels (empty intersection).
    Parallel,
}

/// Intersects two panels. For linearly independent normals the hinge is
/// spanned by a particular solution plus the common direction space,
/// canonically chosen.
pub fn panel_intersection(a: &Panel, b: &Panel, dim: &Dimension) -> Result<PanelIntersection> {
    if a.parallel_to(b) {
        if a.normal == b.normal {
            return Ok(PanelIntersection::Coincident);
        }
        return Ok(PanelIntersection::Parallel);
    }
    let system = Matrix::from_rows(vec![a.normal.clone(), b.normal.clone()]);
    let particular = system
        .solve(&[Scalar::one(), Scalar::one()])
        .expect("independent normals always intersect");
    let directions = system.null_space();
    debug_assert_eq!(directions.len(), dim.d() - 2);
    let mut points = vec![HomogeneousPoint::finite(&particular)];
    for dir in directions {
        let shifted: Vec<Scalar> = particular
            .iter()
            .zip(dir.iter())
            .map(|(p, q)| p + q)
            .collect();
        points.push(HomogeneousPoint::finite(&shifted));
    }
    Ok(PanelIntersection::Hinge(Hinge::new(points, dim)?))
}

/// Applies a screw center (a `D`-vector in extensor coordinates) to a finite
/// point: the `(d+1)`-vector whose first `d` coordinates are the velocity at
/// that point.
pub fn motion_at_point(
    screw: &[Scalar],
    p: &HomogeneousPoint,
    dim: &Dimension,
) -> Result<Vec<Scalar>> {
    if screw.len() != dim.screw_dim() {
        return Err(Error::Precondition(
            "screw center must be a D-vector".into(),
        ));
    }
    if !p.is_finite() {
        return Err(Error::Precondition(
            "motion is evaluated at a finite point".into(),
        ));
    }
    join_point_coords(dim.d() - 1, screw, p, dim)
}

/// True iff the `D` extensors of all `(d-1)`-subsets of the given `d+1`
/// points are linearly independent (they then span the screw space).
pub fn extensor_basis_check(points: &[HomogeneousPoint], dim: &Dimension) -> Result<bool> {
    if points.len() != dim.d() + 1 {
        return Err(Error::Precondition(format!(
            "expected {} points",
            dim.d() + 1
        )));
    }
    let mut rows = Vec::new();
    for subset in subsets_lex(points.len(), dim.d() - 1) {
        let chosen: Vec<HomogeneousPoint> =
            subset.iter().map(|&i| points[i].clone()).collect();
        rows.push(pluecker(&chosen, dim)?.coords);
    }
    let m = Matrix::from_rows(rows);
    Ok(m.rank() == dim.screw_dim())
}

/// Scales a rational vector to make the first nonzero coordinate 1.
pub fn normalize_leading(v: &mut [Scalar]) {
    if let Some(lead) = v.iter().find(|c| !c.is_zero()).cloned() {
        for c in v.iter_mut() {
            *c /= lead.clone();
        }
    }
}

/// Canonical display for dumps: reduced rationals print as `p` or `p/q`.
pub fn format_scalar(s: &Scalar) -> String {
    if s.denom().is_one() {
        format!("{}", s.numer())
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}
