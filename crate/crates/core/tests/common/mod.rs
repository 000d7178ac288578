//! Shared test corpus: exhaustive connected multigraphs up to label
//! permutation at desk scale, seeded random graphs, and a few named
//! instances that exercise specific construction paths.
//!
//! Each integration test binary compiles this module separately and uses a
//! different subset of it.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigidkit_core::multigraph::Multigraph;

pub const CORPUS_MAX_VERTICES: usize = 5;
pub const CORPUS_MAX_EDGES: usize = 8;

/// Canonical form: the lexicographically smallest sorted edge list over all
/// vertex relabelings.
fn canonical_form(n: usize, pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<(usize, usize)>> = None;
    loop {
        let mut mapped: Vec<(usize, usize)> = pairs
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (perm[u], perm[v]);
                (a.min(b), a.max(b))
            })
            .collect();
        mapped.sort_unstable();
        if best.as_ref().is_none_or(|b| &mapped < b) {
            best = Some(mapped);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap()
}

fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

fn enumerate_for_n(n: usize, max_edges: usize, out: &mut Vec<Multigraph>) {
    let slots: Vec<(usize, usize)> = {
        let mut s = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                s.push((u, v));
            }
        }
        s
    };
    let mut seen: BTreeSet<Vec<(usize, usize)>> = BTreeSet::new();
    let mut counts = vec![0usize; slots.len()];
    fn rec(
        slot: usize,
        remaining: usize,
        n: usize,
        slots: &[(usize, usize)],
        counts: &mut Vec<usize>,
        seen: &mut BTreeSet<Vec<(usize, usize)>>,
        out: &mut Vec<Multigraph>,
    ) {
        if slot == slots.len() {
            let pairs: Vec<(usize, usize)> = slots
                .iter()
                .zip(counts.iter())
                .flat_map(|(&p, &c)| std::iter::repeat_n(p, c))
                .collect();
            if pairs.len() + 1 < n {
                return;
            }
            let graph = Multigraph::new(n, &pairs).unwrap();
            if !graph.is_connected() {
                return;
            }
            if seen.insert(canonical_form(n, &pairs)) {
                out.push(graph);
            }
            return;
        }
        for c in 0..=remaining {
            counts[slot] = c;
            rec(slot + 1, remaining - c, n, slots, counts, seen, out);
        }
        counts[slot] = 0;
    }
    rec(0, max_edges, n, &slots, &mut counts, &mut seen, out);
}

/// All connected multigraphs with at most `CORPUS_MAX_VERTICES` vertices and
/// `CORPUS_MAX_EDGES` edges, no self-loops, one representative per
/// isomorphism class of labelings.
pub fn corpus() -> &'static Vec<Multigraph> {
    static CORPUS: OnceLock<Vec<Multigraph>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut out = Vec::new();
        for n in 1..=CORPUS_MAX_VERTICES {
            enumerate_for_n(n, CORPUS_MAX_EDGES, &mut out);
        }
        out
    })
}

/// Seeded random connected multigraphs.
pub fn random_graphs(count: usize, max_v: usize, max_e: usize, seed: u64) -> Vec<Multigraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(2..=max_v);
        let m = rng.gen_range((n - 1).max(1)..=max_e.max(n - 1));
        let pairs: Vec<(usize, usize)> = (0..m)
            .map(|_| {
                let u = rng.gen_range(0..n);
                let mut v = rng.gen_range(0..n);
                while v == u {
                    v = rng.gen_range(0..n);
                }
                (u.min(v), u.max(v))
            })
            .collect();
        let g = Multigraph::new(n, &pairs).unwrap();
        if g.is_connected() {
            out.push(g);
        }
    }
    out
}

/// Two hubs joined by three internally disjoint paths of the given lengths.
pub fn theta(lengths: [usize; 3]) -> Multigraph {
    let mut pairs = Vec::new();
    let mut next = 2;
    for len in lengths {
        assert!(len >= 2);
        let mut prev = 0;
        for _ in 0..(len - 1) {
            pairs.push((prev, next));
            prev = next;
            next += 1;
        }
        pairs.push((prev, 1));
    }
    Multigraph::new(next, &pairs).unwrap()
}

/// The complete bipartite graph on 2 + 3 vertices.
pub fn k23() -> Multigraph {
    Multigraph::new(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]).unwrap()
}
