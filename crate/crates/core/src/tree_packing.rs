//! The count matroid of the multiplied graph: the union of `D` graphic
//! matroids over the edge copies of `(D-1)G`, with independence, rank, base,
//! circuit and deficiency queries, a brute-force Tutte/Nash-Williams oracle,
//! and the constructive forest-packing transformations under splitting off
//! and edge-splitting.
//!
//! An edge copy set `F` is independent iff `|F'| <= D(|V(F')|-1)` for every
//! nonempty `F' <= F`, equivalently iff `F` partitions into `D` edge-disjoint
//! forests. Independence is decided constructively by matroid-union
//! augmenting paths, so every positive answer carries a forest packing and
//! every negative answer carries a violating subset.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::multigraph::{Dimension, EdgeId, Multigraph, Partition, SplitOff, VertexId};

/// One parallel copy of an edge of `G` inside `(D-1)G`; `copy` is 1-based in
/// `1..=D-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeCopy {
    pub edge: EdgeId,
    pub copy: usize,
}

pub type EdgeCopySet = BTreeSet<EdgeCopy>;

/// A partition of an independent copy set into exactly `D` edge-disjoint
/// forests of the underlying graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestPacking {
    pub forests: Vec<EdgeCopySet>,
}

impl ForestPacking {
    pub fn total_size(&self) -> usize {
        self.forests.iter().map(|f| f.len()).sum()
    }

    pub fn union(&self) -> EdgeCopySet {
        self.forests.iter().flatten().copied().collect()
    }

    /// Copies of `edge` used across all forests.
    pub fn copies_of(&self, edge: EdgeId) -> usize {
        self.forests
            .iter()
            .flatten()
            .filter(|c| c.edge == edge)
            .count()
    }
}

/// Deficiency of the multiplied graph together with the base size and, for
/// the brute-force oracle, a partition attaining the maximum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeficiencyReport {
    pub k: usize,
    pub base_size: usize,
    pub witness_partition: Option<Partition>,
}

/// Outcome of an independence test.
#[derive(Debug, Clone)]
pub enum Independence {
    /// The set partitions into `D` forests; the packing is the certificate.
    Independent(ForestPacking),
    /// A subset violating the count `|F'| <= D(|V(F')|-1)`.
    Dependent { violating: EdgeCopySet },
}

impl Independence {
    pub fn is_independent(&self) -> bool {
        matches!(self, Independence::Independent(_))
    }
}

/// All copies of all edges of `G`, in (edge, copy) order.
pub fn all_copies(graph: &Multigraph, dim: &Dimension) -> Vec<EdgeCopy> {
    let mut out = Vec::with_capacity(graph.edge_count() * dim.copies_per_edge());
    let mut ids: Vec<EdgeId> = graph.edges().iter().map(|e| e.id).collect();
    ids.sort_unstable();
    for edge in ids {
        for copy in 1..=dim.copies_per_edge() {
            out.push(EdgeCopy { edge, copy });
        }
    }
    out
}

/// All copies of a single edge.
pub fn copies_of_edge(edge: EdgeId, dim: &Dimension) -> Vec<EdgeCopy> {
    (1..=dim.copies_per_edge())
        .map(|copy| EdgeCopy { edge, copy })
        .collect()
}

/// Incremental matroid-union state: the current independent set partitioned
/// into `D` forests, grown one element at a time by augmenting paths.
/// Exploration is breadth-first, lowest-index-first, so bases are
/// deterministic.
struct UnionState<'g> {
    graph: &'g Multigraph,
    forests: Vec<EdgeCopySet>,
    /// Elements of the previous failed augmentation, including the rejected
    /// element itself.
    last_failure: Option<EdgeCopySet>,
}

impl<'g> UnionState<'g> {
    fn new(graph: &'g Multigraph, dim: &Dimension) -> Self {
        UnionState {
            graph,
            forests: vec![EdgeCopySet::new(); dim.screw_dim()],
            last_failure: None,
        }
    }

    fn endpoints(&self, c: EdgeCopy) -> (VertexId, VertexId) {
        let e = self.graph.edge(c.edge).expect("copy of a known edge");
        (e.u, e.v)
    }

    /// Walks the unique forest path between `from` and `to`, if any.
    fn forest_path(&self, forest: usize, from: VertexId, to: VertexId) -> Option<Vec<EdgeCopy>> {
        let mut adj: BTreeMap<VertexId, Vec<(VertexId, EdgeCopy)>> = BTreeMap::new();
        for &c in &self.forests[forest] {
            let (u, v) = self.endpoints(c);
            adj.entry(u).or_default().push((v, c));
            adj.entry(v).or_default().push((u, c));
        }
        let mut prev: BTreeMap<VertexId, (VertexId, EdgeCopy)> = BTreeMap::new();
        let mut queue = VecDeque::from([from]);
        let mut seen = BTreeSet::from([from]);
        while let Some(x) = queue.pop_front() {
            if x == to {
                let mut path = Vec::new();
                let mut cur = to;
                while cur != from {
                    let (p, c) = prev[&cur];
                    path.push(c);
                    cur = p;
                }
                return Some(path);
            }
            if let Some(nbrs) = adj.get(&x) {
                for &(y, c) in nbrs {
                    if seen.insert(y) {
                        prev.insert(y, (x, c));
                        queue.push_back(y);
                    }
                }
            }
        }
        None
    }

    /// Attempts to add `x` to the independent set, rearranging forest
    /// membership along a shortest augmenting path. On failure records the
    /// reachable set for the violation certificate.
    fn augment(&mut self, x: EdgeCopy) -> bool {
        let d_forests = self.forests.len();
        let mut parent: BTreeMap<EdgeCopy, (EdgeCopy, usize)> = BTreeMap::new();
        let mut visited = BTreeSet::from([x]);
        let mut queue = VecDeque::from([x]);
        while let Some(y) = queue.pop_front() {
            let (yu, yv) = self.endpoints(y);
            for j in 0..d_forests {
                if self.forests[j].contains(&y) {
                    continue;
                }
                match self.forest_path(j, yu, yv) {
                    None => {
                        // Forest j accepts y directly; unwind the swap chain.
                        self.forests[j].insert(y);
                        let mut cur = y;
                        while let Some(&(p, pj)) = parent.get(&cur) {
                            self.forests[pj].remove(&cur);
                            self.forests[pj].insert(p);
                            cur = p;
                        }
                        return true;
                    }
                    Some(cycle) => {
                        for z in cycle {
                            if visited.insert(z) {
                                parent.insert(z, (y, j));
                                queue.push_back(z);
                            }
                        }
                    }
                }
            }
        }
        self.last_failure = Some(visited);
        false
    }

    /// A violating subset from the reachable set of a failed augmentation:
    /// upon failure every forest spans the reachable set within itself, so
    /// some connected component carries more copies than `D(|V|-1)` allows.
    fn violating_subset(&self, dim: &Dimension) -> EdgeCopySet {
        let reach = self
            .last_failure
            .as_ref()
            .expect("violating_subset requires a failed augmentation");
        let verts: BTreeSet<VertexId> = reach
            .iter()
            .flat_map(|&c| {
                let (u, v) = self.endpoints(c);
                [u, v]
            })
            .collect();
        let idx: BTreeMap<VertexId, usize> = verts.iter().copied().zip(0..).collect();
        let mut parent: Vec<usize> = (0..verts.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &c in reach {
            let (u, v) = self.endpoints(c);
            let (ru, rv) = (find(&mut parent, idx[&u]), find(&mut parent, idx[&v]));
            if ru != rv {
                parent[ru.max(rv)] = ru.min(rv);
            }
        }
        let mut by_comp: BTreeMap<usize, (EdgeCopySet, BTreeSet<VertexId>)> = BTreeMap::new();
        for &c in reach {
            let (u, v) = self.endpoints(c);
            let root = find(&mut parent, idx[&u]);
            let entry = by_comp.entry(root).or_default();
            entry.0.insert(c);
            entry.1.insert(u);
            entry.1.insert(v);
        }
        for (_, (copies, vs)) in by_comp {
            if copies.len() > dim.screw_dim() * (vs.len() - 1) {
                return copies;
            }
        }
        unreachable!("a failed augmentation always yields a violating component");
    }

    fn into_packing(self) -> ForestPacking {
        ForestPacking {
            forests: self.forests,
        }
    }
}

/// Maximum independent set of edge copies together with its forest packing.
#[derive(Debug, Clone)]
pub struct RankBase {
    pub rank: usize,
    pub base: EdgeCopySet,
    pub packing: ForestPacking,
}

/// Rank and a deterministic base of the count matroid, grown by lowest-id
/// augmentation order, partitioned into `D` edge-disjoint forests.
pub fn rank_and_base(graph: &Multigraph, dim: &Dimension) -> RankBase {
    rank_and_base_over(graph, dim, &all_copies(graph, dim), &[])
}

/// Like [`rank_and_base`] but over `ground`, trying `preferred` first (both
/// in their given order).
fn rank_and_base_over(
    graph: &Multigraph,
    dim: &Dimension,
    ground: &[EdgeCopy],
    preferred: &[EdgeCopy],
) -> RankBase {
    let mut state = UnionState::new(graph, dim);
    for &c in preferred.iter().chain(ground.iter()) {
        if state.forests.iter().any(|f| f.contains(&c)) {
            continue;
        }
        state.augment(c);
    }
    let packing = state.into_packing();
    RankBase {
        rank: packing.total_size(),
        base: packing.union(),
        packing,
    }
}

/// Decides whether `set` is independent: true iff every nonempty subset `F'`
/// satisfies `|F'| <= D(|V(F')|-1)`, equivalently iff it splits into `D`
/// forests. Returns the packing or a violating subset.
pub fn is_independent(graph: &Multigraph, dim: &Dimension, set: &EdgeCopySet) -> Independence {
    let mut state = UnionState::new(graph, dim);
    for &c in set {
        if !state.augment(c) {
            return Independence::Dependent {
                violating: state.violating_subset(dim),
            };
        }
    }
    Independence::Independent(state.into_packing())
}

/// Deficiency via the matroid: `k = D(|V|-1) - rank`. Fast path, no witness.
pub fn deficiency(graph: &Multigraph, dim: &Dimension) -> DeficiencyReport {
    let rb = rank_and_base(graph, dim);
    let target = dim.screw_dim() * (graph.vertex_count() - 1);
    DeficiencyReport {
        k: target - rb.rank,
        base_size: rb.rank,
        witness_partition: None,
    }
}

/// Default vertex bound for the brute-force deficiency oracle.
pub const PARTITION_ENUMERATION_BOUND: usize = 10;

/// Brute-force deficiency: maximizes `D(|P|-1) - (D-1) d_G(P)` over all
/// partitions of the vertex set, enumerated by restricted-growth strings.
/// Returns the first partition attaining the maximum. Entirely independent
/// of the matroid-union code path.
pub fn deficiency_bruteforce(graph: &Multigraph, dim: &Dimension) -> Result<DeficiencyReport> {
    deficiency_bruteforce_bounded(graph, dim, PARTITION_ENUMERATION_BOUND)
}

pub fn deficiency_bruteforce_bounded(
    graph: &Multigraph,
    dim: &Dimension,
    bound: usize,
) -> Result<DeficiencyReport> {
    let n = graph.vertex_count();
    if n > bound {
        return Err(Error::SizeBoundExceeded { vertices: n, bound });
    }
    let dd = dim.screw_dim() as i64;
    let copies = dim.copies_per_edge() as i64;
    let mut best: i64 = i64::MIN;
    let mut best_partition = None;
    let mut rgs = vec![0usize; n];
    loop {
        let blocks = rgs.iter().max().copied().unwrap_or(0) + 1;
        let mut cut = 0i64;
        for e in graph.edges() {
            if rgs[e.u] != rgs[e.v] {
                cut += 1;
            }
        }
        let def = dd * (blocks as i64 - 1) - copies * cut;
        if def > best {
            best = def;
            let mut sets = vec![BTreeSet::new(); blocks];
            for (v, &b) in rgs.iter().enumerate() {
                sets[b].insert(v);
            }
            best_partition = Some(Partition::new(sets, n)?);
        }
        if !next_restricted_growth(&mut rgs) {
            break;
        }
    }
    // def({V}) = 0 is always among the candidates, so the max is >= 0.
    let k = best.max(0) as usize;
    Ok(DeficiencyReport {
        k,
        base_size: dim.screw_dim() * (n - 1) - k,
        witness_partition: best_partition,
    })
}

/// Advances a restricted-growth string in place; false when exhausted.
fn next_restricted_growth(rgs: &mut [usize]) -> bool {
    let n = rgs.len();
    for i in (1..n).rev() {
        let max_prefix = rgs[..i].iter().max().copied().unwrap_or(0);
        if rgs[i] <= max_prefix {
            rgs[i] += 1;
            for item in rgs.iter_mut().skip(i + 1) {
                *item = 0;
            }
            return true;
        }
    }
    false
}

/// The unique circuit inside `base + c`, for a copy `c` outside a maximal
/// independent `base`. A copy `y` belongs to the circuit iff removing it
/// restores independence.
pub fn fundamental_circuit(
    graph: &Multigraph,
    dim: &Dimension,
    base: &EdgeCopySet,
    c: EdgeCopy,
) -> Result<EdgeCopySet> {
    let mut with_c: EdgeCopySet = base.clone();
    with_c.insert(c);
    if is_independent(graph, dim, &with_c).is_independent() {
        return Err(Error::NoCircuit);
    }
    let mut circuit = EdgeCopySet::new();
    for &y in &with_c {
        let mut probe = with_c.clone();
        probe.remove(&y);
        if is_independent(graph, dim, &probe).is_independent() {
            circuit.insert(y);
        }
    }
    Ok(circuit)
}

/// Vertices spanned by a copy set.
pub fn spanned_vertices(graph: &Multigraph, set: &EdgeCopySet) -> BTreeSet<VertexId> {
    set.iter()
        .flat_map(|c| {
            let e = graph.edge(c.edge).expect("copy of a known edge");
            [e.u, e.v]
        })
        .collect()
}

/// A base minimizing the number of copies of `edge` it uses, with that
/// minimum `h`. Obtained by saturating the ground set without `edge` first
/// and then extending: any base must reuse at least
/// `rank(everything) - rank(everything minus the copies of edge)` copies.
pub fn min_copy_base(
    graph: &Multigraph,
    dim: &Dimension,
    edge: EdgeId,
) -> Result<(EdgeCopySet, usize)> {
    graph.edge(edge)?;
    let others: Vec<EdgeCopy> = all_copies(graph, dim)
        .into_iter()
        .filter(|c| c.edge != edge)
        .collect();
    let own = copies_of_edge(edge, dim);
    let rb = rank_and_base_over(graph, dim, &own, &others);
    let h = rb.base.iter().filter(|c| c.edge == edge).count();
    Ok((rb.base, h))
}

/// Rewrites a forest packing on `V` into one on `V - v` for a degree-2
/// vertex `v`: forests incident to `v` once drop that copy; forests incident
/// twice replace both copies by one copy of the freshly inserted edge `ab`.
/// Returns the split-off graph and the packing on it.
pub fn split_forest_packing(
    graph: &Multigraph,
    dim: &Dimension,
    packing: &ForestPacking,
    v: VertexId,
) -> Result<(SplitOff, ForestPacking)> {
    let split = graph.split_off(v)?;
    let mut next_ab_copy = 1;
    let mut forests = Vec::with_capacity(packing.forests.len());
    for forest in &packing.forests {
        let mut kept: EdgeCopySet = EdgeCopySet::new();
        let mut at_v = 0;
        for &c in forest {
            let e = graph.edge(c.edge)?;
            if e.touches(v) {
                at_v += 1;
            } else {
                kept.insert(c);
            }
        }
        if at_v == 2 {
            if next_ab_copy > dim.copies_per_edge() {
                return Err(Error::Precondition(
                    "ran out of replacement copies for the inserted edge".into(),
                ));
            }
            kept.insert(EdgeCopy {
                edge: split.new_edge,
                copy: next_ab_copy,
            });
            next_ab_copy += 1;
        }
        forests.push(kept);
    }
    Ok((split, ForestPacking { forests }))
}

/// Inverse transformation: given a packing on a graph with edge `ab`,
/// performs the edge-splitting along `ab` and extends the packing to the new
/// vertex. With `h' = #(ab copies used) < D-1` the size grows by `D` and
/// exactly `h' + 1` copies of `vb` are used; with `h' = D-1` it grows by
/// `D-1`.
pub fn edge_split_forest_packing(
    graph: &Multigraph,
    dim: &Dimension,
    packing: &ForestPacking,
    ab: EdgeId,
) -> Result<(crate::multigraph::EdgeSplit, ForestPacking)> {
    let split = graph.edge_split(ab)?;
    let dd = dim.screw_dim();
    // Forests using a copy of ab first, original order otherwise.
    let mut order: Vec<usize> = (0..packing.forests.len()).collect();
    order.sort_by_key(|&i| {
        let has_ab = packing.forests[i].iter().any(|c| c.edge == ab);
        (!has_ab, i)
    });
    let h_prime = packing
        .forests
        .iter()
        .filter(|f| f.iter().any(|c| c.edge == ab))
        .count();
    let mut forests = vec![EdgeCopySet::new(); dd];
    for (pos, &i) in order.iter().enumerate() {
        let src = &packing.forests[i];
        let dst = &mut forests[pos];
        for &c in src {
            if c.edge != ab {
                dst.insert(c);
            }
        }
        let copy = pos + 1;
        if pos < h_prime {
            // Replace the ab copy by the two-edge path through v.
            dst.insert(EdgeCopy {
                edge: split.edge_va,
                copy,
            });
            dst.insert(EdgeCopy {
                edge: split.edge_vb,
                copy,
            });
        } else if h_prime < dd - 1 {
            if pos < dd - 1 {
                dst.insert(EdgeCopy {
                    edge: split.edge_va,
                    copy,
                });
            } else {
                dst.insert(EdgeCopy {
                    edge: split.edge_vb,
                    copy: h_prime + 1,
                });
            }
        }
    }
    Ok((split, ForestPacking { forests }))
}

/// Structural validation of a packing against its graph: forests pairwise
/// disjoint and each acyclic (which certifies independence of the union).
pub fn validate_packing(graph: &Multigraph, packing: &ForestPacking) -> Result<()> {
    let mut seen: EdgeCopySet = EdgeCopySet::new();
    for forest in &packing.forests {
        for &c in forest {
            if !seen.insert(c) {
                return Err(Error::Precondition(format!(
                    "copy ({}, {}) appears in two forests",
                    c.edge, c.copy
                )));
            }
        }
        let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        fn find(p: &BTreeMap<VertexId, VertexId>, x: VertexId) -> VertexId {
            let mut root = x;
            while p[&root] != root {
                root = p[&root];
            }
            root
        }
        for &c in forest {
            let e = graph.edge(c.edge)?;
            parent.entry(e.u).or_insert(e.u);
            parent.entry(e.v).or_insert(e.v);
            let (ru, rv) = (find(&parent, e.u), find(&parent, e.v));
            if ru == rv {
                return Err(Error::Precondition(format!(
                    "forest contains a cycle through edge {}",
                    c.edge
                )));
            }
            parent.insert(ru, rv);
        }
    }
    Ok(())
}
