//! Core multigraph representation and the graph surgeries every other module
//! consumes: multiplication, contraction, splitting off, degree-2 removal and
//! chain search.
//!
//! Values are immutable; every surgery returns a fresh graph. Edge ids are
//! dense integers assigned at construction time, surgeries preserve surviving
//! ids and allocate fresh ids for inserted edges, so an edge can be traced
//! through an inductive construction. Tie-breaking is lowest-id-first
//! throughout.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

/// Ambient dimension `d >= 2` together with the cached screw-space dimension
/// `D = C(d+1,2)`, the number of independent infinitesimal isometries of a
/// rigid body in `R^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dimension {
    d: usize,
    screw: usize,
}

impl Dimension {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::DimensionTooSmall(d));
        }
        Ok(Dimension {
            d,
            screw: d * (d + 1) / 2,
        })
    }

    /// Ambient dimension `d`.
    pub fn d(&self) -> usize {
        self.d
    }

    /// `D = d(d+1)/2`, the dimension of the space of screw centers.
    pub fn screw_dim(&self) -> usize {
        self.screw
    }

    /// Number of parallel copies per edge in the multiplied graph, `D - 1`.
    pub fn copies_per_edge(&self) -> usize {
        self.screw - 1
    }

    /// Number of points spanning a hinge, `d - 1`.
    pub fn hinge_points(&self) -> usize {
        self.d - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub id: EdgeId,
}

impl Edge {
    /// The endpoint distinct from `w`.
    pub fn other(&self, w: VertexId) -> VertexId {
        if self.u == w {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, w: VertexId) -> bool {
        self.u == w || self.v == w
    }
}

/// An undirected multigraph without self-loops. Parallel edges are permitted
/// and distinguished by their stable edge ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    next_edge_id: EdgeId,
}

/// A partition of the vertex set into disjoint nonempty blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<BTreeSet<VertexId>>,
}

impl Partition {
    pub fn new(blocks: Vec<BTreeSet<VertexId>>, vertex_count: usize) -> Result<Self> {
        let mut seen = vec![false; vertex_count];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &v in block {
                if v >= vertex_count {
                    return Err(Error::InvalidPartition(format!(
                        "vertex {v} out of range 0..{vertex_count}"
                    )));
                }
                if seen[v] {
                    return Err(Error::InvalidPartition(format!(
                        "vertex {v} appears in two blocks"
                    )));
                }
                seen[v] = true;
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("vertex {v} not covered")));
        }
        Ok(Partition { blocks })
    }

    /// The single-block partition `{V}`.
    pub fn trivial(vertex_count: usize) -> Self {
        Partition {
            blocks: vec![(0..vertex_count).collect()],
        }
    }

    /// Every vertex in its own block.
    pub fn singletons(vertex_count: usize) -> Self {
        Partition {
            blocks: (0..vertex_count).map(|v| BTreeSet::from([v])).collect(),
        }
    }

    pub fn blocks(&self) -> &[BTreeSet<VertexId>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block index of each vertex.
    pub fn block_of(&self, vertex_count: usize) -> Vec<usize> {
        let mut idx = vec![0; vertex_count];
        for (b, block) in self.blocks.iter().enumerate() {
            for &v in block {
                idx[v] = b;
            }
        }
        idx
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let vs: Vec<String> = b.iter().map(|v| v.to_string()).collect();
                format!("{{{}}}", vs.join(","))
            })
            .collect();
        write!(f, "{}", blocks.join(" "))
    }
}

/// A path `v0 v1 ... v_d` whose interior vertices all have degree two in the
/// ambient graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub vertices: Vec<VertexId>,
}

/// Outcome of [`Multigraph::find_chain`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainSearch {
    /// The whole graph is a cycle of the given length.
    Cycle(usize),
    /// A chain of length `d` with all interior vertices of degree two.
    Chain(Chain),
    /// No qualifying chain exists.
    Absent,
}

/// Vertex renumbering after deleting a single vertex: ids above the removed
/// vertex shift down by one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexRemap {
    pub removed: VertexId,
}

impl VertexRemap {
    pub fn map(&self, old: VertexId) -> Option<VertexId> {
        match old.cmp(&self.removed) {
            std::cmp::Ordering::Less => Some(old),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(old - 1),
        }
    }

    pub fn unmap(&self, new: VertexId) -> VertexId {
        if new < self.removed {
            new
        } else {
            new + 1
        }
    }
}

/// Result of splitting off a degree-2 vertex `v` with neighbors `a != b`:
/// `v` and its two edges are removed and a fresh edge `ab` is inserted.
#[derive(Debug, Clone)]
pub struct SplitOff {
    pub graph: Multigraph,
    pub new_edge: EdgeId,
    pub remap: VertexRemap,
    /// Neighbors of the removed vertex in the original numbering, `(a, b)`.
    pub neighbors: (VertexId, VertexId),
}

/// Result of edge-splitting along `ab`: the edge is removed and a new vertex
/// `v` is inserted with fresh edges `va` and `vb`. Inverse of [`SplitOff`].
#[derive(Debug, Clone)]
pub struct EdgeSplit {
    pub graph: Multigraph,
    pub new_vertex: VertexId,
    pub edge_va: EdgeId,
    pub edge_vb: EdgeId,
}

impl Multigraph {
    pub fn new(vertex_count: usize, pairs: &[(VertexId, VertexId)]) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::Precondition(
                "graph must have at least one vertex".into(),
            ));
        }
        let mut edges = Vec::with_capacity(pairs.len());
        for (id, &(u, v)) in pairs.iter().enumerate() {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            for w in [u, v] {
                if w >= vertex_count {
                    return Err(Error::VertexOutOfRange {
                        vertex: w,
                        count: vertex_count,
                    });
                }
            }
            edges.push(Edge { u, v, id });
        }
        Ok(Multigraph {
            vertex_count,
            edges,
            next_edge_id: pairs.len(),
        })
    }

    fn from_parts(vertex_count: usize, edges: Vec<Edge>, next_edge_id: EdgeId) -> Self {
        Multigraph {
            vertex_count,
            edges,
            next_edge_id,
        }
    }

    /// Cycle on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Multigraph::new(n, &pairs).unwrap()
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                pairs.push((u, v));
            }
        }
        Multigraph::new(n, &pairs).unwrap()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge> {
        self.edges
            .iter()
            .find(|e| e.id == id)
            .ok_or(Error::UnknownEdge(id))
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges.iter().filter(|e| e.touches(v)).count()
    }

    /// Neighbor multiset of `v`, one entry per incident edge, in edge-id order.
    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        self.edges
            .iter()
            .filter(|e| e.touches(v))
            .map(|e| e.other(v))
            .collect()
    }

    pub fn incident_edges(&self, v: VertexId) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|e| e.touches(v))
            .map(|e| e.id)
            .collect()
    }

    pub fn min_degree(&self) -> usize {
        (0..self.vertex_count)
            .map(|v| self.degree(v))
            .min()
            .unwrap_or(0)
    }

    pub fn is_simple(&self) -> bool {
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            let key = (e.u.min(e.v), e.u.max(e.v));
            if !seen.insert(key) {
                return false;
            }
        }
        true
    }

    /// Groups of parallel edge ids, keyed by unordered endpoint pair, classes
    /// with at least two edges only. Deterministic order.
    pub fn parallel_classes(&self) -> Vec<((VertexId, VertexId), Vec<EdgeId>)> {
        let mut map: std::collections::BTreeMap<(VertexId, VertexId), Vec<EdgeId>> =
            std::collections::BTreeMap::new();
        for e in &self.edges {
            map.entry((e.u.min(e.v), e.u.max(e.v)))
                .or_default()
                .push(e.id);
        }
        map.into_iter()
            .filter(|(_, ids)| ids.len() >= 2)
            .map(|(k, mut ids)| {
                ids.sort_unstable();
                (k, ids)
            })
            .collect()
    }

    pub fn connected_components(&self) -> Vec<Vec<VertexId>> {
        let mut comp = vec![usize::MAX; self.vertex_count];
        let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); self.vertex_count];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        let mut components = Vec::new();
        for start in 0..self.vertex_count {
            if comp[start] != usize::MAX {
                continue;
            }
            let cid = components.len();
            let mut stack = vec![start];
            let mut members = Vec::new();
            comp[start] = cid;
            while let Some(v) = stack.pop() {
                members.push(v);
                for &w in &adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = cid;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    fn is_connected_without(&self, skip: &[EdgeId]) -> bool {
        if self.vertex_count <= 1 {
            return true;
        }
        let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); self.vertex_count];
        for e in &self.edges {
            if skip.contains(&e.id) {
                continue;
            }
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.vertex_count
    }

    /// Cut edges, i.e. edges whose removal disconnects the graph.
    pub fn bridges(&self) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|e| !self.is_connected_without(&[e.id]))
            .map(|e| e.id)
            .collect()
    }

    /// Produces `kG`: each edge replaced by `k` parallel copies. Copy `i`
    /// (1-based) of the edge at position `p` receives id `p*k + (i-1)`, so
    /// copy ids biject with `E x {1..k}`.
    pub fn multiply(&self, k: usize) -> Multigraph {
        assert!(k >= 1, "multiplicity must be at least 1");
        let mut edges = Vec::with_capacity(self.edges.len() * k);
        for (pos, e) in self.edges.iter().enumerate() {
            for i in 0..k {
                edges.push(Edge {
                    u: e.u,
                    v: e.v,
                    id: pos * k + i,
                });
            }
        }
        let next = edges.len();
        Multigraph::from_parts(self.vertex_count, edges, next)
    }

    /// Number and set of edges joining distinct blocks of `p`.
    pub fn partition_cut(&self, p: &Partition) -> Result<(usize, BTreeSet<EdgeId>)> {
        // Re-validate against this graph: the partition must cover exactly V.
        let total: usize = p.blocks().iter().map(|b| b.len()).sum();
        if total != self.vertex_count {
            return Err(Error::InvalidPartition(format!(
                "partition covers {total} vertices, graph has {}",
                self.vertex_count
            )));
        }
        let block = p.block_of(self.vertex_count);
        let crossing: BTreeSet<EdgeId> = self
            .edges
            .iter()
            .filter(|e| block[e.u] != block[e.v])
            .map(|e| e.id)
            .collect();
        Ok((crossing.len(), crossing))
    }

    /// True iff every removal of `k-1` edges leaves the graph connected.
    /// Checked extensionally by enumerating edge subsets; `k` is 2 or 3.
    pub fn is_k_edge_connected(&self, k: usize) -> bool {
        assert!(k == 2 || k == 3, "only k in {{2,3}} is supported");
        if !self.is_connected() {
            return false;
        }
        match k {
            2 => self.edges.iter().all(|e| self.is_connected_without(&[e.id])),
            _ => {
                for (i, e) in self.edges.iter().enumerate() {
                    for f in &self.edges[i + 1..] {
                        if !self.is_connected_without(&[e.id, f.id]) {
                            return false;
                        }
                    }
                }
                self.edges.iter().all(|e| self.is_connected_without(&[e.id]))
            }
        }
    }

    /// Contracts the edge set `f`: each connected component of the subgraph
    /// spanned by `f` collapses to one vertex. Edges of `f` disappear, other
    /// edges are re-endpointed, and any resulting self-loop is dropped.
    /// Returns the contracted graph and the vertex map old -> new. New vertex
    /// ids are assigned in increasing order of the smallest old id per class.
    pub fn contract(&self, f: &BTreeSet<EdgeId>) -> Result<(Multigraph, Vec<VertexId>)> {
        for &id in f {
            self.edge(id)?;
        }
        // Union-find over vertices joined by f.
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut root = x;
            while parent[root] != root {
                root = parent[root];
            }
            let mut cur = x;
            while parent[cur] != root {
                let next = parent[cur];
                parent[cur] = root;
                cur = next;
            }
            root
        }
        for e in &self.edges {
            if f.contains(&e.id) {
                let (ru, rv) = (find(&mut parent, e.u), find(&mut parent, e.v));
                if ru != rv {
                    parent[ru.max(rv)] = ru.min(rv);
                }
            }
        }
        let mut new_id = vec![usize::MAX; self.vertex_count];
        let mut count = 0;
        for v in 0..self.vertex_count {
            let r = find(&mut parent, v);
            if new_id[r] == usize::MAX {
                new_id[r] = count;
                count += 1;
            }
            new_id[v] = new_id[r];
        }
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| !f.contains(&e.id))
            .map(|e| Edge {
                u: new_id[e.u],
                v: new_id[e.v],
                id: e.id,
            })
            .filter(|e| e.u != e.v)
            .collect();
        Ok((
            Multigraph::from_parts(count, edges, self.next_edge_id),
            new_id,
        ))
    }

    fn degree2_neighbors(&self, v: VertexId) -> Result<(VertexId, VertexId)> {
        let nbrs = self.neighbors(v);
        if nbrs.len() != 2 {
            return Err(Error::DegreeNotTwo {
                vertex: v,
                degree: nbrs.len(),
            });
        }
        Ok((nbrs[0], nbrs[1]))
    }

    /// Splitting off at a degree-2 vertex `v` with distinct neighbors `a, b`:
    /// removes `v` and its edges, inserts a fresh edge `ab`.
    pub fn split_off(&self, v: VertexId) -> Result<SplitOff> {
        let (a, b) = self.degree2_neighbors(v)?;
        if a == b {
            return Err(Error::NeighborsNotDistinct(v));
        }
        let remap = VertexRemap { removed: v };
        let new_edge = self.next_edge_id;
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| !e.touches(v))
            .map(|e| Edge {
                u: remap.map(e.u).unwrap(),
                v: remap.map(e.v).unwrap(),
                id: e.id,
            })
            .collect();
        edges.push(Edge {
            u: remap.map(a).unwrap(),
            v: remap.map(b).unwrap(),
            id: new_edge,
        });
        Ok(SplitOff {
            graph: Multigraph::from_parts(self.vertex_count - 1, edges, new_edge + 1),
            new_edge,
            remap,
            neighbors: (a, b),
        })
    }

    /// Removes a degree-2 vertex together with both incident edges, without
    /// inserting a replacement edge.
    pub fn remove_degree2(&self, v: VertexId) -> Result<(Multigraph, VertexRemap)> {
        self.degree2_neighbors(v)?;
        let remap = VertexRemap { removed: v };
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| !e.touches(v))
            .map(|e| Edge {
                u: remap.map(e.u).unwrap(),
                v: remap.map(e.v).unwrap(),
                id: e.id,
            })
            .collect();
        Ok((
            Multigraph::from_parts(self.vertex_count - 1, edges, self.next_edge_id),
            remap,
        ))
    }

    /// Edge-splitting along `ab`: removes the edge, appends a new vertex `v`
    /// and joins it to both former endpoints with fresh edges `va`, `vb`
    /// (`a` is the stored `u` endpoint of `ab`).
    pub fn edge_split(&self, ab: EdgeId) -> Result<EdgeSplit> {
        let e = *self.edge(ab)?;
        let new_vertex = self.vertex_count;
        let edge_va = self.next_edge_id;
        let edge_vb = self.next_edge_id + 1;
        let mut edges: Vec<Edge> = self.edges.iter().filter(|f| f.id != ab).copied().collect();
        edges.push(Edge {
            u: new_vertex,
            v: e.u,
            id: edge_va,
        });
        edges.push(Edge {
            u: new_vertex,
            v: e.v,
            id: edge_vb,
        });
        Ok(EdgeSplit {
            graph: Multigraph::from_parts(self.vertex_count + 1, edges, edge_vb + 1),
            new_vertex,
            edge_va,
            edge_vb,
        })
    }

    pub fn remove_edge(&self, id: EdgeId) -> Result<Multigraph> {
        self.edge(id)?;
        let edges: Vec<Edge> = self.edges.iter().filter(|e| e.id != id).copied().collect();
        Ok(Multigraph::from_parts(
            self.vertex_count,
            edges,
            self.next_edge_id,
        ))
    }

    /// Subgraph induced by `vs`, with vertices renumbered in ascending order
    /// of their old ids. Returns the graph and the old ids in new order.
    pub fn induced(&self, vs: &BTreeSet<VertexId>) -> (Multigraph, Vec<VertexId>) {
        let order: Vec<VertexId> = vs.iter().copied().collect();
        let mut new_id = vec![usize::MAX; self.vertex_count];
        for (i, &v) in order.iter().enumerate() {
            new_id[v] = i;
        }
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| vs.contains(&e.u) && vs.contains(&e.v))
            .map(|e| Edge {
                u: new_id[e.u],
                v: new_id[e.v],
                id: e.id,
            })
            .collect();
        (
            Multigraph::from_parts(order.len(), edges, self.next_edge_id),
            order,
        )
    }

    /// Edge ids with both endpoints inside `vs`.
    pub fn edges_within(&self, vs: &BTreeSet<VertexId>) -> BTreeSet<EdgeId> {
        self.edges
            .iter()
            .filter(|e| vs.contains(&e.u) && vs.contains(&e.v))
            .map(|e| e.id)
            .collect()
    }

    /// True iff the graph is a single cycle through all vertices.
    pub fn is_cycle(&self) -> bool {
        self.vertex_count >= 3
            && self.edge_count() == self.vertex_count
            && self.is_connected()
            && (0..self.vertex_count).all(|v| self.degree(v) == 2)
    }

    /// Searches for a chain `v0 v1 ... v_d` of length `d` whose interior
    /// vertices all have degree two. If the whole graph is a cycle the search
    /// reports that instead; otherwise returns the chain starting at the
    /// lowest-id qualifying vertex, extending over lowest-id neighbors.
    pub fn find_chain(&self, dim: &Dimension) -> ChainSearch {
        if self.is_cycle() {
            return ChainSearch::Cycle(self.vertex_count);
        }
        let d = dim.d();
        for v0 in 0..self.vertex_count {
            let mut nbrs: Vec<VertexId> = self.neighbors(v0);
            nbrs.sort_unstable();
            nbrs.dedup();
            for &v1 in &nbrs {
                if let Some(chain) = self.extend_chain(v0, v1, d) {
                    return ChainSearch::Chain(chain);
                }
            }
        }
        ChainSearch::Absent
    }

    /// Extends `v0 -> v1` into a chain of length `d` through degree-2
    /// interior vertices, lowest-id-first at each step.
    fn extend_chain(&self, v0: VertexId, v1: VertexId, d: usize) -> Option<Chain> {
        let mut vertices = vec![v0, v1];
        while vertices.len() < d + 1 {
            let cur = *vertices.last().unwrap();
            let prev = vertices[vertices.len() - 2];
            // All interior vertices must have degree exactly two.
            if self.degree(cur) != 2 {
                return None;
            }
            let mut nexts: Vec<VertexId> = self
                .neighbors(cur)
                .into_iter()
                .filter(|&w| w != prev)
                .collect();
            nexts.sort_unstable();
            let next = *nexts.first()?;
            if vertices.contains(&next) {
                return None;
            }
            vertices.push(next);
        }
        Some(Chain { vertices })
    }

    /// Parses the text format: optional `#` comment lines, a header
    /// `d n m`, then `m` lines `u v` with 0-based vertex ids. Edge ids are
    /// assigned by 0-based edge-line order. Returns the declared dimension
    /// and the graph.
    pub fn parse(text: &str) -> Result<(usize, Multigraph)> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut pairs: Vec<(VertexId, VertexId)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parse_num = |s: &str| -> Result<usize> {
                s.parse::<usize>().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    message: format!("expected a nonnegative integer, got `{s}`"),
                })
            };
            if header.is_none() {
                if fields.len() != 3 {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        message: format!("header must be `d n m`, got `{line}`"),
                    });
                }
                header = Some((
                    parse_num(fields[0])?,
                    parse_num(fields[1])?,
                    parse_num(fields[2])?,
                ));
            } else {
                if fields.len() != 2 {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        message: format!("edge line must be `u v`, got `{line}`"),
                    });
                }
                pairs.push((parse_num(fields[0])?, parse_num(fields[1])?));
            }
        }
        let (d, n, m) = header.ok_or(Error::Parse {
            line: 1,
            message: "missing `d n m` header".into(),
        })?;
        if pairs.len() != m {
            return Err(Error::Parse {
                line: text.lines().count(),
                message: format!("header declares {m} edges, found {}", pairs.len()),
            });
        }
        let graph = Multigraph::new(n, &pairs).map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?;
        Ok((d, graph))
    }

    /// Serializes in the same text format parsed by [`Multigraph::parse`].
    pub fn to_text(&self, d: usize) -> String {
        let mut out = format!("{} {} {}\n", d, self.vertex_count, self.edges.len());
        for e in &self.edges {
            out.push_str(&format!("{} {}\n", e.u, e.v));
        }
        out
    }
}
