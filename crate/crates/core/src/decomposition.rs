//! Classification of graphs by degrees of freedom, minimality, rigid
//! subgraph detection, cut decomposition, and the inductive reduction to the
//! two-vertex double edge via contractions and splitting off.
//!
//! A graph is a `k`-dof-graph if the deficiency of its multiplied graph is
//! `k`; it is minimal if removing any edge changes that. An edge is
//! redundant iff some base of the count matroid avoids all its copies.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::multigraph::{Dimension, EdgeId, Multigraph, VertexId};
use crate::tree_packing::{
    all_copies, deficiency, fundamental_circuit, min_copy_base, rank_and_base, spanned_vertices,
};

/// Degrees of freedom, minimality and the redundant edge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DofClassification {
    pub k: usize,
    pub minimal: bool,
    pub redundant_edges: BTreeSet<EdgeId>,
}

/// Degrees of freedom plus the edges whose removal preserves them. An edge
/// is redundant iff its minimum copy load over all bases is zero.
pub fn classify(graph: &Multigraph, dim: &Dimension) -> DofClassification {
    let k = deficiency(graph, dim).k;
    let mut redundant = BTreeSet::new();
    for e in graph.edges() {
        let (_, h) = min_copy_base(graph, dim, e.id).expect("edge of the graph");
        if h == 0 {
            redundant.insert(e.id);
        }
    }
    DofClassification {
        k,
        minimal: redundant.is_empty(),
        redundant_edges: redundant,
    }
}

/// Removes edges lowest-id-first while the deficiency is preserved; the
/// result is a minimal `k`-dof spanning subgraph with the same deficiency.
/// One pass suffices: deficiency is monotone under edge removal, so an edge
/// that is not redundant now never becomes redundant later.
pub fn minimize(graph: &Multigraph, dim: &Dimension) -> Multigraph {
    let k = deficiency(graph, dim).k;
    let mut current = graph.clone();
    let mut ids: Vec<EdgeId> = current.edges().iter().map(|e| e.id).collect();
    ids.sort_unstable();
    for id in ids {
        let without = current.remove_edge(id).expect("edge of the graph");
        if deficiency(&without, dim).k == k {
            current = without;
        }
    }
    current
}

/// A proper rigid subgraph: an induced `0`-dof subgraph on more than one but
/// fewer than all vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RigidSubgraph {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<EdgeId>,
}

/// Searches for a proper rigid subgraph. Parallel classes give immediate
/// two-vertex witnesses; fundamental circuits of one base are probed next
/// (a circuit always induces a rigid subgraph); exhaustive enumeration of
/// connected vertex subsets, smallest first, completes the search, since a
/// rigid subgraph can hide inside an exactly-tight base where no circuit
/// reaches it.
pub fn find_proper_rigid_subgraph(graph: &Multigraph, dim: &Dimension) -> Option<RigidSubgraph> {
    let n = graph.vertex_count();
    if n <= 2 {
        return None;
    }
    if let Some(((u, v), _)) = graph.parallel_classes().into_iter().next() {
        let vs = BTreeSet::from([u, v]);
        return Some(RigidSubgraph {
            edges: graph.edges_within(&vs),
            vertices: vs,
        });
    }
    // Circuit probe: cheap and usually sufficient.
    let rb = rank_and_base(graph, dim);
    for c in all_copies(graph, dim) {
        if rb.base.contains(&c) {
            continue;
        }
        let circuit =
            fundamental_circuit(graph, dim, &rb.base, c).expect("copy outside a base");
        let vs = spanned_vertices(graph, &circuit);
        if vs.len() > 1 && vs.len() < n {
            return Some(RigidSubgraph {
                edges: graph.edges_within(&vs),
                vertices: vs,
            });
        }
    }
    // Complete fallback: connected induced subgraphs by size, then by vertex
    // set, rejecting those too sparse to be rigid before the matroid runs.
    let dd = dim.screw_dim();
    let copies = dim.copies_per_edge();
    for size in 2..n {
        let mut found: Option<RigidSubgraph> = None;
        for subset in crate::geometry::subsets_lex(n, size) {
            let vs: BTreeSet<VertexId> = subset.into_iter().collect();
            let edges = graph.edges_within(&vs);
            if copies * edges.len() < dd * (size - 1) {
                continue;
            }
            let (induced, _) = graph.induced(&vs);
            if !induced.is_connected() {
                continue;
            }
            if deficiency(&induced, dim).k == 0 {
                found = Some(RigidSubgraph {
                    vertices: vs,
                    edges,
                });
                break;
            }
        }
        if found.is_some() {
            return found;
        }
    }
    None
}

/// How a cut decomposition split the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutKind {
    Bridge(EdgeId),
    Disconnected,
}

/// The two sides of a cut with their deficiencies and the additivity check
/// `k = k1 + k2 + 1` across a bridge, `k = k1 + k2 + D` across a
/// disconnection (valid for minimal inputs).
#[derive(Debug, Clone)]
pub struct CutDecomposition {
    pub kind: CutKind,
    pub parts: Vec<(Multigraph, usize)>,
    pub whole_k: usize,
    pub relation_holds: bool,
}

/// Splits a graph that is not 2-edge-connected along its lowest-id bridge,
/// or into a component plus the rest when disconnected.
pub fn cut_decompose(graph: &Multigraph, dim: &Dimension) -> Result<CutDecomposition> {
    let whole_k = deficiency(graph, dim).k;
    let dd = dim.screw_dim();
    let components = graph.connected_components();
    if components.len() > 1 {
        let first: BTreeSet<VertexId> = components[0].iter().copied().collect();
        let rest: BTreeSet<VertexId> = (0..graph.vertex_count())
            .filter(|v| !first.contains(v))
            .collect();
        let (g1, _) = graph.induced(&first);
        let (g2, _) = graph.induced(&rest);
        let k1 = deficiency(&g1, dim).k;
        let k2 = deficiency(&g2, dim).k;
        return Ok(CutDecomposition {
            kind: CutKind::Disconnected,
            relation_holds: whole_k == k1 + k2 + dd,
            parts: vec![(g1, k1), (g2, k2)],
            whole_k,
        });
    }
    let bridges = graph.bridges();
    let Some(&bridge) = bridges.first() else {
        return Err(Error::Precondition(
            "graph is 2-edge-connected; no cut to decompose along".into(),
        ));
    };
    let edge = *graph.edge(bridge)?;
    let without = graph.remove_edge(bridge)?;
    let comps = without.connected_components();
    let side_u: BTreeSet<VertexId> = comps
        .iter()
        .find(|c| c.contains(&edge.u))
        .expect("endpoint component")
        .iter()
        .copied()
        .collect();
    let side_v: BTreeSet<VertexId> = (0..graph.vertex_count())
        .filter(|v| !side_u.contains(v))
        .collect();
    let (g1, _) = graph.induced(&side_u);
    let (g2, _) = graph.induced(&side_v);
    let k1 = deficiency(&g1, dim).k;
    let k2 = deficiency(&g2, dim).k;
    Ok(CutDecomposition {
        kind: CutKind::Bridge(bridge),
        relation_holds: whole_k == k1 + k2 + 1,
        parts: vec![(g1, k1), (g2, k2)],
        whole_k,
    })
}

/// One reduction move of the inductive construction.
#[derive(Debug, Clone)]
pub enum StepKind {
    /// Contraction of a proper rigid subgraph.
    Contraction(RigidSubgraph),
    /// Splitting off at a degree-2 vertex along its two neighbors.
    SplitOff {
        vertex: VertexId,
        neighbors: (VertexId, VertexId),
    },
}

#[derive(Debug, Clone)]
pub struct ReductionStep {
    pub kind: StepKind,
    pub before: Multigraph,
    pub after: Multigraph,
    /// Old vertex id to new vertex id; `None` for a removed vertex.
    pub vmap: Vec<Option<VertexId>>,
    pub k_before: usize,
    pub k_after: usize,
}

/// Reduces a connected minimal `k`-dof-graph with at least three vertices by
/// contracting a proper rigid subgraph when one exists (preferred), else by
/// splitting off at the lowest-id degree-2 vertex. The resulting graph is
/// re-verified to be a minimal dof-graph with the predicted `k`.
pub fn reduction_step(graph: &Multigraph, dim: &Dimension) -> Result<ReductionStep> {
    let classification = classify(graph, dim);
    if !classification.minimal {
        return Err(Error::Precondition(format!(
            "input is not minimal; redundant edges {:?}",
            classification.redundant_edges
        )));
    }
    if graph.vertex_count() < 3 {
        return Err(Error::Precondition(
            "reduction needs at least three vertices".into(),
        ));
    }
    if !graph.is_connected() {
        return Err(Error::Precondition("reduction needs a connected graph".into()));
    }
    let k = classification.k;
    if let Some(rigid) = find_proper_rigid_subgraph(graph, dim) {
        let (after, vmap) = graph.contract(&rigid.edges)?;
        let step = ReductionStep {
            kind: StepKind::Contraction(rigid),
            before: graph.clone(),
            after: after.clone(),
            vmap: vmap.into_iter().map(Some).collect(),
            k_before: k,
            k_after: k,
        };
        verify_step(&step, dim)?;
        return Ok(step);
    }
    // No proper rigid subgraph: minimal-with-no-rigid-subgraph graphs are
    // strictly sparse, which is worth asserting before splitting.
    let copies = dim.copies_per_edge();
    let dd = dim.screw_dim();
    let (n, m) = (graph.vertex_count(), graph.edge_count());
    if k == 0 {
        debug_assert!(copies * m < dd * (n - 1) + dd - 1);
    } else {
        debug_assert_eq!(copies * m, dd * (n - 1) - k);
    }
    let Some(v) = (0..graph.vertex_count()).find(|&v| graph.degree(v) == 2) else {
        return Err(Error::Precondition(
            "no proper rigid subgraph and no degree-2 vertex; cannot reduce".into(),
        ));
    };
    let split = graph.split_off(v)?;
    let k_after = if k == 0 { 0 } else { k - 1 };
    let step = ReductionStep {
        kind: StepKind::SplitOff {
            vertex: v,
            neighbors: split.neighbors,
        },
        before: graph.clone(),
        after: split.graph,
        vmap: (0..graph.vertex_count()).map(|w| split.remap.map(w)).collect(),
        k_before: k,
        k_after,
    };
    verify_step(&step, dim)?;
    Ok(step)
}

fn verify_step(step: &ReductionStep, dim: &Dimension) -> Result<()> {
    let after = classify(&step.after, dim);
    if after.k != step.k_after || !after.minimal {
        return Err(Error::Precondition(format!(
            "reduction produced k = {}, minimal = {}, expected minimal k = {}",
            after.k, after.minimal, step.k_after
        )));
    }
    Ok(())
}

/// The full reduction sequence of a minimally body-and-hinge rigid graph
/// down to the two-vertex double edge.
#[derive(Debug, Clone)]
pub struct ConstructionSequence {
    pub steps: Vec<ReductionStep>,
    pub terminal: Multigraph,
}

/// True iff the graph is two vertices joined by exactly two parallel edges.
pub fn is_double_edge(graph: &Multigraph) -> bool {
    graph.vertex_count() == 2
        && graph.edge_count() == 2
        && graph.edges().iter().all(|e| e.u != e.v)
}

/// Iterates [`reduction_step`] on a minimal `0`-dof-graph until the
/// two-vertex double edge remains, verifying every intermediate graph.
pub fn inductive_sequence(graph: &Multigraph, dim: &Dimension) -> Result<ConstructionSequence> {
    let classification = classify(graph, dim);
    if classification.k != 0 || !classification.minimal {
        return Err(Error::Precondition(format!(
            "inductive construction needs a minimal 0-dof graph, got k = {}, minimal = {}",
            classification.k, classification.minimal
        )));
    }
    if graph.vertex_count() < 2 {
        return Err(Error::Precondition(
            "inductive construction needs at least two vertices".into(),
        ));
    }
    let mut steps = Vec::new();
    let mut current = graph.clone();
    while current.vertex_count() > 2 {
        let step = reduction_step(&current, dim)?;
        current = step.after.clone();
        steps.push(step);
    }
    if !is_double_edge(&current) {
        return Err(Error::Precondition(
            "reduction did not terminate at the double edge".into(),
        ));
    }
    Ok(ConstructionSequence {
        steps,
        terminal: current,
    })
}
