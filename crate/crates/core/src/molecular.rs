//! Square graphs, the predicted 3-dimensional bar-and-joint rank
//! `r(G^2) = 3|V| - 6 - def`, an independent exact bar-and-joint rank
//! oracle, and the 3-dimensional point-plane polarity taking nonparallel
//! panel-and-hinge frameworks to hinge-concurrent ones.

use std::collections::BTreeMap;

use num::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{Hinge, HomogeneousPoint};
use crate::linalg::{scalar_ratio, Matrix, Scalar};
use crate::multigraph::{Dimension, Multigraph};
use crate::rigidity_matrix::{assemble, assemble_panel, BodyHingeRealization, PanelHingeRealization};
use crate::tree_packing::deficiency;

/// Prediction for the square graph's generic bar-and-joint rank, optionally
/// cross-checked against an exact randomized rank oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MolecularReport {
    pub n: usize,
    pub edges_of_square: usize,
    pub deficiency: usize,
    pub predicted_rank: usize,
    pub oracle_rank: Option<usize>,
    pub agree: Option<bool>,
}

/// The square of a graph: `E^2` joins every pair at distance one or two.
/// The output is simple; parallel classes collapse.
pub fn square(graph: &Multigraph) -> Multigraph {
    let n = graph.vertex_count();
    let mut adjacent = vec![vec![false; n]; n];
    for e in graph.edges() {
        adjacent[e.u][e.v] = true;
        adjacent[e.v][e.u] = true;
    }
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let direct = adjacent[u][v];
            let two_step = (0..n).any(|w| w != u && w != v && adjacent[u][w] && adjacent[w][v]);
            if direct || two_step {
                pairs.push((u, v));
            }
        }
    }
    Multigraph::new(n, &pairs).expect("square of a loop-free graph is loop-free")
}

/// Exact rank of the standard 3-dimensional bar-and-joint rigidity matrix of
/// `graph` at seeded random rational joint coordinates, maximized over up to
/// eight draws (stopping early at the structural cap).
pub fn bar_joint_rank_3d(graph: &Multigraph, seed: u64) -> usize {
    let n = graph.vertex_count();
    let m = graph.edge_count();
    let cap = if n >= 3 { (3 * n - 6).min(m) } else { m.min(1) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..crate::realization::RESAMPLE_BUDGET {
        let points: Vec<Vec<Scalar>> = (0..n)
            .map(|_| {
                (0..3)
                    .map(|_| scalar_ratio(rng.gen_range(-4096..=4096), 1 << rng.gen_range(0..=6)))
                    .collect()
            })
            .collect();
        let mut rows = Vec::with_capacity(m);
        for e in graph.edges() {
            let mut row = vec![Scalar::zero(); 3 * n];
            for c in 0..3 {
                let diff = &points[e.u][c] - &points[e.v][c];
                row[e.u * 3 + c] = diff.clone();
                row[e.v * 3 + c] = -diff;
            }
            rows.push(row);
        }
        let rank = Matrix::from_rows(rows).rank();
        best = best.max(rank);
        if best == cap {
            break;
        }
    }
    best
}

/// Computes the deficiency-based prediction `3|V| - 6 - def` for the square
/// graph's bar-and-joint rank (dimension fixed to 3) and, when asked,
/// compares it against the exact randomized oracle. Requires a simple graph
/// of minimum degree at least two.
pub fn molecular_prediction(
    graph: &Multigraph,
    check_oracle: bool,
    seed: u64,
) -> Result<MolecularReport> {
    if !graph.is_simple() {
        return Err(Error::Precondition(
            "molecular prediction requires a simple graph".into(),
        ));
    }
    let min_deg = graph.min_degree();
    if min_deg < 2 {
        return Err(Error::Precondition(format!(
            "molecular prediction requires minimum degree 2, found {min_deg}"
        )));
    }
    let dim = Dimension::new(3)?;
    let def = deficiency(graph, &dim).k;
    let n = graph.vertex_count();
    let predicted_rank = 3 * n - 6 - def;
    let squared = square(graph);
    let (oracle_rank, agree) = if check_oracle {
        let rank = bar_joint_rank_3d(&squared, seed);
        (Some(rank), Some(rank == predicted_rank))
    } else {
        (None, None)
    };
    Ok(MolecularReport {
        n,
        edges_of_square: squared.edge_count(),
        deficiency: def,
        predicted_rank,
        oracle_rank,
        agree,
    })
}

/// Point-plane polarity in 3-space: the panel `{x . c = 1}` maps to the
/// point `c`, and the hinge of an edge `uv` maps to the line through `c(u)`
/// and `c(v)`. The image is a hinge-concurrent body-and-hinge framework
/// whose exact rank must equal the input's (checked).
pub fn dualize3d(
    graph: &Multigraph,
    realization: &PanelHingeRealization,
) -> Result<(BodyHingeRealization, usize)> {
    let dim = realization.dim;
    if dim.d() != 3 {
        return Err(Error::Precondition("duality is specific to d = 3".into()));
    }
    if !realization.is_nonparallel(graph) {
        return Err(Error::Precondition(
            "duality requires a nonparallel realization".into(),
        ));
    }
    let mut hinges = BTreeMap::new();
    for e in graph.edges() {
        let cu = HomogeneousPoint::finite(&realization.panels[&e.u].normal);
        let cv = HomogeneousPoint::finite(&realization.panels[&e.v].normal);
        hinges.insert(e.id, Hinge::new(vec![cu, cv], &dim)?);
    }
    let dual = BodyHingeRealization { dim, hinges };
    let original_rank = assemble_panel(graph, realization)?.rank();
    let dual_rank = assemble(graph, &dual)?.rank();
    if dual_rank != original_rank {
        return Err(Error::Precondition(format!(
            "duality changed the rank: {original_rank} -> {dual_rank}"
        )));
    }
    Ok((dual, dual_rank))
}
