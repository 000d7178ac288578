//! Assembly of the `(D-1)|E| x D|V|` rigidity matrix of a body-and-hinge
//! framework, exact rank, degrees of freedom, motion spaces and the
//! vertex-column-deletion invariance.
//!
//! The row block of edge `e = uv` is a canonical basis `r(p(e))` of the
//! orthogonal complement of the hinge extensor, placed under `u` and negated
//! under `v`. A screw assignment `S : V -> R^D` is an infinitesimal motion
//! iff it lies in the null space.

use std::collections::BTreeMap;

use num::Zero;

use crate::error::{Error, Result};
use crate::geometry::{
    complement_basis, normalize_leading, panel_intersection, Hinge, Panel, PanelIntersection,
};
use crate::linalg::{Matrix, Scalar};
use crate::multigraph::{Dimension, EdgeId, Multigraph, VertexId};

/// Hinges only: each edge carries a `(d-2)`-affine subspace.
#[derive(Debug, Clone)]
pub struct BodyHingeRealization {
    pub dim: Dimension,
    pub hinges: BTreeMap<EdgeId, Hinge>,
}

impl BodyHingeRealization {
    /// Checks that every edge of the graph has a hinge with a nonzero
    /// extensor.
    pub fn validate(&self, graph: &Multigraph) -> Result<()> {
        for e in graph.edges() {
            let hinge = self
                .hinges
                .get(&e.id)
                .ok_or(Error::UnknownEdge(e.id))?;
            if hinge.extensor(&self.dim)?.is_zero() {
                return Err(Error::Precondition(format!(
                    "hinge of edge {} is degenerate",
                    e.id
                )));
            }
        }
        Ok(())
    }
}

/// Panels per vertex plus hinges per edge, with the incidence invariant that
/// every hinge lies inside both endpoint panels.
#[derive(Debug, Clone)]
pub struct PanelHingeRealization {
    pub dim: Dimension,
    pub panels: BTreeMap<VertexId, Panel>,
    pub hinges: BTreeMap<EdgeId, Hinge>,
}

impl PanelHingeRealization {
    pub fn to_body(&self) -> BodyHingeRealization {
        BodyHingeRealization {
            dim: self.dim,
            hinges: self.hinges.clone(),
        }
    }

    /// Exact validation: every vertex has a panel, every edge a hinge whose
    /// spanning points satisfy both endpoint panel equations; parallel edges
    /// require identical endpoint panels and distinct hinges inside them.
    pub fn validate(&self, graph: &Multigraph) -> Result<()> {
        for v in 0..graph.vertex_count() {
            if !self.panels.contains_key(&v) {
                return Err(Error::Precondition(format!("vertex {v} has no panel")));
            }
        }
        for e in graph.edges() {
            let hinge = self
                .hinges
                .get(&e.id)
                .ok_or(Error::UnknownEdge(e.id))?;
            if hinge.extensor(&self.dim)?.is_zero() {
                return Err(Error::Precondition(format!(
                    "hinge of edge {} is degenerate",
                    e.id
                )));
            }
            for w in [e.u, e.v] {
                let panel = &self.panels[&w];
                for p in &hinge.points {
                    if !panel.contains(p) {
                        return Err(Error::Precondition(format!(
                            "hinge of edge {} leaves the panel of vertex {w}",
                            e.id
                        )));
                    }
                }
            }
        }
        for ((u, v), ids) in graph.parallel_classes() {
            // With a shared panel the parallel hinges must be distinct
            // inside it; with nonparallel panels the containment checks
            // above already pin every hinge to the unique intersection, and
            // coincident hinges are allowed there.
            if self.panels[&u].normal == self.panels[&v].normal {
                for (i, &a) in ids.iter().enumerate() {
                    for &b in &ids[i + 1..] {
                        if self.hinges[&a].same_subspace(&self.hinges[&b], &self.dim)? {
                            return Err(Error::Precondition(format!(
                                "parallel edges {a} and {b} share a hinge"
                            )));
                        }
                    }
                }
            } else if self.panels[&u].parallel_to(&self.panels[&v]) {
                return Err(Error::Precondition(format!(
                    "parallel edges between {u} and {v} with disjoint panels"
                )));
            }
        }
        Ok(())
    }

    /// True iff every pair of distinct vertices has nonparallel panels.
    pub fn is_nonparallel(&self, graph: &Multigraph) -> bool {
        let n = graph.vertex_count();
        for u in 0..n {
            for v in (u + 1)..n {
                if self.panels[&u].parallel_to(&self.panels[&v]) {
                    return false;
                }
            }
        }
        true
    }

    /// True iff every pair of panels is either nonparallel or identical.
    pub fn is_nondegenerate(&self, graph: &Multigraph) -> bool {
        let n = graph.vertex_count();
        for u in 0..n {
            for v in (u + 1)..n {
                let (a, b) = (&self.panels[&u], &self.panels[&v]);
                if a.parallel_to(b) && a.normal != b.normal {
                    return false;
                }
            }
        }
        true
    }

    /// Panel pairs that are parallel (coincident or not).
    pub fn parallel_pairs(&self, graph: &Multigraph) -> Vec<(VertexId, VertexId)> {
        let n = graph.vertex_count();
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if self.panels[&u].parallel_to(&self.panels[&v]) {
                    pairs.push((u, v));
                }
            }
        }
        pairs
    }

    /// Recomputes the hinge of edge `uv` as the full panel intersection.
    pub fn intersection_hinge(&self, u: VertexId, v: VertexId) -> Result<Hinge> {
        match panel_intersection(&self.panels[&u], &self.panels[&v], &self.dim)? {
            PanelIntersection::Hinge(h) => Ok(h),
            _ => Err(Error::Precondition(format!(
                "panels of {u} and {v} do not meet in a (d-2)-affine subspace"
            ))),
        }
    }
}

/// The assembled rigidity matrix with its row and column index maps.
#[derive(Debug, Clone)]
pub struct RigidityMatrix {
    pub dim: Dimension,
    pub vertex_count: usize,
    pub matrix: Matrix,
    /// Row order: `(edge id, copy)` with copies `1..=D-1` consecutive.
    pub row_index: Vec<(EdgeId, usize)>,
}

/// An infinitesimal motion: one screw center per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Motion {
    pub screws: Vec<Vec<Scalar>>,
}

impl Motion {
    /// Trivial iff all screw centers coincide.
    pub fn is_trivial(&self) -> bool {
        self.screws.windows(2).all(|w| w[0] == w[1])
    }
}

/// Motion space of a framework: a null-space basis, the `D` trivial motions,
/// and the dimension of the nontrivial quotient.
#[derive(Debug, Clone)]
pub struct MotionSpace {
    pub all: Vec<Motion>,
    pub trivial: Vec<Motion>,
    pub nontrivial_dim: usize,
}

/// Assembles the rigidity matrix with canonical complement bases per hinge.
pub fn assemble(graph: &Multigraph, realization: &BodyHingeRealization) -> Result<RigidityMatrix> {
    assemble_with(graph, realization, None)
}

/// Assembles with caller-chosen complement bases (each a `(D-1) x D` matrix
/// of rank `D-1` annihilating the hinge extensor); used to confirm that the
/// rank does not depend on the basis choice.
pub fn assemble_with_bases(
    graph: &Multigraph,
    realization: &BodyHingeRealization,
    bases: &BTreeMap<EdgeId, Matrix>,
) -> Result<RigidityMatrix> {
    assemble_with(graph, realization, Some(bases))
}

fn assemble_with(
    graph: &Multigraph,
    realization: &BodyHingeRealization,
    bases: Option<&BTreeMap<EdgeId, Matrix>>,
) -> Result<RigidityMatrix> {
    let dim = realization.dim;
    let dd = dim.screw_dim();
    let copies = dim.copies_per_edge();
    let n = graph.vertex_count();
    let mut matrix = Matrix::zeros(copies * graph.edge_count(), dd * n);
    let mut row_index = Vec::with_capacity(copies * graph.edge_count());
    for (pos, e) in graph.edges().iter().enumerate() {
        let hinge = realization
            .hinges
            .get(&e.id)
            .ok_or(Error::UnknownEdge(e.id))?;
        let basis = match bases.and_then(|b| b.get(&e.id)) {
            Some(b) => {
                if b.rows() != copies || b.cols() != dd || b.rank() != copies {
                    return Err(Error::Precondition(format!(
                        "supplied basis for edge {} is not a rank D-1 complement",
                        e.id
                    )));
                }
                let ext = hinge.extensor(&dim)?;
                for r in 0..b.rows() {
                    let dot: Scalar = b
                        .row(r)
                        .iter()
                        .zip(&ext.coords)
                        .map(|(x, y)| x * y)
                        .sum();
                    if !dot.is_zero() {
                        return Err(Error::Precondition(format!(
                            "supplied basis for edge {} does not annihilate the hinge",
                            e.id
                        )));
                    }
                }
                b.clone()
            }
            None => complement_basis(&hinge.extensor(&dim)?, &dim)?,
        };
        for i in 0..copies {
            let row = pos * copies + i;
            for c in 0..dd {
                let val = basis.at(i, c).clone();
                matrix.set(row, e.u * dd + c, val.clone());
                matrix.set(row, e.v * dd + c, -val);
            }
            row_index.push((e.id, i + 1));
        }
    }
    Ok(RigidityMatrix {
        dim,
        vertex_count: n,
        matrix,
        row_index,
    })
}

impl RigidityMatrix {
    /// Exact rank by fraction-free elimination.
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// Exact rank, fast-certified against the structural upper bound
    /// `D(|V|-1)`: the modular rank is a lower bound and the `D` trivial
    /// motions bound the rank from above, so meeting the cap is exact.
    pub fn rank_certified(&self) -> usize {
        let upper = self.dim.screw_dim() * (self.vertex_count.saturating_sub(1));
        self.matrix.rank_with_upper_bound(upper)
    }

    /// `D(|V|-1) - rank`, the dimension of the nontrivial motion space.
    pub fn degrees_of_freedom(&self) -> usize {
        self.dim.screw_dim() * (self.vertex_count - 1) - self.rank()
    }

    /// Rank after deleting the `D` columns of `v`.
    pub fn rank_without_vertex(&self, v: VertexId) -> usize {
        let dd = self.dim.screw_dim();
        let drop: Vec<usize> = (v * dd..(v + 1) * dd).collect();
        self.matrix.drop_columns(&drop).rank()
    }

    /// Row indices of the copies of `edge`.
    pub fn rows_of_edge(&self, edge: EdgeId) -> Vec<usize> {
        self.row_index
            .iter()
            .enumerate()
            .filter(|(_, (e, _))| *e == edge)
            .map(|(i, _)| i)
            .collect()
    }

    /// Exact null-space basis split into per-vertex screws, normalized so
    /// each motion's first nonzero coordinate is 1, plus the D trivial
    /// motions.
    pub fn motion_space(&self) -> MotionSpace {
        let dd = self.dim.screw_dim();
        let n = self.vertex_count;
        let mut all = Vec::new();
        for mut v in self.matrix.null_space() {
            normalize_leading(&mut v);
            all.push(Motion {
                screws: (0..n).map(|w| v[w * dd..(w + 1) * dd].to_vec()).collect(),
            });
        }
        let trivial: Vec<Motion> = (0..dd)
            .map(|i| {
                let mut screw = vec![Scalar::zero(); dd];
                screw[i] = num::One::one();
                Motion {
                    screws: vec![screw; n],
                }
            })
            .collect();
        let nontrivial_dim = all.len() - dd.min(all.len());
        MotionSpace {
            all,
            trivial,
            nontrivial_dim,
        }
    }

    /// Applies the matrix to a motion (flattened screw assignment).
    pub fn apply(&self, motion: &Motion) -> Vec<Scalar> {
        let flat: Vec<Scalar> = motion.screws.iter().flatten().cloned().collect();
        self.matrix.mul_vec(&flat)
    }

    /// Text dump: one line per row, `edge_id copy : entries` as `num/den`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (r, (edge, copy)) in self.row_index.iter().enumerate() {
            let entries: Vec<String> = self
                .matrix
                .row(r)
                .iter()
                .map(|s| format!("{}/{}", s.numer(), s.denom()))
                .collect();
            out.push_str(&format!("{edge} {copy} : {}\n", entries.join(" ")));
        }
        out
    }
}

/// Convenience wrapper: assembles a panel realization and returns its matrix.
pub fn assemble_panel(
    graph: &Multigraph,
    realization: &PanelHingeRealization,
) -> Result<RigidityMatrix> {
    assemble(graph, &realization.to_body())
}
