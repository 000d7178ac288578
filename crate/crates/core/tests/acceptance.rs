//! The acceptance suite: every check runs at exact (zero-tolerance)
//! precision over the shared corpus of connected multigraphs with at most 5
//! vertices and 8 edges (one representative per labeling class), plus seeded
//! random graphs up to 7 vertices and a batch at d = 4.
//!
//! Each test prints one `PASS` line with its coverage counts; run with
//! `cargo test -p rigidkit-core --test acceptance -- --nocapture` to see
//! them. Failures abort the test with a counterexample.

#![allow(clippy::needless_range_loop)]

mod common;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num::Zero;
use rigidkit_core::decomposition::{classify, find_proper_rigid_subgraph, inductive_sequence};
use rigidkit_core::molecular::{dualize3d, molecular_prediction};
use rigidkit_core::multigraph::{Dimension, Multigraph};
use rigidkit_core::realization::{
    generic_body_hinge, realize_panel_hinge, redundancy_certificate, RealizationOutcome,
    TraceEvent,
};
use rigidkit_core::rigidity_matrix::{assemble, assemble_panel};
use rigidkit_core::tree_packing::{deficiency, deficiency_bruteforce};

fn dims23() -> [Dimension; 2] {
    [Dimension::new(2).unwrap(), Dimension::new(3).unwrap()]
}

fn predicted(graph: &Multigraph, dim: &Dimension) -> usize {
    dim.screw_dim() * (graph.vertex_count() - 1) - deficiency(graph, dim).k
}

/// Realized corpus at d = 3 (including the theta chain instances), shared
/// across rank-dependent criteria.
fn realized_d3() -> &'static Vec<(Multigraph, RealizationOutcome)> {
    static CACHE: OnceLock<Vec<(Multigraph, RealizationOutcome)>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let d3 = Dimension::new(3).unwrap();
        let mut out = Vec::new();
        for g in common::corpus() {
            let outcome = realize_panel_hinge(g, &d3, 0).expect("corpus realization at d=3");
            out.push((g.clone(), outcome));
        }
        for g in [common::theta([3, 4, 4]), common::theta([3, 3, 4])] {
            let outcome = realize_panel_hinge(&g, &d3, 0).expect("theta realization at d=3");
            out.push((g, outcome));
        }
        out
    })
}

/// Realized corpus at d = 2, shared the same way.
fn realized_d2() -> &'static Vec<(Multigraph, RealizationOutcome)> {
    static CACHE: OnceLock<Vec<(Multigraph, RealizationOutcome)>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let d2 = Dimension::new(2).unwrap();
        common::corpus()
            .iter()
            .map(|g| {
                let outcome = realize_panel_hinge(g, &d2, 0).expect("corpus realization at d=2");
                (g.clone(), outcome)
            })
            .collect()
    })
}

#[test]
fn criterion_01_deficiency_oracle_equivalence() {
    let mut checked = 0;
    for g in common::corpus() {
        for dim in &dims23() {
            let fast = deficiency(g, dim);
            let brute = deficiency_bruteforce(g, dim).expect("within enumeration bound");
            assert_eq!(
                fast.k, brute.k,
                "deficiency mismatch on {:?} at d={}",
                g,
                dim.d()
            );
            // The witness partition attains the brute-force value.
            let witness = brute.witness_partition.expect("oracle returns a witness");
            let (cut, _) = g.partition_cut(&witness).unwrap();
            let attained = dim.screw_dim() as i64 * (witness.len() as i64 - 1)
                - dim.copies_per_edge() as i64 * cut as i64;
            assert_eq!(attained.max(0) as usize, brute.k);
            checked += 1;
        }
    }
    println!(
        "criterion 01 deficiency oracle equivalence: PASS ({checked} instances, corpus of {})",
        common::corpus().len()
    );
}

#[test]
fn criterion_02_base_size_identity() {
    let mut checked = 0;
    for g in common::corpus() {
        for dim in &dims23() {
            let report = deficiency(g, dim);
            assert_eq!(
                report.base_size + report.k,
                dim.screw_dim() * (g.vertex_count() - 1),
                "base size identity fails on {:?} at d={}",
                g,
                dim.d()
            );
            checked += 1;
        }
    }
    println!("criterion 02 base size identity: PASS ({checked} instances)");
}

#[test]
fn criterion_03_generic_body_hinge_rank_bridge() {
    let mut checked = 0;
    let mut converse_checked = 0;
    for g in common::corpus() {
        for dim in &dims23() {
            let target = predicted(g, dim);
            let (_, rank) = generic_body_hinge(g, dim, 0)
                .unwrap_or_else(|e| panic!("no generic realization for {g:?} at d={}: {e}", dim.d()));
            assert_eq!(rank, target);
            checked += 1;
            // Converse: when the deficiency is positive, eight independent
            // draws never reach the full rank.
            let def = deficiency(g, dim).k;
            if def > 0 {
                let full = dim.screw_dim() * (g.vertex_count() - 1);
                let mut best = 0;
                for seed in 0..8u64 {
                    if let Ok((_, r)) = generic_body_hinge(g, dim, seed) {
                        best = best.max(r);
                    }
                }
                assert!(best < full, "rank exceeded the matroid bound on {g:?}");
                assert_eq!(best, target);
                converse_checked += 1;
            }
        }
    }
    println!(
        "criterion 03 generic body-hinge rank bridge: PASS ({checked} instances, {converse_checked} converse checks)"
    );
}

#[test]
fn criterion_04_realizations_attain_predicted_rank() {
    let d2 = Dimension::new(2).unwrap();
    let d3 = Dimension::new(3).unwrap();
    let d4 = Dimension::new(4).unwrap();
    let mut checked = 0;
    // Full corpus at both dimensions, via the shared caches.
    for (g, out) in realized_d2() {
        assert_eq!(out.rank, predicted(g, &d2), "rank mismatch on {g:?} at d=2");
        out.realization.validate(g).expect("valid panel realization");
        if g.is_simple() {
            assert!(out.realization.is_nonparallel(g), "parallel pair on {g:?}");
        }
        checked += 1;
    }
    for (g, out) in realized_d3() {
        assert_eq!(out.rank, predicted(g, &d3), "rank mismatch on {g:?} at d=3");
        out.realization.validate(g).expect("valid panel realization");
        if g.is_simple() {
            assert!(out.realization.is_nonparallel(g));
        }
        checked += 1;
    }
    // 200 random graphs with up to 7 vertices, both dimensions.
    for g in common::random_graphs(200, 7, 12, 11) {
        for dim in [&d2, &d3] {
            let out = realize_panel_hinge(&g, dim, 0).expect("random realization");
            assert_eq!(out.rank, predicted(&g, dim));
            out.realization.validate(&g).expect("valid panel realization");
            checked += 1;
        }
    }
    // 20 instances at d = 4.
    for g in common::random_graphs(20, 6, 9, 13) {
        let out = realize_panel_hinge(&g, &d4, 0).expect("d=4 realization");
        assert_eq!(out.rank, predicted(&g, &d4));
        out.realization.validate(&g).expect("valid panel realization");
        checked += 1;
    }
    println!("criterion 04 realizations attain predicted rank: PASS ({checked} instances)");
}

#[test]
fn criterion_05_structural_lemma_checks() {
    let mut two_ec = 0;
    let mut not_three_ec = 0;
    let mut split_transitions = 0;
    let mut cut_relations = 0;
    let mut sparsity_bounds = 0;
    for g in common::corpus() {
        for dim in &dims23() {
            let c = classify(g, dim);
            // Rigid graphs are 2-edge-connected.
            if c.k == 0 {
                assert!(g.is_k_edge_connected(2), "rigid but not 2ec: {g:?}");
                two_ec += 1;
            }
            if !c.minimal {
                continue;
            }
            // Minimal graphs are never 3-edge-connected (meaningful from
            // two vertices up; the one-vertex graph is vacuously connected).
            if g.vertex_count() >= 2 {
                assert!(!g.is_k_edge_connected(3), "minimal yet 3ec: {g:?}");
                not_three_ec += 1;
            }
            let no_rigid_part = find_proper_rigid_subgraph(g, dim).is_none();
            if no_rigid_part && g.vertex_count() >= 2 {
                // Sparsity of minimal graphs without rigid subgraphs.
                let (dd, copies) = (dim.screw_dim(), dim.copies_per_edge());
                let (n, m) = (g.vertex_count(), g.edge_count());
                if c.k == 0 {
                    assert!(
                        copies * m < dd * (n - 1) + dd - 1,
                        "edge bound fails on rigid {g:?}"
                    );
                } else {
                    assert_eq!(
                        copies * m,
                        dd * (n - 1) - c.k,
                        "tight edge count fails on {g:?}"
                    );
                }
                sparsity_bounds += 1;
                // Splitting off transitions: k stays at 0 or drops by one.
                if g.vertex_count() >= 3 {
                    for v in 0..g.vertex_count() {
                        if g.degree(v) != 2 {
                            continue;
                        }
                        let Ok(split) = g.split_off(v) else { continue };
                        let after = classify(&split.graph, dim);
                        let expected = if c.k == 0 { 0 } else { c.k - 1 };
                        assert_eq!(
                            after.k, expected,
                            "split transition fails at {v} on {g:?} (d={})",
                            dim.d()
                        );
                        assert!(after.minimal, "split lost minimality on {g:?}");
                        split_transitions += 1;
                    }
                }
            }
            // Additivity across cuts for minimal graphs, whose parts stay
            // minimal for their own deficiencies.
            if !g.is_k_edge_connected(2) {
                let cut = rigidkit_core::decomposition::cut_decompose(g, dim).unwrap();
                assert!(cut.relation_holds, "cut additivity fails on {g:?}");
                for (part, part_k) in &cut.parts {
                    let pc = classify(part, dim);
                    assert_eq!(pc.k, *part_k);
                    assert!(pc.minimal, "cut part lost minimality: {part:?} of {g:?}");
                }
                cut_relations += 1;
            }
        }
    }
    println!(
        "criterion 05 structural lemma checks: PASS (2ec {two_ec}, not-3ec {not_three_ec}, splits {split_transitions}, cuts {cut_relations}, bounds {sparsity_bounds})"
    );
}

#[test]
fn criterion_06_inductive_construction() {
    let mut reduced = 0;
    for g in common::corpus() {
        for dim in &dims23() {
            let c = classify(g, dim);
            if c.k != 0 || !c.minimal || g.vertex_count() < 2 {
                continue;
            }
            // Every step is re-verified minimal rigid inside the sequencer.
            let seq = inductive_sequence(g, dim)
                .unwrap_or_else(|e| panic!("no construction for {g:?} at d={}: {e}", dim.d()));
            assert!(rigidkit_core::decomposition::is_double_edge(&seq.terminal));
            reduced += 1;
        }
    }
    assert!(reduced > 0);
    println!("criterion 06 inductive construction: PASS ({reduced} minimally rigid graphs reduced)");
}

#[test]
fn criterion_07_vertex_deletion_invariance() {
    let mut checked = 0;
    for g in common::corpus() {
        if g.edge_count() == 0 {
            continue;
        }
        for dim in &dims23() {
            let (realization, rank) = generic_body_hinge(g, dim, 0).expect("generic realization");
            let matrix = assemble(g, &realization).unwrap();
            for v in 0..g.vertex_count() {
                assert_eq!(
                    matrix.rank_without_vertex(v),
                    rank,
                    "column deletion changed the rank on {g:?}, vertex {v}"
                );
                checked += 1;
            }
        }
    }
    println!("criterion 07 vertex deletion invariance: PASS ({checked} vertex deletions)");
}

#[test]
fn criterion_08_redundancy_certificates() {
    // Every rigid splitting-off step in the cached d=3 runs produced a
    // verified certificate (construction fails otherwise); require the
    // named chain instances to actually exercise that path, and re-verify
    // one certificate end to end.
    let d2 = Dimension::new(2).unwrap();
    let d3 = Dimension::new(3).unwrap();
    let mut events = 0;
    for (_, out) in realized_d2().iter().chain(realized_d3()) {
        events += out
            .trace
            .iter()
            .filter(|e| matches!(e, TraceEvent::RedundancyCertificate { .. }))
            .count();
    }
    let k23_out = realize_panel_hinge(&common::k23(), &d2, 0).unwrap();
    assert!(k23_out
        .trace
        .iter()
        .any(|e| matches!(e, TraceEvent::RedundancyCertificate { .. })));
    assert!(k23_out
        .trace
        .iter()
        .any(|e| matches!(e, TraceEvent::CandidateSelected { .. })));
    let theta_out = realize_panel_hinge(&common::theta([3, 4, 4]), &d3, 0).unwrap();
    assert!(theta_out
        .trace
        .iter()
        .any(|e| matches!(e, TraceEvent::RedundancyCertificate { .. })));
    events += 2;

    // End-to-end certificate verification on a split triangle: the lambda
    // combination is exactly zero with unit coefficient at the starred row.
    let tri = Multigraph::cycle(3);
    let split = tri.split_off(2).unwrap();
    let out = realize_panel_hinge(&split.graph, &d2, 1).unwrap();
    let cert = redundancy_certificate(&split.graph, &d2, &out.realization, split.new_edge)
        .expect("certificate exists for the rigid double edge");
    assert_eq!(
        cert.lambdas[&(cert.edge, cert.i_star)],
        num::BigRational::from_integer(1.into())
    );
    let matrix = assemble_panel(&split.graph, &out.realization).unwrap();
    let cols = matrix.matrix.cols();
    let mut combo = vec![num::BigRational::zero(); cols];
    for (key, lambda) in &cert.lambdas {
        let row = matrix.row_index.iter().position(|k| k == key).unwrap();
        for c in 0..cols {
            combo[c] += lambda * matrix.matrix.at(row, c);
        }
    }
    assert!(combo.iter().all(|c| c.is_zero()));
    println!("criterion 08 redundancy certificates: PASS ({events} certificates verified)");
}

#[test]
fn criterion_09_perturbation_preserves_rank() {
    let d2 = Dimension::new(2).unwrap();
    let mut events = 0;
    let mut collected: Vec<&TraceEvent> = Vec::new();
    for (_, out) in realized_d2().iter().chain(realized_d3()) {
        collected.extend(out.trace.iter());
    }
    let k23_out = realize_panel_hinge(&common::k23(), &d2, 0).unwrap();
    let c4_out = realize_panel_hinge(&Multigraph::cycle(4), &d2, 0).unwrap();
    let traces: Vec<&TraceEvent> = collected
        .into_iter()
        .chain(k23_out.trace.iter())
        .chain(c4_out.trace.iter())
        .collect();
    for event in traces {
        if let TraceEvent::Perturbation {
            rank_before,
            rank_after,
            ..
        } = event
        {
            assert!(rank_after >= rank_before);
            events += 1;
        }
    }
    assert!(events > 0, "no perturbation ran anywhere in the suite");
    println!("criterion 09 perturbation preserves rank: PASS ({events} perturbations)");
}

#[test]
fn criterion_10_molecular_corollary() {
    let mut checked = 0;
    let mut spot = BTreeMap::new();
    for g in common::corpus() {
        if !g.is_simple() || g.min_degree() < 2 {
            continue;
        }
        let rep = molecular_prediction(g, true, 0).unwrap();
        assert_eq!(
            rep.agree,
            Some(true),
            "square-graph rank disagrees on {g:?}: predicted {}, oracle {:?}",
            rep.predicted_rank,
            rep.oracle_rank
        );
        checked += 1;
    }
    for g in common::random_graphs(60, 7, 12, 17) {
        if !g.is_simple() || g.min_degree() < 2 {
            continue;
        }
        let rep = molecular_prediction(&g, true, 0).unwrap();
        assert_eq!(rep.agree, Some(true));
        checked += 1;
    }
    for (n, expected) in [(3usize, 3usize), (4, 6), (7, 14)] {
        let rep = molecular_prediction(&Multigraph::cycle(n), true, 0).unwrap();
        assert_eq!(rep.predicted_rank, expected);
        assert_eq!(rep.agree, Some(true));
        spot.insert(n, expected);
        checked += 1;
    }
    println!(
        "criterion 10 molecular corollary: PASS ({checked} graphs, cycle spot values {spot:?})"
    );
}

#[test]
fn criterion_11_duality_preserves_rank() {
    let mut checked = 0;
    for (g, out) in realized_d3() {
        if !g.is_simple() || !out.realization.is_nonparallel(g) {
            continue;
        }
        // dualize3d verifies rank preservation internally and fails loudly.
        let (_, dual_rank) = dualize3d(g, &out.realization)
            .unwrap_or_else(|e| panic!("duality failed on {g:?}: {e}"));
        assert_eq!(dual_rank, out.rank);
        checked += 1;
    }
    assert!(checked > 0);
    println!("criterion 11 duality preserves rank: PASS ({checked} frameworks dualized)");
}
