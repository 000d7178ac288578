//! Property tests over randomly generated small multigraphs: counting
//! identities under graph surgeries, agreement of the two deficiency code
//! paths, and the three-way independence cross-check (augmenting paths vs
//! packing certificate vs exhaustive subset counting).

use proptest::prelude::*;

use rigidkit_core::multigraph::{ChainSearch, Dimension, Multigraph, Partition};
use rigidkit_core::tree_packing::{
    all_copies, deficiency, deficiency_bruteforce, is_independent, spanned_vertices,
    validate_packing, EdgeCopySet, Independence,
};

/// A connected multigraph on 2..=6 vertices with at most 9 edges: a random
/// spanning tree plus extra random edges.
fn connected_multigraph() -> impl Strategy<Value = Multigraph> {
    (2usize..=6)
        .prop_flat_map(|n| {
            let tree = proptest::collection::vec(0usize..usize::MAX, n - 1);
            let extra = proptest::collection::vec((0usize..n, 0usize..n), 0..=5);
            (Just(n), tree, extra)
        })
        .prop_filter_map("skip self-loops and oversized graphs", |(n, tree, extra)| {
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            for (i, r) in tree.iter().enumerate() {
                let child = i + 1;
                let parent = r % child;
                pairs.push((parent, child));
            }
            for (u, v) in extra {
                if u != v {
                    pairs.push((u.min(v), u.max(v)));
                }
            }
            if pairs.len() > 9 {
                pairs.truncate(9);
            }
            Multigraph::new(n, &pairs).ok()
        })
}

/// A partition of `0..n` from a restricted-growth string.
fn partition_of(n: usize) -> impl Strategy<Value = Partition> {
    proptest::collection::vec(0usize..n, n).prop_map(move |labels| {
        let mut normalized = vec![usize::MAX; n];
        let mut next = 0;
        let mut blocks: Vec<std::collections::BTreeSet<usize>> = Vec::new();
        for (v, &raw) in labels.iter().enumerate() {
            let canon = if normalized[raw] == usize::MAX {
                normalized[raw] = next;
                blocks.push(std::collections::BTreeSet::new());
                next += 1;
                next - 1
            } else {
                normalized[raw]
            };
            blocks[canon].insert(v);
        }
        Partition::new(blocks, n).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiply_counts_and_cut_scaling(
        graph in connected_multigraph(),
        k in 1usize..=4,
    ) {
        let blown = graph.multiply(k);
        prop_assert_eq!(blown.edge_count(), k * graph.edge_count());
        let partition = Partition::singletons(graph.vertex_count());
        let (base, _) = graph.partition_cut(&partition).unwrap();
        let (scaled, _) = blown.partition_cut(&partition).unwrap();
        prop_assert_eq!(scaled, k * base);
    }

    #[test]
    fn arbitrary_partition_cut_scaling(
        graph in connected_multigraph().prop_flat_map(|g| {
            let n = g.vertex_count();
            (Just(g), partition_of(n), 1usize..=3)
        }),
    ) {
        let (g, p, k) = graph;
        let (base, _) = g.partition_cut(&p).unwrap();
        let (scaled, _) = g.multiply(k).partition_cut(&p).unwrap();
        prop_assert_eq!(scaled, k * base);
    }

    #[test]
    fn deficiency_code_paths_agree(graph in connected_multigraph(), d in 2usize..=3) {
        let dim = Dimension::new(d).unwrap();
        let fast = deficiency(&graph, &dim);
        let brute = deficiency_bruteforce(&graph, &dim).unwrap();
        prop_assert_eq!(fast.k, brute.k);
        prop_assert_eq!(
            fast.base_size + fast.k,
            dim.screw_dim() * (graph.vertex_count() - 1)
        );
    }

    #[test]
    fn independence_three_way_cross_check(
        graph in connected_multigraph(),
        d in 2usize..=3,
        selector in proptest::collection::vec(any::<bool>(), 64),
    ) {
        let dim = Dimension::new(d).unwrap();
        let ground = all_copies(&graph, &dim);
        let subset: EdgeCopySet = ground
            .iter()
            .zip(selector.iter().cycle())
            .filter(|(_, &take)| take)
            .map(|(&c, _)| c)
            .take(12)
            .collect();
        // (a) exhaustive subset counting as the ground truth.
        let items: Vec<_> = subset.iter().copied().collect();
        let mut counting_independent = true;
        for mask in 1u32..(1 << items.len()) {
            let sub: EdgeCopySet = items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &c)| c)
                .collect();
            let nv = spanned_vertices(&graph, &sub).len();
            if sub.len() > dim.screw_dim() * (nv - 1) {
                counting_independent = false;
                break;
            }
        }
        // (b) the augmenting-path verdict, (c) its certificate.
        match is_independent(&graph, &dim, &subset) {
            Independence::Independent(packing) => {
                prop_assert!(counting_independent);
                prop_assert_eq!(packing.total_size(), subset.len());
                prop_assert!(validate_packing(&graph, &packing).is_ok());
            }
            Independence::Dependent { violating } => {
                prop_assert!(!counting_independent);
                let nv = spanned_vertices(&graph, &violating).len();
                prop_assert!(violating.len() > dim.screw_dim() * (nv - 1));
                prop_assert!(violating.is_subset(&subset));
            }
        }
    }

    #[test]
    fn surgery_size_identities(graph in connected_multigraph()) {
        for v in 0..graph.vertex_count() {
            if graph.degree(v) != 2 {
                continue;
            }
            if let Ok(split) = graph.split_off(v) {
                prop_assert_eq!(split.graph.vertex_count(), graph.vertex_count() - 1);
                prop_assert_eq!(split.graph.edge_count(), graph.edge_count() - 1);
            }
            let (removed, _) = graph.remove_degree2(v).unwrap();
            prop_assert_eq!(removed.edge_count(), graph.edge_count() - 2);
        }
    }

    #[test]
    fn found_chains_satisfy_their_invariants(
        graph in connected_multigraph(),
        d in 2usize..=4,
    ) {
        let dim = Dimension::new(d).unwrap();
        match graph.find_chain(&dim) {
            ChainSearch::Chain(chain) => {
                prop_assert_eq!(chain.vertices.len(), d + 1);
                let distinct: std::collections::BTreeSet<_> =
                    chain.vertices.iter().collect();
                prop_assert_eq!(distinct.len(), d + 1);
                for w in chain.vertices.windows(2) {
                    prop_assert!(graph
                        .edges()
                        .iter()
                        .any(|e| e.touches(w[0]) && e.touches(w[1])));
                }
                for &v in &chain.vertices[1..d] {
                    prop_assert_eq!(graph.degree(v), 2);
                }
            }
            ChainSearch::Cycle(len) => {
                prop_assert!(graph.is_cycle());
                prop_assert_eq!(len, graph.vertex_count());
            }
            ChainSearch::Absent => {}
        }
    }
}
