//! Structural oracles: isomorphism-class counts, known containments, and
//! exact density identities, cross-checked against brute force.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use num_bigint::BigInt;
use turan_field::Rational;
use turan_hypergraph::{binom, dedup_isomorphic, for_each_permutation, ThreeGraph};

fn g(text: &str) -> ThreeGraph {
    text.parse().unwrap()
}

/// All labeled graphs of order `n` (every subset of the triple set).
fn all_labeled(n: usize) -> Vec<ThreeGraph> {
    let count = binom(n, 3);
    assert!(count < 20, "too many masks to enumerate");
    (0u32..1 << count)
        .map(|mask| {
            ThreeGraph::from_edge_indices(n, (0..count).filter(|t| mask >> t & 1 == 1)).unwrap()
        })
        .collect()
}

#[test]
fn isomorphism_class_counts_match_the_literature() {
    // Numbers of 3-uniform hypergraphs up to isomorphism: 2 on 3 vertices,
    // 5 on 4, 34 on 5.
    for (n, expected) in [(3, 2), (4, 5), (5, 34)] {
        let classes = dedup_isomorphic(&all_labeled(n)).unwrap();
        assert_eq!(classes.len(), expected, "order {n}");
    }
}

#[test]
fn canonical_form_is_relabeling_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..250 {
        let n = rng.gen_range(3..=7);
        let count = binom(n, 3);
        let g = ThreeGraph::from_edge_indices(
            n,
            (0..count).filter(|_| rng.gen_bool(0.4)),
        )
        .unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let h = g.permuted(&perm).unwrap();
        assert_eq!(g.canonical_form().unwrap(), h.canonical_form().unwrap());
        assert!(g.is_isomorphic_to(&h).unwrap());
    }
}

#[test]
fn canonical_form_separates_classes_exhaustively() {
    // At order 4 the canonical map must induce exactly the partition given
    // by brute-force isomorphism testing.
    let graphs = all_labeled(4);
    for a in &graphs {
        for b in &graphs {
            let iso_brute = {
                let mut found = false;
                for_each_permutation(4, |perm| {
                    if !found && a.permuted(perm).unwrap() == *b {
                        found = true;
                    }
                });
                found
            };
            assert_eq!(
                a.canonical_form().unwrap() == b.canonical_form().unwrap(),
                iso_brute
            );
        }
    }
}

#[test]
fn stabilized_canonical_form_fixes_labeled_vertices() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.gen_range(4..=6);
        let fixed = rng.gen_range(1..n);
        let count = binom(n, 3);
        let g = ThreeGraph::from_edge_indices(
            n,
            (0..count).filter(|_| rng.gen_bool(0.5)),
        )
        .unwrap();
        // A permutation moving only unlabeled vertices must not change the
        // stabilized form.
        let mut perm: Vec<usize> = (0..n).collect();
        perm[fixed..].shuffle(&mut rng);
        let h = g.permuted(&perm).unwrap();
        assert_eq!(
            g.canonical_form_stabilized(fixed).unwrap(),
            h.canonical_form_stabilized(fixed).unwrap()
        );
        // The stabilized form with everything fixed is the graph itself.
        assert_eq!(
            g.canonical_form_stabilized(n).unwrap().graph(),
            g.clone()
        );
    }
}

#[test]
fn subgraph_containment_frozen_cases() {
    let k4 = g("4:123,124,134,234");
    let k4_minus = g("4:123,124,134");
    let f5 = g("5:123,124,345");
    let fano = g("7:123,145,356,167,257,347,246");
    let pentagon = g("5:123,234,345,145,125");

    assert!(k4.contains_subgraph(&k4_minus));
    assert!(!k4.contains_subgraph(&f5), "too few vertices");
    assert!(!f5.contains_subgraph(&k4_minus));
    assert!(!fano.contains_subgraph(&k4_minus), "the plane is linear");
    assert!(!fano.contains_subgraph(&f5), "no two plane lines share a pair");
    assert!(!pentagon.contains_subgraph(&k4_minus));
    assert!(f5.contains_subgraph(&g("4:123,124")));
    // Every graph contains the empty pattern on any admissible order.
    assert!(f5.contains_subgraph(&g("5:")));
    assert!(!g("4:").contains_subgraph(&g("5:")));
}

#[test]
fn subgraph_containment_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..120 {
        let nf = rng.gen_range(3..=4);
        let ng = rng.gen_range(4..=6);
        let f = ThreeGraph::from_edge_indices(
            nf,
            (0..binom(nf, 3)).filter(|_| rng.gen_bool(0.5)),
        )
        .unwrap();
        let h = ThreeGraph::from_edge_indices(
            ng,
            (0..binom(ng, 3)).filter(|_| rng.gen_bool(0.4)),
        )
        .unwrap();

        // Brute force: try every injection via permutations of the host.
        let mut brute = false;
        for_each_permutation(ng, |perm| {
            if brute {
                return;
            }
            let ok = f.edges().iter().all(|&[x, y, z]| {
                h.has_edge(perm[x], perm[y], perm[z])
            });
            if ok {
                brute = true;
            }
        });
        assert_eq!(h.contains_subgraph(&f), brute);
        if let Some(image) = h.find_subgraph_embedding(&f) {
            for [x, y, z] in f.edges() {
                assert!(h.has_edge(image[x], image[y], image[z]));
            }
        }
    }
}

#[test]
fn induced_containment_frozen_cases() {
    let one_edge_on_four = g("4:123");
    assert!(g("5:123").contains_induced(&one_edge_on_four).unwrap());
    assert!(g("6:123,456").contains_induced(&one_edge_on_four).unwrap());
    // In the complete graph every 4-subset induces 4 edges.
    assert!(!g("4:123,124,134,234")
        .contains_induced(&one_edge_on_four)
        .unwrap());
    // A complete tripartite graph induces only 0- or 2-edge 4-subsets.
    let tripartite = g("6:135,136,145,146,235,236,245,246");
    assert!(!tripartite.contains_induced(&one_edge_on_four).unwrap());
    assert!(tripartite.contains_induced(&g("4:123,124")).unwrap());
    // Non-induced containment still holds where induced fails.
    assert!(g("4:123,124,134,234").contains_subgraph(&one_edge_on_four));
}

#[test]
fn induced_density_sums_to_one_over_all_classes() {
    // Summing the induced density over every isomorphism class of a fixed
    // order partitions the probability space of a random subset.
    let classes = dedup_isomorphic(&all_labeled(4)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10 {
        let n = rng.gen_range(5..=7);
        let host = ThreeGraph::from_edge_indices(
            n,
            (0..binom(n, 3)).filter(|_| rng.gen_bool(0.5)),
        )
        .unwrap();
        let total: Rational = classes
            .iter()
            .map(|c| host.induced_density(c).unwrap())
            .sum();
        assert_eq!(total, Rational::from(BigInt::from(1)));
    }
}

#[test]
fn blowup_sizes_and_edges() {
    let edge = g("3:123");
    let b = edge.blowup(2).unwrap();
    assert_eq!(b.n(), 6);
    // Edges pick one vertex from each doubled class: 2*2*2.
    assert_eq!(b.edge_count(), 8);
    let k4 = g("4:123,124,134,234");
    let b = k4.blowup_with_sizes(&[2, 1, 1, 1]).unwrap();
    assert_eq!(b.n(), 5);
    // Each original edge multiplies by its class sizes: 4 edges use class 0
    // (count 2 each) except {1,2,3} which stays single... edges:
    // {0,1,2}x2, {0,1,3}x2, {0,2,3}x2, {1,2,3}x1.
    assert_eq!(b.edge_count(), 3 * 2 + 1);
    // A blow-up never identifies vertices within a class into an edge.
    let b = edge.blowup_with_sizes(&[3, 1, 1]).unwrap();
    assert_eq!(b.edge_count(), 3);
    assert!(!b.has_edge(0, 1, 2));
}

#[test]
fn blowup_containment_frozen_cases() {
    let edge = g("3:123");
    let k4_minus = g("4:123,124,134");
    let f5 = g("5:123,124,345");
    let k4 = g("4:123,124,134,234");
    let pentagon = g("5:123,234,345,145,125");

    // Two edges sharing two vertices never fit in a blow-up of one edge.
    assert!(!edge.blowup_contains(&k4_minus));
    assert!(!edge.blowup_contains(&f5));
    // The complete tripartite pattern of any size does.
    assert!(edge.blowup_contains(&g("6:135,136,145,146,235,236,245,246")));
    assert!(k4.blowup_contains(&k4));
    assert!(k4.blowup_contains(&f5));
    assert!(pentagon.blowup_contains(&g("5:123,234,345")));
    assert!(!pentagon.blowup_contains(&k4_minus));
    // Empty patterns always fit; edges never fit in an empty host.
    assert!(g("2:").blowup_contains(&g("4:")));
    assert!(!g("3:").blowup_contains(&edge));
}

#[test]
fn blowup_containment_matches_materialized_blowups() {
    // Oracle: F appears in some blow-up of G iff it appears in the
    // |V(F)|-fold blow-up, which is small enough to materialize here.
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..60 {
        let nf = rng.gen_range(3..=4);
        let ng = rng.gen_range(3..=4);
        let f = ThreeGraph::from_edge_indices(
            nf,
            (0..binom(nf, 3)).filter(|_| rng.gen_bool(0.6)),
        )
        .unwrap();
        let h = ThreeGraph::from_edge_indices(
            ng,
            (0..binom(ng, 3)).filter(|_| rng.gen_bool(0.5)),
        )
        .unwrap();
        let materialized = h.blowup(f.n()).unwrap();
        assert_eq!(
            h.blowup_contains(&f),
            materialized.contains_subgraph(&f),
            "pattern {f:?} host {h:?}"
        );
    }
}

#[test]
fn blowup_monotone_under_bigger_classes() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..40 {
        let nf = rng.gen_range(3..=4);
        let f = ThreeGraph::from_edge_indices(
            nf,
            (0..binom(nf, 3)).filter(|_| rng.gen_bool(0.5)),
        )
        .unwrap();
        let h = ThreeGraph::from_edge_indices(4, (0..4).filter(|_| rng.gen_bool(0.5))).unwrap();
        let small = h.blowup(2).unwrap();
        let large = h.blowup(3).unwrap();
        if small.contains_subgraph(&f) {
            assert!(large.contains_subgraph(&f));
        }
        if h.contains_subgraph(&f) {
            assert!(h.blowup_contains(&f));
        }
    }
}
