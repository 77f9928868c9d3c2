//! Construction oracles: closed-form edge counts, optimality of balanced
//! classes, freeness from the graphs they are extremal for, and the
//! 6-induced characterization of the partition-defined families.

use itertools::Itertools;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use turan_constructions::{
    build, edge_count_for_sizes, edge_count_formula, graph_for_sizes, is_member, optimal_sizes,
    ConstructionKind,
};
use turan_families::Family;
use turan_hypergraph::ThreeGraph;

#[test]
fn edge_counts_match_closed_forms_up_to_order_30() {
    for kind in ConstructionKind::ALL {
        for n in 3..=30 {
            let c = build(kind, n).unwrap();
            assert_eq!(c.graph.n(), n);
            assert_eq!(
                c.graph.edge_count(),
                edge_count_formula(kind, n),
                "{kind} at order {n}"
            );
        }
    }
}

#[test]
fn built_graphs_match_size_formulas_on_arbitrary_compositions() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for kind in ConstructionKind::ALL {
        for _ in 0..40 {
            let sizes: Vec<usize> = (0..kind.classes()).map(|_| rng.gen_range(0..=5)).collect();
            let g = graph_for_sizes(kind, &sizes).unwrap();
            assert_eq!(
                g.edge_count(),
                edge_count_for_sizes(kind, &sizes),
                "{kind} sizes {sizes:?}"
            );
        }
    }
}

#[test]
fn balanced_classes_are_optimal_over_all_compositions() {
    for kind in ConstructionKind::ALL {
        for n in 3..=30 {
            let best = edge_count_formula(kind, n);
            let max = if kind.classes() == 3 {
                (0..=n)
                    .flat_map(|a| (0..=n - a).map(move |b| [a, b, n - a - b]))
                    .map(|s| edge_count_for_sizes(kind, &s))
                    .max()
                    .unwrap()
            } else {
                (0..=n)
                    .map(|a| edge_count_for_sizes(kind, &[a, n - a]))
                    .max()
                    .unwrap()
            };
            assert_eq!(best, max, "{kind} at order {n}");
        }
    }
}

#[test]
fn frozen_counts_at_order_30() {
    assert_eq!(edge_count_formula(ConstructionKind::S, 30), 1000);
    assert_eq!(edge_count_formula(ConstructionKind::J, 30), 1900);
    assert_eq!(edge_count_formula(ConstructionKind::T, 30), 2350);
    assert_eq!(edge_count_formula(ConstructionKind::B, 30), 3150);
}

#[test]
fn densities_at_order_30_approach_limits() {
    for kind in ConstructionKind::ALL {
        let c = build(kind, 30).unwrap();
        let e = c.graph.edge_count() as f64;
        let total = (30 * 29 * 28 / 6) as f64;
        let (p, q) = kind.limit_density();
        let limit = p as f64 / q as f64;
        let density = e / total;
        assert!(
            (density - limit).abs() < 0.05,
            "{kind}: density {density} vs limit {limit}"
        );
        assert!(density > limit, "finite orders overshoot the limit");
    }
}

fn family(text: &str) -> Family {
    text.parse().unwrap()
}

#[test]
fn tripartite_construction_avoids_its_forbidden_graphs() {
    let s12 = build(ConstructionKind::S, 12).unwrap().graph;
    assert!(family("6:123,124,345,156").is_admissible(&s12).unwrap());
    // Classical 2/9 forbidden pairs.
    assert!(family("4:123,124,134\n5:123,124,345")
        .is_admissible(&s12)
        .unwrap());
}

#[test]
fn colourable_construction_avoids_its_forbidden_graphs() {
    let j12 = build(ConstructionKind::J, 12).unwrap().graph;
    assert!(family("5:123,145,245,345").is_admissible(&j12).unwrap());
    // Both order-6 graphs with density 4/9.
    assert!(family("6:123,124,134,235,245,156\n6:123,124,135,345,146,256")
        .is_admissible(&j12)
        .unwrap());
}

#[test]
fn turan_construction_avoids_its_forbidden_graphs() {
    let t12 = build(ConstructionKind::T, 12).unwrap().graph;
    assert!(family("4:123,124,134,234").is_admissible(&t12).unwrap());
    let twelve = "\
6:123,124,134,125,245,136,346,156
6:123,124,134,125,135,245,345,236,456
6:123,124,134,125,135,245,126,236,146
6:123,124,134,125,135,345,126,236,246
6:123,124,134,125,235,345,126,246,156
6:123,124,134,125,235,136,346,156,356
6:123,124,134,125,135,245,126,136,346,456
6:123,124,134,125,135,345,126,236,146,156
6:123,124,134,125,135,245,126,236,346,356
6:123,124,134,125,135,345,126,236,346,356
6:123,124,134,125,135,146,246,156,256,456
6:123,124,134,125,135,146,246,156,356,456";
    let fam = family(twelve);
    assert_eq!(fam.members().len(), 12);
    assert!(fam.is_admissible(&t12).unwrap());
}

#[test]
fn bipartite_construction_avoids_its_forbidden_graphs() {
    let b12 = build(ConstructionKind::B, 12).unwrap().graph;
    let three = "\
6:123,124,134,234,125,135,235,145,126,136,236,146,256,356
6:123,124,134,234,125,135,235,145,245,126,136,236,146,356,456
6:123,124,134,234,125,135,235,145,245,126,136,146,346,256,356,456";
    let fam = family(three);
    assert_eq!(fam.members().len(), 3);
    assert!(fam.is_admissible(&b12).unwrap());
    // The seven-point plane needs an independent-set-free bipartition.
    assert!(family("7:123,145,356,167,257,347,246")
        .is_admissible(&b12)
        .unwrap());
    // Sanity: B is not complete-graph-free.
    assert!(!family("4:123,124,134,234").is_admissible(&b12).unwrap());
}

#[test]
fn membership_accepts_relabeled_constructions() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for kind in ConstructionKind::ALL {
        for n in 3..=8 {
            let g = build(kind, n).unwrap().graph;
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let h = g.permuted(&perm).unwrap();
            assert!(is_member(kind, &h).unwrap(), "{kind} at order {n}");
        }
        // Unbalanced instances are members too.
        let sizes: Vec<usize> = (0..kind.classes()).map(|i| i + 1).collect();
        let g = graph_for_sizes(kind, &sizes).unwrap();
        assert!(is_member(kind, &g).unwrap());
    }
}

#[test]
fn membership_rejects_non_members() {
    let k4: ThreeGraph = "4:123,124,134,234".parse().unwrap();
    assert!(!is_member(ConstructionKind::S, &k4).unwrap());
    assert!(!is_member(ConstructionKind::J, &k4).unwrap());
    assert!(!is_member(ConstructionKind::T, &k4).unwrap());
    // But the complete graph on 4 vertices is complete bipartite.
    assert!(is_member(ConstructionKind::B, &k4).unwrap());

    let pentagon: ThreeGraph = "5:123,234,345,145,125".parse().unwrap();
    for kind in ConstructionKind::ALL {
        assert!(!is_member(kind, &pentagon).unwrap(), "{kind}");
    }

    // The empty graph is degenerately every kind.
    let empty: ThreeGraph = "4:".parse().unwrap();
    for kind in ConstructionKind::ALL {
        assert!(is_member(kind, &empty).unwrap(), "{kind}");
    }
}

#[test]
fn partition_families_are_6_induced() {
    // Every 6-vertex induced subgraph of a member is a member (the easy
    // containment of the characterization).
    for kind in [ConstructionKind::S, ConstructionKind::J, ConstructionKind::B] {
        let g = build(kind, 9).unwrap().graph;
        for verts in (0..9).combinations(6) {
            let sub = g.induced_subgraph(&verts).unwrap();
            assert!(is_member(kind, &sub).unwrap(), "{kind} subset {verts:?}");
        }

        // Toggling one edge breaks membership, and some 6-subset witnesses
        // the failure, as the 6-induced property demands.
        let mut broken = g.clone();
        let probe = match kind {
            // An in-class pair plus a third vertex is a non-edge of S and J
            // (for J, take the pair inside V1).
            ConstructionKind::S => [0, 1, 3],
            ConstructionKind::J => [7, 8, 0],
            _ => [0, 1, 2],
        };
        if broken.has_edge(probe[0], probe[1], probe[2]) {
            broken.remove_edge(probe[0], probe[1], probe[2]).unwrap();
        } else {
            broken.add_edge(probe[0], probe[1], probe[2]).unwrap();
        }
        assert!(!is_member(kind, &broken).unwrap(), "{kind}");
        let witness = (0..9)
            .combinations(6)
            .any(|verts| !is_member(kind, &broken.induced_subgraph(&verts).unwrap()).unwrap());
        assert!(witness, "{kind}: a 6-vertex witness must exist");
    }
}
