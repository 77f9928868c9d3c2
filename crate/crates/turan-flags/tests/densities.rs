//! Frozen flag-context shapes and exact pair-density cross-checks.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::BigInt;
use turan_families::{enumerate_admissible, Family};
use turan_field::Rational;
use turan_flags::{
    all_pair_densities, build_context, enumerate_types_and_flags, pair_density_matrix,
    FlagContext, FlagSet,
};
use turan_hypergraph::{binom, CanonicalForm, ThreeGraph};

fn family(text: &str) -> Family {
    text.parse().expect("family text")
}

fn graph(text: &str) -> ThreeGraph {
    text.parse().expect("graph text")
}

fn tetrahedron_family() -> Family {
    family("4:123,124,134,234")
}

fn rational(n: u64, d: u64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The context for the tetrahedron family at order 6, computed once.
fn tetra_ctx() -> (Family, Vec<ThreeGraph>, FlagContext) {
    let fam = tetrahedron_family();
    let census = enumerate_admissible(&fam, 6).expect("census");
    let ctx = build_context(&fam, 6, &census).expect("context");
    (fam, census, ctx)
}

#[test]
fn tetrahedron_context_shape_at_six() {
    let (_, _, ctx) = tetra_ctx();
    // One type of order 2, all 15 labeled tetrahedron-free graphs of order 4.
    assert_eq!(ctx.type_count(), 16);
    assert_eq!(ctx.sets[0].sigma.s, 2);
    assert_eq!(ctx.sets[0].m, 4);
    // 15 admissible labeled order-4 graphs, orbited by swapping the two
    // unlabeled vertices: that swap exchanges the triples 012 and 013 and
    // fixes the other two, leaving (16 + 8)/2 − 1 = 11 classes.
    assert_eq!(ctx.sets[0].dim(), 11);
    for (i, set) in ctx.sets.iter().enumerate() {
        assert_eq!(set.sigma.index, i);
        if i > 0 {
            assert_eq!(set.sigma.s, 4);
            assert_eq!(set.m, 5);
        }
    }
    // Hand-counted flag totals per type shape: the number of admissible
    // one-vertex extensions depends only on how many labeled edges the type
    // has (any two triples on four vertices share a pair, so each edge count
    // is a single shape).
    let mut by_edges: HashMap<usize, Vec<usize>> = HashMap::new();
    for set in &ctx.sets[1..] {
        by_edges
            .entry(set.sigma.graph.edge_count())
            .or_default()
            .push(set.dim());
    }
    assert_eq!(by_edges[&0], vec![64]);
    assert_eq!(by_edges[&1], vec![56; 4]);
    assert_eq!(by_edges[&2], vec![50; 6]);
    assert_eq!(by_edges[&3], vec![45; 4]);
    assert!(!by_edges.contains_key(&4));
}

#[test]
fn forbidden_family_with_induced_member_type_count() {
    // Forbidding any graph with three edges on four vertices leaves only the
    // labeled order-4 graphs with at most two edges: 1 + 4 + 6 of them.
    let fam = family(
        "4:123,124,134\n\
         6:123,124,345,156\n\
         5:123,124,125,345\n\
         5:123,124,135,245",
    );
    let ctx = enumerate_types_and_flags(&fam, 6).expect("context");
    assert_eq!(ctx.type_count(), 12);
    assert_eq!(ctx.sets[0].sigma.s, 2);
    for set in &ctx.sets[1..] {
        assert!(set.sigma.graph.edge_count() <= 2);
    }
}

#[test]
fn flags_fix_prefix_and_are_deduped() {
    let (fam, _, ctx) = tetra_ctx();
    for set in &ctx.sets {
        let s = set.sigma.s;
        let prefix: Vec<usize> = (0..s).collect();
        let mut previous: Option<CanonicalForm> = None;
        for flag in &set.flags {
            assert_eq!(flag.n(), set.m);
            assert_eq!(
                flag.induced_subgraph(&prefix).unwrap(),
                set.sigma.graph,
                "flag prefix must induce the type exactly"
            );
            assert!(fam.is_admissible(flag).unwrap());
            let form = flag.canonical_form_stabilized(s).unwrap();
            assert_eq!(
                form.graph(),
                *flag,
                "flags are stored as their own stabilized representatives"
            );
            if let Some(prev) = &previous {
                assert!(*prev < form, "flags sorted strictly by stabilized form");
            }
            previous = Some(form);
        }
    }
}

#[test]
fn order_two_flags_match_brute_orbit_count() {
    // Independent count of the flags over the empty order-2 type: group all
    // admissible labeled order-4 graphs by swapping the two unlabeled
    // vertices by hand.
    let fam = tetrahedron_family();
    let mut orbits: Vec<Vec<u64>> = Vec::new();
    for mask in 0u64..16 {
        let g = ThreeGraph::from_edge_indices(4, (0..4).filter(|b| mask >> b & 1 == 1)).unwrap();
        if !fam.is_admissible(&g).unwrap() {
            continue;
        }
        let swapped = g.permuted(&[0, 1, 3, 2]).unwrap();
        let smask: u64 = (0..4).filter(|&b| swapped.has_edge_rank(b)).map(|b| 1 << b).sum();
        if !orbits.iter().any(|o| o.contains(&mask)) {
            orbits.push(vec![mask, smask]);
        }
    }
    let (_, _, ctx) = tetra_ctx();
    assert_eq!(ctx.sets[0].dim(), orbits.len());
    assert_eq!(orbits.len(), 11);
}

#[test]
fn hand_checked_matrices_at_order_five() {
    let fam = tetrahedron_family();
    let ctx = enumerate_types_and_flags(&fam, 5).expect("context");
    let host = graph("5:123");

    // Type of order 1 (one labeled vertex, no edges), flags of order 3: the
    // empty triple and the full triple.  With a single host edge, a half
    // induces the full triple exactly when the labeled vertex and the half
    // make up that edge.
    let p = pair_density_matrix(&ctx.sets[0], &host).unwrap();
    assert_eq!(p.total(), 30);
    assert_eq!(p.count(0, 0), 24);
    assert_eq!(p.count(0, 1), 3);
    assert_eq!(p.count(1, 0), 3);
    assert_eq!(p.count(1, 1), 0);

    // The triangle type of order 3: only injections onto the edge count, and
    // both halves then induce the bare one-edge extension, listed first.
    let triangle_set = &ctx.sets[2];
    assert_eq!(triangle_set.sigma.graph.edge_count(), 1);
    let p = pair_density_matrix(triangle_set, &host).unwrap();
    assert_eq!(p.total(), 120);
    assert_eq!(p.count(0, 0), 12);
    assert_eq!(p.sum(), rational(1, 10));
    let zeros: u64 = (0..p.dim())
        .cartesian_product(0..p.dim())
        .filter(|&(a, b)| (a, b) != (0, 0))
        .map(|(a, b)| p.count(a, b))
        .sum();
    assert_eq!(zeros, 0);
}

#[test]
fn sums_match_type_densities_and_partition_unity() {
    let (_, census, ctx) = tetra_ctx();
    // A mix of census entries, including the first and last.
    let picks = [0usize, 7, 100, 500, census.len() - 1];
    for &i in &picks {
        let host = &census[i];
        let mats = all_pair_densities(&ctx, host).expect("pair densities");
        let mut per_order: HashMap<usize, Rational> = HashMap::new();
        for (set, p) in ctx.sets.iter().zip(&mats) {
            assert_eq!(p.dim(), set.dim());
            let expected_total = match set.sigma.s {
                2 => 180,
                4 => 720,
                _ => unreachable!(),
            };
            assert_eq!(p.total(), expected_total);
            // Exact symmetry.
            for a in 0..p.dim() {
                for b in 0..p.dim() {
                    assert_eq!(p.count(a, b), p.count(b, a));
                }
            }
            // The sum of all entries equals the labeled density of the type,
            // counted here independently with injections alone.
            let s = set.sigma.s;
            let hits = (0..host.n())
                .permutations(s)
                .filter(|theta| host.induced_subgraph(theta).unwrap() == set.sigma.graph)
                .count() as u64;
            let falling: u64 = (0..s).map(|k| (host.n() - k) as u64).product();
            assert_eq!(p.sum(), rational(hits, falling));
            let acc = per_order.entry(s).or_insert_with(|| rational(0, 1));
            *acc += p.sum();
        }
        // Every injection induces exactly one listed type, so the type
        // densities at each order partition unity.
        assert_eq!(per_order[&2], rational(1, 1));
        assert_eq!(per_order[&4], rational(1, 1));
    }
}

#[test]
fn zero_matrix_for_absent_type() {
    let (_, _, ctx) = tetra_ctx();
    // The balanced complete tripartite graph has no four vertices spanning
    // three edges, so every three-edge type is absent.
    let s6 = graph("6:135,136,145,146,235,236,245,246");
    for set in &ctx.sets[1..] {
        if set.sigma.graph.edge_count() == 3 {
            let p = pair_density_matrix(set, &s6).unwrap();
            assert!(p.is_zero());
        }
    }
}

/// Direct pair counts in a larger host: outcomes are an ordered injection of
/// the type followed by two disjoint ordered halves among the remaining
/// vertices.
fn direct_counts(set: &FlagSet, host: &ThreeGraph) -> (Vec<u64>, u64) {
    let s = set.sigma.s;
    let r = set.m - s;
    let n = host.n();
    let dim = set.dim();
    let lookup: HashMap<CanonicalForm, usize> = set
        .flags
        .iter()
        .enumerate()
        .map(|(i, f)| (f.canonical_form_stabilized(s).unwrap(), i))
        .collect();
    let mut counts = vec![0u64; dim * dim];
    let mut total = 0u64;
    for theta in (0..n).permutations(s) {
        let rest: Vec<usize> = (0..n).filter(|v| !theta.contains(v)).collect();
        let sigma_here = host.induced_subgraph(&theta).unwrap() == set.sigma.graph;
        for a_half in rest.iter().copied().combinations(r) {
            let after_a: Vec<usize> = rest
                .iter()
                .copied()
                .filter(|v| !a_half.contains(v))
                .collect();
            for b_half in after_a.iter().copied().combinations(r) {
                total += 1;
                if !sigma_here {
                    continue;
                }
                let mut verts = theta.clone();
                verts.extend_from_slice(&a_half);
                let a = lookup[&host
                    .induced_subgraph(&verts)
                    .unwrap()
                    .canonical_form_stabilized(s)
                    .unwrap()];
                let mut verts = theta.clone();
                verts.extend_from_slice(&b_half);
                let b = lookup[&host
                    .induced_subgraph(&verts)
                    .unwrap()
                    .canonical_form_stabilized(s)
                    .unwrap()];
                counts[a * dim + b] += 1;
            }
        }
    }
    (counts, total)
}

#[test]
fn decomposition_identity_over_order_seven_hosts() {
    use turan_constructions::{graph_for_sizes, ConstructionKind};

    let (fam, census, ctx) = tetra_ctx();
    let index: HashMap<CanonicalForm, usize> = census
        .iter()
        .enumerate()
        .map(|(i, h)| (h.canonical_form().unwrap(), i))
        .collect();
    let hosts = [
        graph_for_sizes(ConstructionKind::S, &[3, 2, 2]).expect("tripartite host"),
        graph_for_sizes(ConstructionKind::J, &[4, 3]).expect("two-class host"),
    ];
    for host in &hosts {
        assert!(fam.is_admissible(host).unwrap());
        // Matrices of every induced order-6 subgraph, via the census
        // representative of its isomorphism class; counts must agree with the
        // directly computed subgraph matrices (label invariance) and their sum
        // must reproduce the direct order-7 count (the averaging identity).
        for set in &ctx.sets {
            let (direct, direct_total) = direct_counts(set, host);
            let dim = set.dim();
            let mut summed = vec![0u64; dim * dim];
            let mut summed_total = 0u64;
            for u in (0..host.n()).combinations(6) {
                let sub = host.induced_subgraph(&u).unwrap();
                let rep = &census[index[&sub.canonical_form().unwrap()]];
                let via_rep = pair_density_matrix(set, rep).unwrap();
                let via_sub = pair_density_matrix(set, &sub).unwrap();
                assert_eq!(via_rep, via_sub, "pair counts are label-invariant");
                for (acc, c) in summed.iter_mut().zip(via_sub.counts()) {
                    *acc += c;
                }
                summed_total += via_sub.total();
            }
            assert_eq!(direct_total, summed_total);
            assert_eq!(direct, summed, "order-7 counts decompose over order-6 classes");
        }
    }
}

#[test]
fn realizability_in_both_directions() {
    for text in ["4:123,124,134,234", "!4:123"] {
        let fam = family(text);
        let census = enumerate_admissible(&fam, 6).expect("census");
        let ctx = build_context(&fam, 6, &census).expect("context");
        for (s, _) in [(2usize, 4usize), (4, 5)] {
            let realized: Vec<CanonicalForm> = census
                .iter()
                .flat_map(|h| {
                    (0..6).combinations(s).map(move |sub| {
                        h.induced_subgraph(&sub).unwrap().canonical_form().unwrap()
                    })
                })
                .collect();
            let bits = turan_hypergraph::binom3(s);
            for mask in 0u64..(1u64 << bits) {
                let g = ThreeGraph::from_edge_indices(s, (0..bits).filter(|b| mask >> b & 1 == 1))
                    .unwrap();
                let listed = ctx
                    .sets
                    .iter()
                    .any(|set| set.sigma.s == s && set.sigma.graph == g);
                let occurs = realized.contains(&g.canonical_form().unwrap());
                assert_eq!(
                    listed,
                    occurs,
                    "type listed iff realized in the census ({text}, s = {s}, mask {mask})"
                );
                if listed {
                    assert!(fam.is_admissible(&g).unwrap());
                }
            }
        }
    }
}

#[test]
fn deterministic_rebuild() {
    let fam = tetrahedron_family();
    let a = enumerate_types_and_flags(&fam, 6).expect("first");
    let b = enumerate_types_and_flags(&fam, 6).expect("second");
    assert_eq!(a, b);
    let host = graph("6:123,145,246,356");
    assert_eq!(
        all_pair_densities(&a, &host).unwrap(),
        all_pair_densities(&b, &host).unwrap()
    );
}

#[test]
fn denominators_divide_the_outcome_count() {
    let (_, census, ctx) = tetra_ctx();
    let host = &census[42];
    for set in &ctx.sets {
        let p = pair_density_matrix(set, host).unwrap();
        let r = set.m - set.sigma.s;
        let falling: u64 = (0..set.sigma.s).map(|k| (6 - k) as u64).product();
        assert_eq!(p.total(), falling * binom(6 - set.sigma.s, r) as u64);
        for a in 0..p.dim() {
            for b in 0..p.dim() {
                let e = p.entry(a, b);
                assert!(e >= rational(0, 1) && e <= rational(1, 1));
            }
        }
    }
}
