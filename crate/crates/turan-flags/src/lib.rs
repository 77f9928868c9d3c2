//! Flag-algebra machinery for 3-uniform hypergraphs: types, flags, and exact
//! pair-density matrices.
//!
//! A *type* of order `s` is a fully labeled admissible graph on vertices
//! `0..s`; two types are distinct whenever they differ as labeled graphs, with
//! no isomorphism quotient applied to the labels.  Only types that are
//! *realized* — induced on at least one `s`-subset of at least one admissible
//! graph of the host order — are kept; a type that cannot occur would
//! contribute an identically zero constraint block.
//!
//! A *flag* over a type `σ` is a graph of order `m` whose first `s` vertices
//! induce exactly `σ` (as a labeled graph) and which is itself admissible for
//! the family.  Flags are deduplicated up to label-preserving isomorphism,
//! i.e. up to permutations of the `m − s` unlabeled vertices, and listed in
//! ascending order of their stabilized canonical forms.  That order is frozen:
//! downstream matrix blocks and certificates index flags by position in it.
//!
//! For a host graph `H` of order `n = 2m − s`, the pair-density matrix of a
//! type records, for each ordered pair of flags `(a, b)`, the probability that
//! a uniformly random ordered injection of `0..s` into `V(H)` induces `σ` as
//! labeled *and* a uniformly random ordered split of the remaining `n − s`
//! vertices into two halves of size `m − s` induces the flags `a` and `b`.
//! Outcomes whose injection does not induce `σ` contribute zero, so the
//! entries of one matrix sum to the labeled density of `σ` in `H`, which is at
//! most one.  Every entry is an exact rational with denominator dividing
//! `n · (n−1) ⋯ (n−s+1) · C(n−s, m−s)`.
//!
//! Everything here is deterministic: the same family and order produce
//! bit-identical type lists, flag lists, and matrices on every run.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use num_bigint::BigInt;
use turan_families::{enumerate_admissible, Family, FamilyError};
use turan_field::Rational;
use turan_hypergraph::{binom, binom3, CanonicalForm, GraphError, ThreeGraph};

/// Errors from flag enumeration and pair-density computation.
#[derive(Debug, thiserror::Error)]
pub enum FlagError {
    /// Flag contexts are only provided for host orders 5, 6 and 7.
    #[error("flag contexts are only provided for host orders 5, 6 and 7, got {0}")]
    UnsupportedOrder(usize),
    /// Edge density is only defined once a graph has at least 3 vertices.
    #[error("edge density needs at least 3 vertices, got order {0}")]
    OrderTooSmall(usize),
    /// A census entry does not have the order it was declared for.
    #[error("census graph has order {got}, expected {expected}")]
    CensusOrderMismatch { expected: usize, got: usize },
    /// The host order does not match `2m − s` for the flag set.
    #[error(
        "host of order {got} cannot be split over a type of order {type_order} \
         with flags of order {flag_order}; the host order must be \
         2·{flag_order} − {type_order}"
    )]
    ArityMismatch {
        type_order: usize,
        flag_order: usize,
        got: usize,
    },
    /// An induced flag was not found in the flag list; the host graph is not
    /// admissible for the family the flags were enumerated for.
    #[error("induced flag missing from the flag list; host not admissible for this context")]
    MissingFlag,
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A flag-algebra type: a fully labeled admissible graph of order `s`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TypeSigma {
    /// Number of labeled vertices.
    pub s: usize,
    /// Position of this type in the context's global type order.
    pub index: usize,
    /// The labeled graph itself, of order `s`.
    pub graph: ThreeGraph,
}

/// All flags of one type, at the flag order matching the host order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlagSet {
    /// The type the flags extend.
    pub sigma: TypeSigma,
    /// Flag order; every flag has `m` vertices, the first `sigma.s` labeled.
    pub m: usize,
    /// Stabilized-canonical flag representatives, in frozen ascending order.
    pub flags: Vec<ThreeGraph>,
}

impl FlagSet {
    /// Number of flags, i.e. the side length of pair-density matrices.
    pub fn dim(&self) -> usize {
        self.flags.len()
    }
}

/// Types and flags for one family at one host order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FlagContext {
    /// Host order; every pair-density matrix is taken in a host of this order.
    pub n: usize,
    /// One flag set per type, in frozen global type order: type order `s`
    /// ascending, then type edge mask ascending.
    pub sets: Vec<FlagSet>,
}

impl FlagContext {
    /// Number of types.
    pub fn type_count(&self) -> usize {
        self.sets.len()
    }
}

/// The `(s, m)` pairs used at host order `n`: flags of order `m` over types of
/// order `s = 2m − n`, for every `m` with `1 ≤ s < m < n`.
pub fn contexts_for(n: usize) -> Result<Vec<(usize, usize)>, FlagError> {
    if !(5..=7).contains(&n) {
        return Err(FlagError::UnsupportedOrder(n));
    }
    Ok(((n + 1).div_ceil(2)..n).map(|m| (2 * m - n, m)).collect())
}

/// Enumerates all realized types and their flags for `family` at host order
/// `n ∈ {5, 6, 7}`, running the admissible census internally.
pub fn enumerate_types_and_flags(family: &Family, n: usize) -> Result<FlagContext, FlagError> {
    let admissible = enumerate_admissible(family, n)?;
    build_context(family, n, &admissible)
}

/// Like [`enumerate_types_and_flags`], but reuses an already computed census
/// of the admissible graphs of order `n` for `family`.
pub fn build_context(
    family: &Family,
    n: usize,
    admissible: &[ThreeGraph],
) -> Result<FlagContext, FlagError> {
    let pairs = contexts_for(n)?;
    for h in admissible {
        if h.n() != n {
            return Err(FlagError::CensusOrderMismatch {
                expected: n,
                got: h.n(),
            });
        }
    }
    let mut sets = Vec::new();
    for (s, m) in pairs {
        // Isomorphism classes of order s induced somewhere in the census; a
        // labeled type is kept exactly when its class appears here.
        let mut realized: BTreeSet<CanonicalForm> = BTreeSet::new();
        for h in admissible {
            for sub in (0..n).combinations(s) {
                realized.insert(h.induced_subgraph(&sub)?.canonical_form()?);
            }
        }
        let bits = binom3(s);
        for mask in 0u64..(1u64 << bits) {
            let graph =
                ThreeGraph::from_edge_indices(s, (0..bits).filter(|b| mask >> b & 1 == 1))?;
            if !realized.contains(&graph.canonical_form()?) {
                continue;
            }
            let flags = enumerate_flags(family, &graph, m)?;
            let index = sets.len();
            sets.push(FlagSet {
                sigma: TypeSigma {
                    s,
                    index,
                    graph,
                },
                m,
                flags,
            });
        }
    }
    Ok(FlagContext { n, sets })
}

/// All admissible order-`m` extensions of the labeled type `sigma`, one
/// representative per label-preserving isomorphism class, sorted by stabilized
/// canonical form.
fn enumerate_flags(
    family: &Family,
    sigma: &ThreeGraph,
    m: usize,
) -> Result<Vec<ThreeGraph>, FlagError> {
    let s = sigma.n();
    let base: Vec<usize> = sigma.edge_indices().collect();
    let lo = binom3(s);
    let ext_bits = binom3(m) - lo;
    let mut forms: BTreeSet<CanonicalForm> = BTreeSet::new();
    for ext in 0u64..(1u64 << ext_bits) {
        // Triples within the first s vertices have colex ranks below lo, so
        // extending by ranks >= lo never changes the induced type prefix.
        let graph = ThreeGraph::from_edge_indices(
            m,
            base.iter()
                .copied()
                .chain((0..ext_bits).filter(|b| ext >> b & 1 == 1).map(|b| lo + b)),
        )?;
        if !family.is_admissible(&graph)? {
            continue;
        }
        forms.insert(graph.canonical_form_stabilized(s)?);
    }
    Ok(forms.into_iter().map(|c| c.graph()).collect())
}

/// The symmetric matrix of exact pair densities of `set`'s flags in `h`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PairDensities {
    type_index: usize,
    dim: usize,
    counts: Vec<u64>,
    total: u64,
}

impl PairDensities {
    /// Global index of the type the matrix belongs to.
    pub fn type_index(&self) -> usize {
        self.type_index
    }

    /// Side length of the matrix.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Raw outcome count for the ordered flag pair `(a, b)`.
    pub fn count(&self, a: usize, b: usize) -> u64 {
        assert!(a < self.dim && b < self.dim, "flag index out of range");
        self.counts[a * self.dim + b]
    }

    /// Row-major raw counts; entry `(a, b)` sits at `a * dim + b`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Common denominator of all entries: the number of (injection, split)
    /// outcomes.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// The exact entry `(a, b)`, in lowest terms.
    pub fn entry(&self, a: usize, b: usize) -> Rational {
        Rational::new(BigInt::from(self.count(a, b)), BigInt::from(self.total))
    }

    /// Exact sum of all entries: the labeled density of the type in the host.
    pub fn sum(&self) -> Rational {
        let s: u64 = self.counts.iter().sum();
        Rational::new(BigInt::from(s), BigInt::from(self.total))
    }

    /// Whether every entry vanishes, i.e. the type never occurs in the host.
    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }
}

/// Computes the pair-density matrix of `set` in the host `h`.
///
/// The host must have order `2m − s` and be admissible for the family the
/// flags were enumerated for; an inadmissible host surfaces as
/// [`FlagError::MissingFlag`] whenever one of its induced flags fell outside
/// the admissible flag list.
pub fn pair_density_matrix(set: &FlagSet, h: &ThreeGraph) -> Result<PairDensities, FlagError> {
    let s = set.sigma.s;
    let m = set.m;
    let n = h.n();
    if n + s != 2 * m {
        return Err(FlagError::ArityMismatch {
            type_order: s,
            flag_order: m,
            got: n,
        });
    }
    let r = m - s;
    let dim = set.flags.len();
    let mut lookup: HashMap<CanonicalForm, usize> = HashMap::with_capacity(dim);
    for (i, f) in set.flags.iter().enumerate() {
        lookup.insert(f.canonical_form_stabilized(s)?, i);
    }
    let mut counts = vec![0u64; dim * dim];
    let mut buf: Vec<usize> = Vec::with_capacity(m);
    for theta in (0..n).permutations(s) {
        if h.induced_subgraph(&theta)? != set.sigma.graph {
            continue;
        }
        let rest: Vec<usize> = (0..n).filter(|v| !theta.contains(v)).collect();
        for a_half in rest.iter().copied().combinations(r) {
            let b_half: Vec<usize> = rest
                .iter()
                .copied()
                .filter(|v| !a_half.contains(v))
                .collect();
            let a = flag_index(h, &theta, &a_half, s, &lookup, &mut buf)?;
            let b = flag_index(h, &theta, &b_half, s, &lookup, &mut buf)?;
            counts[a * dim + b] += 1;
        }
    }
    let total = falling(n, s) * binom(n - s, r) as u64;
    Ok(PairDensities {
        type_index: set.sigma.index,
        dim,
        counts,
        total,
    })
}

/// Pair-density matrices of every type in the context against one host, in
/// global type order.
pub fn all_pair_densities(
    ctx: &FlagContext,
    h: &ThreeGraph,
) -> Result<Vec<PairDensities>, FlagError> {
    ctx.sets.iter().map(|set| pair_density_matrix(set, h)).collect()
}

/// Index of the flag induced on the labeled injection `theta` extended by the
/// unlabeled half `half`.
fn flag_index(
    h: &ThreeGraph,
    theta: &[usize],
    half: &[usize],
    s: usize,
    lookup: &HashMap<CanonicalForm, usize>,
    buf: &mut Vec<usize>,
) -> Result<usize, FlagError> {
    buf.clear();
    buf.extend_from_slice(theta);
    buf.extend_from_slice(half);
    let key = h.induced_subgraph(buf)?.canonical_form_stabilized(s)?;
    lookup.get(&key).copied().ok_or(FlagError::MissingFlag)
}

/// Exact edge density `e(H) / C(n, 3)` of a graph with at least 3 vertices.
pub fn edge_density(h: &ThreeGraph) -> Result<Rational, FlagError> {
    if h.n() < 3 {
        return Err(FlagError::OrderTooSmall(h.n()));
    }
    Ok(Rational::new(
        BigInt::from(h.edge_count()),
        BigInt::from(binom3(h.n())),
    ))
}

/// `n · (n−1) ⋯ (n−s+1)` as a `u64`.
fn falling(n: usize, s: usize) -> u64 {
    (0..s).map(|i| (n - i) as u64).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family(text: &str) -> Family {
        text.parse().expect("family text")
    }

    fn graph(text: &str) -> ThreeGraph {
        text.parse().expect("graph text")
    }

    #[test]
    fn context_orders() {
        assert_eq!(contexts_for(5).unwrap(), vec![(1, 3), (3, 4)]);
        assert_eq!(contexts_for(6).unwrap(), vec![(2, 4), (4, 5)]);
        assert_eq!(contexts_for(7).unwrap(), vec![(1, 4), (3, 5), (5, 6)]);
        assert!(matches!(
            contexts_for(4),
            Err(FlagError::UnsupportedOrder(4))
        ));
        assert!(matches!(
            contexts_for(8),
            Err(FlagError::UnsupportedOrder(8))
        ));
    }

    #[test]
    fn order_five_shape_for_tetrahedron_family() {
        let fam = family("4:123,124,134,234");
        let ctx = enumerate_types_and_flags(&fam, 5).unwrap();
        assert_eq!(ctx.n, 5);
        // One empty type of order 1, then the two labeled graphs of order 3.
        assert_eq!(ctx.type_count(), 3);
        assert_eq!(ctx.sets[0].sigma.s, 1);
        assert_eq!(ctx.sets[0].m, 3);
        assert_eq!(ctx.sets[1].sigma.s, 3);
        assert_eq!(ctx.sets[1].sigma.graph.edge_count(), 0);
        assert_eq!(ctx.sets[2].sigma.graph.edge_count(), 1);
        // Over the 1-vertex type: the empty and complete order-3 graphs.
        assert_eq!(ctx.sets[0].dim(), 2);
        // Over the empty order-3 type: all 8 extensions (no tetrahedron can
        // appear when the labeled triple is a non-edge); over the triangle
        // type: 8 minus the one completing a tetrahedron.
        assert_eq!(ctx.sets[1].dim(), 8);
        assert_eq!(ctx.sets[2].dim(), 7);
        for set in &ctx.sets {
            assert_eq!(set.sigma.index, ctx.sets[set.sigma.index].sigma.index);
        }
    }

    #[test]
    fn edge_density_gates_and_values() {
        assert!(matches!(
            edge_density(&ThreeGraph::new(2).unwrap()),
            Err(FlagError::OrderTooSmall(2))
        ));
        let s6 = graph("6:135,136,145,146,235,236,245,246");
        assert_eq!(
            edge_density(&s6).unwrap(),
            Rational::new(BigInt::from(2), BigInt::from(5))
        );
        assert_eq!(
            edge_density(&ThreeGraph::new(3).unwrap()).unwrap(),
            Rational::new(BigInt::from(0), BigInt::from(1))
        );
    }

    #[test]
    fn everything_dropped_when_census_is_empty() {
        // The empty order-3 graph is a subgraph of every graph with three or
        // more vertices, so no host of order 6 is admissible and even the
        // empty type of order 2 is unrealized.
        let fam = family("3:");
        let ctx = enumerate_types_and_flags(&fam, 6).unwrap();
        assert_eq!(ctx.type_count(), 0);
    }

    #[test]
    fn census_order_mismatch_is_rejected() {
        let fam = family("4:123,124,134,234");
        let wrong = vec![ThreeGraph::new(5).unwrap()];
        assert!(matches!(
            build_context(&fam, 6, &wrong),
            Err(FlagError::CensusOrderMismatch { expected: 6, got: 5 })
        ));
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        let fam = family("4:123,124,134,234");
        let ctx = enumerate_types_and_flags(&fam, 5).unwrap();
        let h6 = ThreeGraph::new(6).unwrap();
        assert!(matches!(
            pair_density_matrix(&ctx.sets[0], &h6),
            Err(FlagError::ArityMismatch { got: 6, .. })
        ));
    }
}
