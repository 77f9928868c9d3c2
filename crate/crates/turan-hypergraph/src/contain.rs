//! Containment tests: subgraphs, induced subgraphs, and blow-ups.

use itertools::Itertools;
use num_bigint::BigInt;
use turan_field::Rational;

use crate::{binom, CanonicalForm, GraphError, ThreeGraph};

/// Precomputed search order for embedding a pattern graph: vertices by
/// descending degree, and for each position the pattern edges that become
/// fully mapped once that position is assigned.
struct Pattern {
    order: Vec<usize>,
    edges_at: Vec<Vec<[usize; 3]>>,
}

impl Pattern {
    fn new(f: &ThreeGraph) -> Pattern {
        let mut order: Vec<usize> = (0..f.n()).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(f.degree(v)));
        let mut position = vec![0usize; f.n()];
        for (pos, &v) in order.iter().enumerate() {
            position[v] = pos;
        }
        let mut edges_at: Vec<Vec<[usize; 3]>> = vec![Vec::new(); f.n()];
        for e in f.edges() {
            let pos = e.iter().map(|&v| position[v]).max().unwrap();
            edges_at[pos].push(e);
        }
        Pattern { order, edges_at }
    }
}

fn embed(
    pattern: &Pattern,
    g: &ThreeGraph,
    injective: bool,
    image: &mut Vec<usize>,
    used: &mut Vec<bool>,
    pos: usize,
) -> bool {
    if pos == pattern.order.len() {
        return true;
    }
    let v = pattern.order[pos];
    for cand in 0..g.n() {
        if injective && used[cand] {
            continue;
        }
        image[v] = cand;
        let ok = pattern.edges_at[pos].iter().all(|&[x, y, z]| {
            let (a, b, c) = (image[x], image[y], image[z]);
            a != b && b != c && a != c && g.has_edge(a, b, c)
        });
        if ok {
            if injective {
                used[cand] = true;
            }
            if embed(pattern, g, injective, image, used, pos + 1) {
                return true;
            }
            if injective {
                used[cand] = false;
            }
        }
    }
    false
}

impl ThreeGraph {
    /// Whether `f` embeds into `self` by an injective vertex map sending
    /// edges to edges (a not-necessarily-induced copy).
    pub fn contains_subgraph(&self, f: &ThreeGraph) -> bool {
        self.find_subgraph_embedding(f).is_some()
    }

    /// An injective edge-preserving map `V(f) -> V(self)` if one exists,
    /// as `image[v]` for each pattern vertex `v`.
    pub fn find_subgraph_embedding(&self, f: &ThreeGraph) -> Option<Vec<usize>> {
        if f.n() > self.n() {
            return None;
        }
        if f.edge_count() > self.edge_count() {
            return None;
        }
        let pattern = Pattern::new(f);
        let mut image = vec![0usize; f.n()];
        let mut used = vec![false; self.n()];
        if embed(&pattern, self, true, &mut image, &mut used, 0) {
            Some(image)
        } else {
            None
        }
    }

    /// Whether some `|V(f)|`-subset of `self` induces a copy of `f`
    /// (requires `|V(f)|` within canonical-form range).
    pub fn contains_induced(&self, f: &ThreeGraph) -> Result<bool, GraphError> {
        if f.n() > self.n() {
            return Ok(false);
        }
        let target = f.canonical_form()?;
        for verts in (0..self.n()).combinations(f.n()) {
            let sub = self.induced_subgraph(&verts)?;
            if sub.edge_count() == f.edge_count() && sub.canonical_form()? == target {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Exact probability that a uniform random `|V(f)|`-subset of `self`
    /// induces a copy of `f`.
    pub fn induced_density(&self, f: &ThreeGraph) -> Result<Rational, GraphError> {
        if f.n() > self.n() {
            return Ok(Rational::from(BigInt::from(0)));
        }
        let target = f.canonical_form()?;
        let mut hits = 0usize;
        for verts in (0..self.n()).combinations(f.n()) {
            let sub = self.induced_subgraph(&verts)?;
            if sub.edge_count() == f.edge_count() && sub.canonical_form()? == target {
                hits += 1;
            }
        }
        Ok(Rational::new(
            BigInt::from(hits),
            BigInt::from(binom(self.n(), f.n())),
        ))
    }

    /// The blow-up with class sizes `sizes`: vertex class `i` is a block of
    /// `sizes[i]` consecutive vertices, and three vertices form an edge
    /// exactly when they lie in three distinct classes forming an edge.
    pub fn blowup_with_sizes(&self, sizes: &[usize]) -> Result<ThreeGraph, GraphError> {
        if sizes.len() != self.n() {
            return Err(GraphError::InvalidEdge(format!(
                "{} class sizes for a graph of order {}",
                sizes.len(),
                self.n()
            )));
        }
        let total: usize = sizes.iter().sum();
        let mut class = Vec::with_capacity(total);
        for (i, &s) in sizes.iter().enumerate() {
            class.extend(std::iter::repeat(i).take(s));
        }
        let mut g = ThreeGraph::new(total)?;
        for x in 0..total {
            for y in x + 1..total {
                for z in y + 1..total {
                    let (a, b, c) = (class[x], class[y], class[z]);
                    if a != b && b != c && self.has_edge(a, b, c) {
                        g.add_edge(x, y, z)?;
                    }
                }
            }
        }
        Ok(g)
    }

    /// The balanced blow-up with `t` copies of each vertex.
    pub fn blowup(&self, t: usize) -> Result<ThreeGraph, GraphError> {
        self.blowup_with_sizes(&vec![t; self.n()])
    }

    /// Whether `f` appears in some blow-up of `self`; equivalently, whether
    /// there is a (not necessarily injective) map `V(f) -> V(self)` under
    /// which every edge of `f` lands on three distinct vertices forming an
    /// edge of `self`.
    pub fn blowup_contains(&self, f: &ThreeGraph) -> bool {
        if f.n() == 0 {
            return true;
        }
        if self.n() == 0 {
            return false;
        }
        if f.edge_count() > 0 && self.edge_count() == 0 {
            return false;
        }
        let pattern = Pattern::new(f);
        let mut image = vec![0usize; f.n()];
        let mut used = vec![false; self.n()];
        embed(&pattern, self, false, &mut image, &mut used, 0)
    }
}

/// Deduplicates graphs up to isomorphism, preserving first occurrences in
/// canonical-form order.
pub fn dedup_isomorphic(graphs: &[ThreeGraph]) -> Result<Vec<ThreeGraph>, GraphError> {
    let mut seen: Vec<CanonicalForm> = Vec::new();
    for g in graphs {
        seen.push(g.canonical_form()?);
    }
    seen.sort();
    seen.dedup();
    Ok(seen.into_iter().map(|c| c.graph()).collect())
}
