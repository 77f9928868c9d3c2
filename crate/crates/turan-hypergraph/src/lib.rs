//! 3-uniform hypergraphs on labeled vertices `0..n`.
//!
//! A [`ThreeGraph`] stores its edge set as a bitmask over all `C(n,3)`
//! vertex triples in colexicographic order, which makes isomorphism-class
//! representatives canonical (the minimum mask over all relabelings) and
//! keeps subgraph tests allocation-free in the inner loops.
//!
//! The text format is `n:e1,e2,...` where each edge is three vertex labels
//! (`1`-`9` for vertices 0-8, then `a`-`z` for vertices 9-34):
//!
//! ```
//! use turan_hypergraph::ThreeGraph;
//!
//! let g: ThreeGraph = "4:123,124,134".parse().unwrap();
//! assert_eq!(g.edge_count(), 3);
//! assert_eq!(g.to_text().unwrap(), "4:123,124,134");
//! ```

mod canon;
mod contain;

pub use canon::{for_each_permutation, CanonicalForm};
pub use contain::dedup_isomorphic;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;
use turan_field::Rational;

/// Hard cap on vertex count, chosen so edge bitmasks stay small
/// (`C(200,3)` bits is about 160 KiB).
pub const MAX_VERTICES: usize = 200;

/// Largest order for which the text format has vertex labels.
pub const MAX_TEXT_VERTICES: usize = 35;

/// Largest order for which canonical forms are computed (by exhausting all
/// `n!` relabelings).
pub const MAX_CANONICAL_VERTICES: usize = 9;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("graph order {n} exceeds the maximum of {max}")]
    TooManyVertices { n: usize, max: usize },
    #[error("vertex {v} out of range for graph order {n}")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("invalid edge: {0}")]
    InvalidEdge(String),
    #[error("canonical forms require order <= {max}, got {n}")]
    CanonicalTooLarge { n: usize, max: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

/// Binomial coefficient `C(n, k)` as a `usize` (panics on overflow).
pub fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut num: u128 = 1;
    for i in 0..k {
        num = num * (n - i) as u128 / (i + 1) as u128;
    }
    usize::try_from(num).expect("binomial coefficient overflows usize")
}

#[inline]
fn binom2(j: usize) -> usize {
    j * j.saturating_sub(1) / 2
}

/// Binomial coefficient `C(k, 3)`: the number of triples on `k` vertices.
#[inline]
pub fn binom3(k: usize) -> usize {
    if k < 3 {
        0
    } else {
        k * (k - 1) * (k - 2) / 6
    }
}

/// Colexicographic rank of the triple `{i, j, k}` with `i < j < k`.
///
/// Triples on the first `v` vertices occupy exactly the ranks
/// `0..C(v,3)`, so extending a graph by a fresh vertex only appends bits.
#[inline]
pub fn triple_index(i: usize, j: usize, k: usize) -> usize {
    debug_assert!(i < j && j < k);
    binom3(k) + binom2(j) + i
}

/// Inverse of [`triple_index`].
pub fn triple_from_index(t: usize) -> [usize; 3] {
    let mut k = 2;
    while binom3(k + 1) <= t {
        k += 1;
    }
    let r = t - binom3(k);
    let mut j = 1;
    while binom2(j + 1) <= r {
        j += 1;
    }
    let i = r - binom2(j);
    [i, j, k]
}

#[inline]
pub(crate) fn sort3(mut e: [usize; 3]) -> [usize; 3] {
    if e[0] > e[1] {
        e.swap(0, 1);
    }
    if e[1] > e[2] {
        e.swap(1, 2);
    }
    if e[0] > e[1] {
        e.swap(0, 1);
    }
    e
}

/// Compares two equal-length little-endian word masks as integers.
pub(crate) fn cmp_masks(a: &[u64], b: &[u64]) -> Ordering {
    debug_assert_eq!(a.len(), b.len());
    for (wa, wb) in a.iter().rev().zip(b.iter().rev()) {
        match wa.cmp(wb) {
            Ordering::Equal => {}
            ord => return ord,
        }
    }
    Ordering::Equal
}

/// A 3-uniform hypergraph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ThreeGraph {
    pub(crate) n: usize,
    /// Little-endian bitmask over colex triple ranks.
    pub(crate) mask: Vec<u64>,
}

impl ThreeGraph {
    /// The empty graph on `n` vertices.
    pub fn new(n: usize) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices {
                n,
                max: MAX_VERTICES,
            });
        }
        let words = binom3(n).div_ceil(64);
        Ok(ThreeGraph {
            n,
            mask: vec![0; words],
        })
    }

    pub fn from_edges(n: usize, edges: &[[usize; 3]]) -> Result<Self, GraphError> {
        let mut g = ThreeGraph::new(n)?;
        for &[i, j, k] in edges {
            g.add_edge(i, j, k)?;
        }
        Ok(g)
    }

    /// Builds a graph from colex edge ranks.
    pub fn from_edge_indices(
        n: usize,
        indices: impl IntoIterator<Item = usize>,
    ) -> Result<Self, GraphError> {
        let mut g = ThreeGraph::new(n)?;
        let cap = g.triple_count();
        for t in indices {
            if t >= cap {
                return Err(GraphError::InvalidEdge(format!(
                    "triple rank {t} out of range for order {n}"
                )));
            }
            g.mask[t / 64] |= 1 << (t % 64);
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn triple_count(&self) -> usize {
        binom3(self.n)
    }

    pub fn edge_count(&self) -> usize {
        self.mask.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn mask_words(&self) -> &[u64] {
        &self.mask
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            Err(GraphError::VertexOutOfRange { v, n: self.n })
        } else {
            Ok(())
        }
    }

    fn check_edge(&self, i: usize, j: usize, k: usize) -> Result<usize, GraphError> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        self.check_vertex(k)?;
        if i == j || j == k || i == k {
            return Err(GraphError::InvalidEdge(format!(
                "vertices {{{i}, {j}, {k}}} are not distinct"
            )));
        }
        let [a, b, c] = sort3([i, j, k]);
        Ok(triple_index(a, b, c))
    }

    pub fn add_edge(&mut self, i: usize, j: usize, k: usize) -> Result<(), GraphError> {
        let t = self.check_edge(i, j, k)?;
        self.mask[t / 64] |= 1 << (t % 64);
        Ok(())
    }

    pub fn remove_edge(&mut self, i: usize, j: usize, k: usize) -> Result<(), GraphError> {
        let t = self.check_edge(i, j, k)?;
        self.mask[t / 64] &= !(1 << (t % 64));
        Ok(())
    }

    /// Whether `{i, j, k}` is an edge; `false` if the vertices are not
    /// distinct or out of range.
    pub fn has_edge(&self, i: usize, j: usize, k: usize) -> bool {
        match self.check_edge(i, j, k) {
            Ok(t) => self.mask[t / 64] >> (t % 64) & 1 == 1,
            Err(_) => false,
        }
    }

    /// Whether the triple with the given colex rank is an edge.
    #[inline]
    pub fn has_edge_rank(&self, t: usize) -> bool {
        self.mask[t / 64] >> (t % 64) & 1 == 1
    }

    /// Colex ranks of all edges, ascending.
    pub fn edge_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(w * 64 + b)
                }
            })
        })
    }

    /// All edges as sorted triples, in colex order.
    pub fn edges(&self) -> Vec<[usize; 3]> {
        self.edge_indices().map(triple_from_index).collect()
    }

    /// Number of edges containing `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.edges().iter().filter(|e| e.contains(&v)).count()
    }

    /// The graph with the same vertices and complemented edge set.
    pub fn complement(&self) -> ThreeGraph {
        let mut g = self.clone();
        let total = self.triple_count();
        for (w, word) in g.mask.iter_mut().enumerate() {
            let hi = (total - w * 64).min(64);
            let full = if hi == 64 { u64::MAX } else { (1u64 << hi) - 1 };
            *word = !*word & full;
        }
        g
    }

    /// Appends an isolated vertex; existing edge bits are unchanged
    /// because colex ranks of old triples do not involve the new vertex.
    pub fn with_added_vertex(&self) -> Result<ThreeGraph, GraphError> {
        let mut g = ThreeGraph::new(self.n + 1)?;
        g.mask[..self.mask.len()].copy_from_slice(&self.mask);
        Ok(g)
    }

    /// Exact edge density `|E| / C(n,3)`.
    pub fn edge_density(&self) -> Rational {
        Rational::new(
            BigInt::from(self.edge_count()),
            BigInt::from(self.triple_count().max(1)),
        )
    }

    /// The subgraph induced on `verts`, with vertex `i` of the result
    /// standing for `verts[i]`.
    pub fn induced_subgraph(&self, verts: &[usize]) -> Result<ThreeGraph, GraphError> {
        for &v in verts {
            self.check_vertex(v)?;
        }
        for (a, &v) in verts.iter().enumerate() {
            if verts[..a].contains(&v) {
                return Err(GraphError::InvalidEdge(format!("repeated vertex {v}")));
            }
        }
        let mut g = ThreeGraph::new(verts.len())?;
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                for k in j + 1..verts.len() {
                    if self.has_edge(verts[i], verts[j], verts[k]) {
                        g.add_edge(i, j, k)?;
                    }
                }
            }
        }
        Ok(g)
    }

    /// Whether every pair of distinct vertices lies in at least one edge.
    pub fn is_covering(&self) -> bool {
        let mut covered = vec![false; binom2(self.n)];
        for [i, j, k] in self.edges() {
            covered[binom2(j) + i] = true;
            covered[binom2(k) + i] = true;
            covered[binom2(k) + j] = true;
        }
        covered.iter().all(|&c| c)
    }

    /// Serializes to `n:e1,e2,...`; fails if the order exceeds the label
    /// alphabet.
    pub fn to_text(&self) -> Result<String, GraphError> {
        if self.n > MAX_TEXT_VERTICES {
            return Err(GraphError::TooManyVertices {
                n: self.n,
                max: MAX_TEXT_VERTICES,
            });
        }
        let mut s = format!("{}:", self.n);
        let mut first = true;
        for e in self.edges() {
            if !first {
                s.push(',');
            }
            first = false;
            for v in e {
                s.push(vertex_label(v));
            }
        }
        Ok(s)
    }
}

fn vertex_label(v: usize) -> char {
    debug_assert!(v < MAX_TEXT_VERTICES);
    if v < 9 {
        (b'1' + v as u8) as char
    } else {
        (b'a' + (v - 9) as u8) as char
    }
}

fn label_vertex(c: char) -> Option<usize> {
    match c {
        '1'..='9' => Some(c as usize - '1' as usize),
        'a'..='z' => Some(c as usize - 'a' as usize + 9),
        _ => None,
    }
}

impl fmt::Display for ThreeGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_text() {
            Ok(s) => f.write_str(&s),
            Err(_) => Err(fmt::Error),
        }
    }
}

impl fmt::Debug for ThreeGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_text() {
            Ok(s) => write!(f, "ThreeGraph({s})"),
            Err(_) => write!(f, "ThreeGraph(n={}, {} edges)", self.n, self.edge_count()),
        }
    }
}

impl FromStr for ThreeGraph {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (head, tail) = s
            .split_once(':')
            .ok_or_else(|| GraphError::Parse(format!("missing ':' in {s:?}")))?;
        let n: usize = head
            .parse()
            .map_err(|_| GraphError::Parse(format!("invalid vertex count {head:?}")))?;
        if n > MAX_TEXT_VERTICES {
            return Err(GraphError::TooManyVertices {
                n,
                max: MAX_TEXT_VERTICES,
            });
        }
        let mut g = ThreeGraph::new(n)?;
        if tail.is_empty() {
            return Ok(g);
        }
        for part in tail.split(',') {
            let labels: Vec<char> = part.chars().collect();
            if labels.len() != 3 {
                return Err(GraphError::Parse(format!(
                    "edge {part:?} must have exactly three vertex labels"
                )));
            }
            let mut e = [0usize; 3];
            for (slot, &c) in e.iter_mut().zip(&labels) {
                *slot = label_vertex(c)
                    .ok_or_else(|| GraphError::Parse(format!("invalid vertex label {c:?}")))?;
            }
            g.add_edge(e[0], e[1], e[2])
                .map_err(|err| GraphError::Parse(format!("edge {part:?}: {err}")))?;
        }
        Ok(g)
    }
}

/// Deterministic total order: by order, then by mask value.
impl Ord for ThreeGraph {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| cmp_masks(&self.mask, &other.mask))
    }
}

impl PartialOrd for ThreeGraph {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_index_round_trip() {
        let mut seen = vec![false; binom3(9)];
        for k in 2..9 {
            for j in 1..k {
                for i in 0..j {
                    let t = triple_index(i, j, k);
                    assert!(!seen[t], "rank {t} hit twice");
                    seen[t] = true;
                    assert_eq!(triple_from_index(t), [i, j, k]);
                }
            }
        }
        assert!(seen.iter().all(|&s| s), "colex ranks must be a bijection");
    }

    #[test]
    fn colex_prefix_property() {
        // Every triple inside the first v vertices ranks below C(v,3).
        for v in 3..=9 {
            for k in 2..v {
                for j in 1..k {
                    for i in 0..j {
                        assert!(triple_index(i, j, k) < binom3(v));
                    }
                }
            }
        }
    }

    #[test]
    fn text_round_trip() {
        for text in [
            "4:123,124,134,234",
            "5:123,124,345",
            "6:123,124,345,156",
            "7:123,145,356,167,257,347,246",
            "6:",
            "1:",
            "12:123,12c",
        ] {
            let g: ThreeGraph = text.parse().unwrap();
            // Edges re-serialize in colex order regardless of input order.
            let h: ThreeGraph = g.to_text().unwrap().parse().unwrap();
            assert_eq!(g, h);
        }
        assert_eq!(
            "4:321,421,431,432".parse::<ThreeGraph>().unwrap().to_text().unwrap(),
            "4:123,124,134,234"
        );
    }

    #[test]
    fn parse_rejects_malformed() {
        for text in [
            "",
            "4",
            "4:12",
            "4:1234",
            "4:125",  // vertex out of range
            "4:112",  // repeated vertex
            "4:123,",
            "4:123 124",
            "x:123",
            "40:123", // beyond the label alphabet
        ] {
            assert!(text.parse::<ThreeGraph>().is_err(), "accepted {text:?}");
        }
    }

    #[test]
    fn edge_bookkeeping() {
        let mut g = ThreeGraph::new(5).unwrap();
        g.add_edge(2, 0, 1).unwrap();
        g.add_edge(0, 3, 4).unwrap();
        assert!(g.has_edge(1, 0, 2));
        assert!(!g.has_edge(0, 1, 3));
        assert!(!g.has_edge(1, 1, 2));
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edges(), vec![[0, 1, 2], [0, 3, 4]]);
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.degree(1), 1);
        g.remove_edge(0, 1, 2).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(g.add_edge(0, 1, 5).is_err());
    }

    #[test]
    fn complement_and_density() {
        let k4: ThreeGraph = "4:123,124,134,234".parse().unwrap();
        assert_eq!(k4.complement().edge_count(), 0);
        assert_eq!(k4.edge_density(), Rational::from(BigInt::from(1)));
        let f5: ThreeGraph = "5:123,124,345".parse().unwrap();
        assert_eq!(
            f5.edge_density(),
            Rational::new(BigInt::from(3), BigInt::from(10))
        );
        assert_eq!(f5.complement().edge_count(), 7);
    }

    #[test]
    fn added_vertex_preserves_edges() {
        let f5: ThreeGraph = "5:123,124,345".parse().unwrap();
        let g = f5.with_added_vertex().unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.edges(), f5.edges());
    }

    #[test]
    fn covering_pairs() {
        assert!("4:123,124,134,234".parse::<ThreeGraph>().unwrap().is_covering());
        assert!(!"5:123,124,345".parse::<ThreeGraph>().unwrap().is_covering());
        // The seven-point plane covers every pair exactly once.
        assert!("7:123,145,356,167,257,347,246"
            .parse::<ThreeGraph>()
            .unwrap()
            .is_covering());
    }

    #[test]
    fn induced_subgraph_relabels() {
        let g: ThreeGraph = "6:123,124,345,156".parse().unwrap();
        let h = g.induced_subgraph(&[0, 1, 2, 3]).unwrap();
        assert_eq!(h.to_text().unwrap(), "4:123,124");
        let h = g.induced_subgraph(&[4, 0, 5]).unwrap();
        // {0,4,5} is an edge of g; under the listed order it is {1,0,2}.
        assert_eq!(h.edge_count(), 1);
        assert!(g.induced_subgraph(&[0, 0, 1]).is_err());
        assert!(g.induced_subgraph(&[0, 1, 6]).is_err());
    }
}
