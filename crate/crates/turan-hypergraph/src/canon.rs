//! Canonical forms under vertex relabeling.
//!
//! The canonical form of a graph is the minimum edge bitmask (read as an
//! integer) over all `n!` relabelings. Per-permutation triple-rank remap
//! tables are cached for orders up to 7; larger orders recompute the
//! relabeled ranks on the fly from the edge list.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::{cmp_masks, sort3, triple_from_index, triple_index, GraphError, ThreeGraph};
use crate::MAX_CANONICAL_VERTICES;

/// Calls `visit` with every permutation of `0..n` exactly once
/// (Heap's algorithm; the identity comes first, the rest in a fixed order).
pub fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut a: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    visit(&a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            visit(&a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// For each permutation of `0..n`, the map from old triple rank to new.
struct RemapTables {
    tables: Vec<Vec<u16>>,
}

fn build_tables(n: usize) -> RemapTables {
    let count = crate::binom(n, 3);
    let mut tables = Vec::new();
    for_each_permutation(n, |perm| {
        let mut table = vec![0u16; count];
        for (t, slot) in table.iter_mut().enumerate() {
            let [i, j, k] = triple_from_index(t);
            let [a, b, c] = sort3([perm[i], perm[j], perm[k]]);
            *slot = triple_index(a, b, c) as u16;
        }
        tables.push(table);
    });
    RemapTables { tables }
}

fn cached_tables(n: usize) -> Arc<RemapTables> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<RemapTables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(build_tables(n)))
        .clone()
}

/// An isomorphism-class representative: order plus minimal edge mask.
///
/// The derived equality and the explicit order are total and deterministic,
/// so sorting canonical forms yields a stable enumeration order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CanonicalForm {
    n: usize,
    mask: Vec<u64>,
}

impl CanonicalForm {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask_words(&self) -> &[u64] {
        &self.mask
    }

    /// The canonical representative as a graph.
    pub fn graph(&self) -> ThreeGraph {
        ThreeGraph {
            n: self.n,
            mask: self.mask.clone(),
        }
    }
}

impl Ord for CanonicalForm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| cmp_masks(&self.mask, &other.mask))
    }
}

impl PartialOrd for CanonicalForm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl ThreeGraph {
    /// The graph relabeled by `perm`: edge `{i,j,k}` becomes
    /// `{perm[i], perm[j], perm[k]}`.
    pub fn permuted(&self, perm: &[usize]) -> Result<ThreeGraph, GraphError> {
        if perm.len() != self.n {
            return Err(GraphError::InvalidEdge(format!(
                "permutation length {} does not match order {}",
                perm.len(),
                self.n
            )));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n {
                return Err(GraphError::VertexOutOfRange { v: p, n: self.n });
            }
            if seen[p] {
                return Err(GraphError::InvalidEdge(format!(
                    "permutation repeats vertex {p}"
                )));
            }
            seen[p] = true;
        }
        let mut g = ThreeGraph::new(self.n)?;
        for t in self.edge_indices() {
            let [i, j, k] = triple_from_index(t);
            let [a, b, c] = sort3([perm[i], perm[j], perm[k]]);
            let u = triple_index(a, b, c);
            g.mask[u / 64] |= 1 << (u % 64);
        }
        Ok(g)
    }

    /// Minimum mask over all relabelings fixing the vertices `0..fixed`
    /// pointwise. `fixed = 0` gives the plain canonical form.
    pub fn canonical_form_stabilized(&self, fixed: usize) -> Result<CanonicalForm, GraphError> {
        if self.n > MAX_CANONICAL_VERTICES {
            return Err(GraphError::CanonicalTooLarge {
                n: self.n,
                max: MAX_CANONICAL_VERTICES,
            });
        }
        if fixed > self.n {
            return Err(GraphError::VertexOutOfRange {
                v: fixed,
                n: self.n,
            });
        }
        if fixed == 0 {
            return Ok(self.canonical_form_full());
        }
        let edges: Vec<[usize; 3]> = self.edges();
        let mut best: Option<Vec<u64>> = None;
        let mut perm: Vec<usize> = (0..self.n).collect();
        for_each_permutation(self.n - fixed, |tail| {
            for (offset, &t) in tail.iter().enumerate() {
                perm[fixed + offset] = fixed + t;
            }
            let mut mask = vec![0u64; self.mask.len()];
            for &[i, j, k] in &edges {
                let [a, b, c] = sort3([perm[i], perm[j], perm[k]]);
                let u = triple_index(a, b, c);
                mask[u / 64] |= 1 << (u % 64);
            }
            if best
                .as_ref()
                .map_or(true, |b| cmp_masks(&mask, b) == Ordering::Less)
            {
                best = Some(mask);
            }
        });
        Ok(CanonicalForm {
            n: self.n,
            mask: best.expect("at least the identity permutation is visited"),
        })
    }

    fn canonical_form_full(&self) -> CanonicalForm {
        if self.n <= 7 {
            let tables = cached_tables(self.n);
            let ranks: Vec<u16> = self.edge_indices().map(|t| t as u16).collect();
            let mut best: Option<Vec<u64>> = None;
            for table in &tables.tables {
                let mut mask = vec![0u64; self.mask.len()];
                for &t in &ranks {
                    let u = table[t as usize] as usize;
                    mask[u / 64] |= 1 << (u % 64);
                }
                if best
                    .as_ref()
                    .map_or(true, |b| cmp_masks(&mask, b) == Ordering::Less)
                {
                    best = Some(mask);
                }
            }
            CanonicalForm {
                n: self.n,
                mask: best.expect("permutation list is nonempty"),
            }
        } else {
            // Orders 8 and 9: too many permutations to cache tables for;
            // remap the edge list directly.
            let edges = self.edges();
            let mut best: Option<Vec<u64>> = None;
            for_each_permutation(self.n, |perm| {
                let mut mask = vec![0u64; self.mask.len()];
                for &[i, j, k] in &edges {
                    let [a, b, c] = sort3([perm[i], perm[j], perm[k]]);
                    let u = triple_index(a, b, c);
                    mask[u / 64] |= 1 << (u % 64);
                }
                if best
                    .as_ref()
                    .map_or(true, |b| cmp_masks(&mask, b) == Ordering::Less)
                {
                    best = Some(mask);
                }
            });
            CanonicalForm {
                n: self.n,
                mask: best.expect("permutation list is nonempty"),
            }
        }
    }

    /// The canonical form of this graph (order at most
    /// [`MAX_CANONICAL_VERTICES`]).
    pub fn canonical_form(&self) -> Result<CanonicalForm, GraphError> {
        self.canonical_form_stabilized(0)
    }

    /// Whether two graphs are related by a relabeling.
    pub fn is_isomorphic_to(&self, other: &ThreeGraph) -> Result<bool, GraphError> {
        if self.n != other.n {
            return Ok(false);
        }
        if self.edge_count() != other.edge_count() {
            return Ok(false);
        }
        Ok(self.canonical_form()? == other.canonical_form()?)
    }
}
