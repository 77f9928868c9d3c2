//! The four extremal constructions whose blow-up densities the certificates
//! match: the complete tripartite graph `S_n` (density 2/9), the complete
//! (2,1)-colourable graph `J_n` (4/9), the Turán graph `T_n` (5/9), and the
//! complete bipartite graph `B_n` (3/4).
//!
//! Each is determined by a partition of the vertices into classes:
//!
//! * `S(V0,V1,V2)`: edges are the triples meeting each class exactly once;
//! * `J(V0,V1)`: edges are the triples with two vertices in `V0` and one in
//!   `V1`;
//! * `T(V0,V1,V2)`: the triples meeting each class once, plus those with two
//!   vertices in `V_i` and one in `V_{i+1}` (indices mod 3);
//! * `B(V0,V1)`: all triples meeting both classes.
//!
//! `build` picks the edge-maximizing class sizes; `is_member` decides whether
//! a labeled graph equals a construction under *some* partition, with class
//! sizes unrestricted.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;
use turan_hypergraph::{binom, GraphError, ThreeGraph};

#[derive(Debug, Error, PartialEq)]
pub enum ConstructionError {
    #[error("unknown construction kind {0:?} (expected S, J, T, or B)")]
    UnknownKind(String),
    #[error("membership search supports order <= {max} for kind {kind}, got {n}")]
    MembershipTooLarge {
        kind: ConstructionKind,
        n: usize,
        max: usize,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstructionKind {
    /// Complete tripartite.
    S,
    /// Complete (2,1)-colourable.
    J,
    /// Turán's construction.
    T,
    /// Complete bipartite.
    B,
}

impl ConstructionKind {
    pub const ALL: [ConstructionKind; 4] = [
        ConstructionKind::S,
        ConstructionKind::J,
        ConstructionKind::T,
        ConstructionKind::B,
    ];

    pub fn classes(self) -> usize {
        match self {
            ConstructionKind::S | ConstructionKind::T => 3,
            ConstructionKind::J | ConstructionKind::B => 2,
        }
    }

    /// The limiting edge density of the optimal construction.
    pub fn limit_density(self) -> (u64, u64) {
        match self {
            ConstructionKind::S => (2, 9),
            ConstructionKind::J => (4, 9),
            ConstructionKind::T => (5, 9),
            ConstructionKind::B => (3, 4),
        }
    }
}

impl fmt::Display for ConstructionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            ConstructionKind::S => 'S',
            ConstructionKind::J => 'J',
            ConstructionKind::T => 'T',
            ConstructionKind::B => 'B',
        };
        write!(f, "{c}")
    }
}

impl FromStr for ConstructionKind {
    type Err = ConstructionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "S" => Ok(ConstructionKind::S),
            "J" => Ok(ConstructionKind::J),
            "T" => Ok(ConstructionKind::T),
            "B" => Ok(ConstructionKind::B),
            other => Err(ConstructionError::UnknownKind(other.to_string())),
        }
    }
}

/// Whether three vertices with the given class labels form an edge.
fn is_edge(kind: ConstructionKind, a: usize, b: usize, c: usize) -> bool {
    match kind {
        ConstructionKind::S => a != b && b != c && a != c,
        ConstructionKind::J => {
            let zeros = (a == 0) as usize + (b == 0) as usize + (c == 0) as usize;
            zeros == 2
        }
        ConstructionKind::T => {
            if a != b && b != c && a != c {
                return true;
            }
            // Two in one class, one in the next (cyclically).
            let (pair, single) = if a == b {
                (a, c)
            } else if a == c {
                (a, b)
            } else if b == c {
                (b, a)
            } else {
                unreachable!()
            };
            pair != single && (pair + 1) % 3 == single
        }
        ConstructionKind::B => !(a == b && b == c),
    }
}

/// The construction on consecutive class blocks of the given sizes
/// (class 0 first).
pub fn graph_for_sizes(
    kind: ConstructionKind,
    sizes: &[usize],
) -> Result<ThreeGraph, ConstructionError> {
    assert_eq!(sizes.len(), kind.classes(), "wrong number of classes");
    let n: usize = sizes.iter().sum();
    let mut class = Vec::with_capacity(n);
    for (i, &s) in sizes.iter().enumerate() {
        class.extend(std::iter::repeat(i).take(s));
    }
    let mut g = ThreeGraph::new(n)?;
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                if is_edge(kind, class[x], class[y], class[z]) {
                    g.add_edge(x, y, z)?;
                }
            }
        }
    }
    Ok(g)
}

/// Closed-form edge count of the construction on classes of the given sizes.
pub fn edge_count_for_sizes(kind: ConstructionKind, sizes: &[usize]) -> usize {
    assert_eq!(sizes.len(), kind.classes(), "wrong number of classes");
    match kind {
        ConstructionKind::S => sizes[0] * sizes[1] * sizes[2],
        ConstructionKind::J => binom(sizes[0], 2) * sizes[1],
        ConstructionKind::T => {
            let [a, b, c] = [sizes[0], sizes[1], sizes[2]];
            a * b * c + binom(a, 2) * b + binom(b, 2) * c + binom(c, 2) * a
        }
        ConstructionKind::B => {
            let n = sizes[0] + sizes[1];
            binom(n, 3) - binom(sizes[0], 3) - binom(sizes[1], 3)
        }
    }
}

/// The edge-maximizing class sizes at order `n`. Balanced partitions win
/// for S, T, and B (larger classes first); J takes the best `|V0|`,
/// preferring the smaller one on ties.
pub fn optimal_sizes(kind: ConstructionKind, n: usize) -> Vec<usize> {
    match kind {
        ConstructionKind::S | ConstructionKind::T => {
            let base = n / 3;
            let rem = n % 3;
            vec![
                base + usize::from(rem > 0),
                base + usize::from(rem > 1),
                base,
            ]
        }
        ConstructionKind::J => {
            let mut best = (0usize, 0usize);
            for k in 0..=n {
                let e = binom(k, 2) * (n - k);
                if e > best.1 {
                    best = (k, e);
                }
            }
            vec![best.0, n - best.0]
        }
        ConstructionKind::B => vec![n.div_ceil(2), n / 2],
    }
}

/// Closed-form maximum edge count at order `n`.
pub fn edge_count_formula(kind: ConstructionKind, n: usize) -> usize {
    match kind {
        // The balanced tripartite product has its own classical form.
        ConstructionKind::S => (n / 3) * ((n + 1) / 3) * ((n + 2) / 3),
        _ => edge_count_for_sizes(kind, &optimal_sizes(kind, n)),
    }
}

/// An extremal construction instance.
#[derive(Clone, Debug)]
pub struct Construction {
    pub kind: ConstructionKind,
    pub sizes: Vec<usize>,
    pub graph: ThreeGraph,
}

/// The edge-maximizing construction of the given kind and order.
pub fn build(kind: ConstructionKind, n: usize) -> Result<Construction, ConstructionError> {
    let sizes = optimal_sizes(kind, n);
    let graph = graph_for_sizes(kind, &sizes)?;
    Ok(Construction { kind, sizes, graph })
}

/// Whether `g` equals a construction of the given kind under some
/// assignment of its vertices to classes (class sizes unrestricted, empty
/// classes allowed). Exhaustive search, so the order is capped.
pub fn is_member(kind: ConstructionKind, g: &ThreeGraph) -> Result<bool, ConstructionError> {
    let n = g.n();
    let classes = kind.classes();
    let max = if classes == 3 { 12 } else { 16 };
    if n > max {
        return Err(ConstructionError::MembershipTooLarge { kind, n, max });
    }
    let triples: Vec<([usize; 3], bool)> = {
        let mut v = Vec::with_capacity(binom(n, 3));
        for x in 0..n {
            for y in x + 1..n {
                for z in y + 1..n {
                    v.push(([x, y, z], g.has_edge(x, y, z)));
                }
            }
        }
        v
    };
    let mut class = vec![0usize; n];
    'outer: loop {
        if triples
            .iter()
            .all(|&([x, y, z], e)| is_edge(kind, class[x], class[y], class[z]) == e)
        {
            return Ok(true);
        }
        // Next assignment in mixed-radix order.
        for slot in class.iter_mut() {
            *slot += 1;
            if *slot < classes {
                continue 'outer;
            }
            *slot = 0;
        }
        return Ok(false);
    }
}
