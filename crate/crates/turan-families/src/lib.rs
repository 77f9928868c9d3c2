//! Forbidden families of 3-graphs and enumeration of admissible graphs.
//!
//! A family is a list of forbidden members; a graph is *admissible* when it
//! contains no member as a subgraph (or, for members marked induced, no
//! member as an induced subgraph). Admissibility is hereditary: deleting a
//! vertex of an admissible graph leaves an admissible graph, which is what
//! makes enumeration by one-vertex extensions complete.
//!
//! Family text format: one graph per line in `n:e1,e2,...` notation, with a
//! leading `!` marking an induced member. Blank lines and `#` comments are
//! ignored.
//!
//! ```
//! use turan_families::Family;
//!
//! let family: Family = "4:123,124,134,234".parse().unwrap();
//! let g = "5:123,124,134".parse().unwrap();
//! assert!(family.is_admissible(&g).unwrap());
//! ```

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;
use turan_hypergraph::{binom, CanonicalForm, GraphError, ThreeGraph};

#[derive(Debug, Error, PartialEq)]
pub enum FamilyError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: GraphError },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One forbidden graph, matched as a subgraph or as an induced subgraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyMember {
    pub graph: ThreeGraph,
    pub induced: bool,
}

impl fmt::Display for FamilyMember {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.induced {
            f.write_str("!")?;
        }
        write!(f, "{}", self.graph)
    }
}

impl FromStr for FamilyMember {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (induced, rest) = match s.strip_prefix('!') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        Ok(FamilyMember {
            graph: rest.parse()?,
            induced,
        })
    }
}

/// A forbidden family.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Family {
    members: Vec<FamilyMember>,
}

impl Family {
    pub fn new(members: Vec<FamilyMember>) -> Family {
        Family { members }
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Whether `g` avoids every member of the family.
    pub fn is_admissible(&self, g: &ThreeGraph) -> Result<bool, GraphError> {
        for m in &self.members {
            let hit = if m.induced {
                g.contains_induced(&m.graph)?
            } else {
                g.contains_subgraph(&m.graph)
            };
            if hit {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.members {
            writeln!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut members = Vec::new();
        for (idx, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let member: FamilyMember = line.parse().map_err(|source| FamilyError::Parse {
                line: idx + 1,
                source,
            })?;
            members.push(member);
        }
        Ok(Family { members })
    }
}

/// All admissible graphs of order `n` up to isomorphism, as canonical
/// representatives sorted by canonical form. The order is deterministic and
/// is the reference enumeration order used everywhere downstream.
pub fn enumerate_admissible(family: &Family, n: usize) -> Result<Vec<ThreeGraph>, FamilyError> {
    let empty = ThreeGraph::new(0)?;
    if !family.is_admissible(&empty)? {
        return Ok(Vec::new());
    }
    let mut layer: Vec<ThreeGraph> = vec![empty];
    for order in 0..n {
        let mut next: HashSet<CanonicalForm> = HashSet::new();
        let new_pairs = binom(order, 2);
        for parent in &layer {
            let base = parent.with_added_vertex()?;
            // The new vertex is `order`; each subset of pairs {i, j} with
            // i < j < order yields one candidate extension.
            let pairs: Vec<(usize, usize)> = (0..order)
                .flat_map(|j| (0..j).map(move |i| (i, j)))
                .collect();
            // Orders beyond canonical-form range fail at canonicalization
            // below, long before the subset shift could overflow.
            debug_assert_eq!(pairs.len(), new_pairs);
            for subset in 0u64..(1u64 << new_pairs) {
                let mut child = base.clone();
                for (bit, &(i, j)) in pairs.iter().enumerate() {
                    if subset >> bit & 1 == 1 {
                        child.add_edge(i, j, order)?;
                    }
                }
                if family.is_admissible(&child)? {
                    next.insert(child.canonical_form()?);
                }
            }
        }
        let mut sorted: Vec<CanonicalForm> = next.into_iter().collect();
        sorted.sort();
        layer = sorted.into_iter().map(|c| c.graph()).collect();
    }
    Ok(layer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_text_round_trip() {
        let text = "4:123,124,134,234\n!4:123\n";
        let family: Family = text.parse().unwrap();
        assert_eq!(family.members().len(), 2);
        assert!(!family.members()[0].induced);
        assert!(family.members()[1].induced);
        assert_eq!(family.to_string(), text);
    }

    #[test]
    fn family_parse_skips_comments_and_blanks() {
        let family: Family = "# forbidden list\n\n4:123,124,134,234\n  \n# done\n"
            .parse()
            .unwrap();
        assert_eq!(family.members().len(), 1);
    }

    #[test]
    fn family_parse_reports_line_numbers() {
        let err = "4:123,124,134,234\n5:99\n".parse::<Family>().unwrap_err();
        match err {
            FamilyError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn admissibility_subgraph_vs_induced() {
        let complete: Family = "4:123,124,134,234".parse().unwrap();
        assert!(complete.is_admissible(&"5:123,124,134".parse().unwrap()).unwrap());
        assert!(!complete.is_admissible(&"5:123,124,134,234".parse().unwrap()).unwrap());

        let induced_single: Family = "!4:123".parse().unwrap();
        // A complete graph has no sparse induced subgraph.
        assert!(induced_single
            .is_admissible(&"4:123,124,134,234".parse().unwrap())
            .unwrap());
        assert!(!induced_single.is_admissible(&"5:123".parse().unwrap()).unwrap());

        // The same member without `!` forbids far more.
        let plain_single: Family = "4:123".parse().unwrap();
        assert!(!plain_single
            .is_admissible(&"4:123,124,134,234".parse().unwrap())
            .unwrap());
    }
}
