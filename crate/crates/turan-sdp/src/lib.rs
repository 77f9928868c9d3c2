//! Emission of the flag-algebra semidefinite program in the SDPA sparse text
//! format, and parsing of solver output.
//!
//! The program bounds the edge density of every admissible graph `H` of the
//! host order: find PSD matrices `Q_σ` and the smallest `λ` with
//!
//! ```text
//!     edge_density(H) + Σ_σ ⟨Q_σ, P_σ(H)⟩ + s_H = λ,      s_H ≥ 0,
//! ```
//!
//! one constraint per admissible graph.  In the emitted file the variable is a
//! single PSD block-diagonal matrix: one block per type (holding `Q_σ`), a
//! 1×1 block holding `λ`, and a diagonal block of slacks, with the objective
//! `minimize λ`.  The file uses the solver convention
//!
//! ```text
//!     maximize tr(C·X)   subject to   tr(A_k·X) = b_k,   X ⪰ 0,
//! ```
//!
//! so `C` carries `−1` on the `λ` block and constraint `k` reads
//! `λ − Σ_σ ⟨Q_σ, P_σ(H_k)⟩ − s_k = d(H_k)`.
//!
//! Every coefficient is scaled by one common integer — the least common
//! multiple of the pair-density denominators and the density denominator — so
//! the file carries exact integers and re-parsing reproduces the coefficient
//! multiset exactly.  The solver is always an external process; this crate
//! never links one.

use std::io::{self, BufRead, Write};

use rayon::prelude::*;
use turan_flags::{pair_density_matrix, FlagContext, FlagError};
use turan_hypergraph::{binom3, ThreeGraph};

/// Errors from SDP emission and parsing.
#[derive(Debug, thiserror::Error)]
pub enum SdpError {
    /// No admissible graphs: the program would have no constraints.
    #[error("no admissible graphs; the program would be degenerate")]
    EmptyCensus,
    /// A census entry has the wrong order for the context.
    #[error("census graph has order {got}, expected {expected}")]
    CensusOrderMismatch { expected: usize, got: usize },
    /// A flag set has no flags, which would give an empty block.
    #[error("type {type_index} has no flags")]
    EmptyBlock { type_index: usize },
    /// Syntax error in a problem or solution file.
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error(transparent)]
    Flags(#[from] FlagError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One sparse coefficient, in the external file's own 1-based convention:
/// `block` counts blocks from 1, and `(i, j)` with `i ≤ j` addresses the
/// upper triangle of that block (the symmetric mirror entry is implied).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Entry {
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub value: i64,
}

/// The assembled program, mirroring the sparse text format.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SdpProblem {
    /// Number of constraints, one per admissible graph, in census order.
    pub constraint_count: usize,
    /// Block dimensions; a negative entry declares a diagonal block.
    pub block_sizes: Vec<i64>,
    /// Scaled right-hand sides `scale · edge_density(H_k)`.
    pub rhs: Vec<i64>,
    /// Entries of the objective matrix `C`.
    pub objective: Vec<Entry>,
    /// Entries of each constraint matrix `A_k`.
    pub constraints: Vec<Vec<Entry>>,
    /// The first `type_block_count` blocks are the per-type `Q_σ` blocks.
    pub type_block_count: usize,
    /// Common integer multiplier applied to every constraint row.
    pub scale: u64,
}

impl SdpProblem {
    /// Index (0-based) of the 1×1 block holding the bound `λ`.
    pub fn bound_block(&self) -> usize {
        self.type_block_count
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    let gcd = {
        let (mut x, mut y) = (a, b);
        while y != 0 {
            let r = x % y;
            x = y;
            y = r;
        }
        x
    };
    a / gcd * b
}

fn falling(n: usize, s: usize) -> u64 {
    (0..s).map(|i| (n - i) as u64).product()
}

/// Builds the program for one census and its flag context.
///
/// Constraint `k` corresponds to `census[k]`; blocks follow the context's
/// global type order, then the bound block, then the slack block.
pub fn emit_sdp(census: &[ThreeGraph], ctx: &FlagContext) -> Result<SdpProblem, SdpError> {
    if census.is_empty() {
        return Err(SdpError::EmptyCensus);
    }
    let n = ctx.n;
    for h in census {
        if h.n() != n {
            return Err(SdpError::CensusOrderMismatch {
                expected: n,
                got: h.n(),
            });
        }
    }
    let m = census.len();
    let t = ctx.sets.len();
    let density_denom = binom3(n) as u64;
    let mut scale = density_denom;
    for set in &ctx.sets {
        if set.dim() == 0 {
            return Err(SdpError::EmptyBlock {
                type_index: set.sigma.index,
            });
        }
        let total = falling(n, set.sigma.s) * turan_hypergraph::binom(n - set.sigma.s, set.m - set.sigma.s) as u64;
        scale = lcm(scale, total);
    }

    let mut block_sizes: Vec<i64> = ctx.sets.iter().map(|s| s.dim() as i64).collect();
    block_sizes.push(1);
    block_sizes.push(-(m as i64));

    let rhs: Vec<i64> = census
        .iter()
        .map(|h| (scale / density_denom * h.edge_count() as u64) as i64)
        .collect();

    let objective = vec![Entry {
        block: t + 1,
        i: 1,
        j: 1,
        value: -1,
    }];

    let constraints: Vec<Vec<Entry>> = census
        .par_iter()
        .enumerate()
        .map(|(k, h)| -> Result<Vec<Entry>, SdpError> {
            let mut entries = Vec::new();
            for (b, set) in ctx.sets.iter().enumerate() {
                let p = pair_density_matrix(set, h)?;
                let unit = (scale / p.total()) as i64;
                for a in 0..p.dim() {
                    for c in a..p.dim() {
                        let count = p.count(a, c);
                        if count != 0 {
                            entries.push(Entry {
                                block: b + 1,
                                i: a + 1,
                                j: c + 1,
                                value: -unit * count as i64,
                            });
                        }
                    }
                }
            }
            entries.push(Entry {
                block: t + 1,
                i: 1,
                j: 1,
                value: scale as i64,
            });
            entries.push(Entry {
                block: t + 2,
                i: k + 1,
                j: k + 1,
                value: -(scale as i64),
            });
            Ok(entries)
        })
        .collect::<Result<_, _>>()?;

    Ok(SdpProblem {
        constraint_count: m,
        block_sizes,
        rhs,
        objective,
        constraints,
        type_block_count: t,
        scale,
    })
}

impl SdpProblem {
    /// Writes the program in the sparse text format.
    pub fn write_dat_s<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "{}", self.constraint_count)?;
        writeln!(w, "{}", self.block_sizes.len())?;
        let sizes: Vec<String> = self.block_sizes.iter().map(|s| s.to_string()).collect();
        writeln!(w, "{}", sizes.join(" "))?;
        let rhs: Vec<String> = self.rhs.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", rhs.join(" "))?;
        for e in &self.objective {
            writeln!(w, "0 {} {} {} {}", e.block, e.i, e.j, e.value)?;
        }
        for (k, entries) in self.constraints.iter().enumerate() {
            for e in entries {
                writeln!(w, "{} {} {} {} {}", k + 1, e.block, e.i, e.j, e.value)?;
            }
        }
        Ok(())
    }
}

/// A problem file read back in, with coefficients as written.
#[derive(Clone, PartialEq, Debug)]
pub struct ParsedSdp {
    pub constraint_count: usize,
    pub block_sizes: Vec<i64>,
    pub rhs: Vec<f64>,
    /// `(matno, block, i, j, value)`; `matno` 0 is the objective.
    pub entries: Vec<(usize, usize, usize, usize, f64)>,
}

fn clean_tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || c == ',' || c == '{' || c == '}' || c == '(' || c == ')')
        .filter(|t| !t.is_empty())
}

/// Parses the sparse problem format, tolerating comment lines starting with
/// `"` or `*` and brace/comma punctuation in the header lines.
pub fn parse_dat_s<R: BufRead>(r: R) -> Result<ParsedSdp, SdpError> {
    let mut header: Vec<(usize, String)> = Vec::new();
    let mut entries = Vec::new();
    let mut lineno = 0usize;
    for line in r.lines() {
        lineno += 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('"') || trimmed.starts_with('*') {
            continue;
        }
        if header.len() < 4 {
            header.push((lineno, trimmed.to_string()));
            continue;
        }
        let toks: Vec<&str> = clean_tokens(trimmed).collect();
        if toks.len() != 5 {
            return Err(SdpError::Malformed {
                line: lineno,
                msg: format!("expected 5 fields in entry line, got {}", toks.len()),
            });
        }
        let field = |idx: usize| -> Result<usize, SdpError> {
            toks[idx].parse().map_err(|_| SdpError::Malformed {
                line: lineno,
                msg: format!("bad integer `{}`", toks[idx]),
            })
        };
        let value: f64 = toks[4].parse().map_err(|_| SdpError::Malformed {
            line: lineno,
            msg: format!("bad coefficient `{}`", toks[4]),
        })?;
        entries.push((field(0)?, field(1)?, field(2)?, field(3)?, value));
    }
    if header.len() < 4 {
        return Err(SdpError::Malformed {
            line: lineno,
            msg: "file ends before the four header lines".into(),
        });
    }
    let (l0, m_line) = &header[0];
    let constraint_count: usize =
        clean_tokens(m_line)
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or(SdpError::Malformed {
                line: *l0,
                msg: "bad constraint count".into(),
            })?;
    let (l2, sizes_line) = &header[2];
    let block_sizes: Vec<i64> = clean_tokens(sizes_line)
        .map(|t| {
            t.parse().map_err(|_| SdpError::Malformed {
                line: *l2,
                msg: format!("bad block size `{t}`"),
            })
        })
        .collect::<Result<_, _>>()?;
    let (l1, nblocks_line) = &header[1];
    let declared_blocks: usize = clean_tokens(nblocks_line)
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or(SdpError::Malformed {
            line: *l1,
            msg: "bad block count".into(),
        })?;
    if declared_blocks != block_sizes.len() {
        return Err(SdpError::Malformed {
            line: *l2,
            msg: format!(
                "{} block sizes for {} declared blocks",
                block_sizes.len(),
                declared_blocks
            ),
        });
    }
    let (l3, rhs_line) = &header[3];
    let rhs: Vec<f64> = clean_tokens(rhs_line)
        .map(|t| {
            t.parse().map_err(|_| SdpError::Malformed {
                line: *l3,
                msg: format!("bad right-hand side `{t}`"),
            })
        })
        .collect::<Result<_, _>>()?;
    if rhs.len() != constraint_count {
        return Err(SdpError::Malformed {
            line: *l3,
            msg: format!(
                "{} right-hand sides for {} constraints",
                rhs.len(),
                constraint_count
            ),
        });
    }
    Ok(ParsedSdp {
        constraint_count,
        block_sizes,
        rhs,
        entries,
    })
}

/// One block of a parsed solution matrix.
#[derive(Clone, PartialEq, Debug)]
pub enum SolBlock {
    /// Dense symmetric block, row-major `dim × dim`.
    Dense { dim: usize, values: Vec<f64> },
    /// Diagonal block.
    Diag { values: Vec<f64> },
}

impl SolBlock {
    fn empty_for(size: i64) -> SolBlock {
        if size < 0 {
            SolBlock::Diag {
                values: vec![0.0; (-size) as usize],
            }
        } else {
            let dim = size as usize;
            SolBlock::Dense {
                dim,
                values: vec![0.0; dim * dim],
            }
        }
    }

    fn set(&mut self, i: usize, j: usize, v: f64) -> Result<(), String> {
        match self {
            SolBlock::Dense { dim, values } => {
                if i >= *dim || j >= *dim {
                    return Err(format!("index ({},{}) outside {dim}×{dim} block", i + 1, j + 1));
                }
                values[i * *dim + j] = v;
                values[j * *dim + i] = v;
                Ok(())
            }
            SolBlock::Diag { values } => {
                if i != j {
                    return Err(format!(
                        "off-diagonal entry ({},{}) in a diagonal block",
                        i + 1,
                        j + 1
                    ));
                }
                if i >= values.len() {
                    return Err(format!("index {} outside diagonal block", i + 1));
                }
                values[i] = v;
                Ok(())
            }
        }
    }

    /// Entry `(i, j)` (0-based).
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            SolBlock::Dense { dim, values } => values[i * dim + j],
            SolBlock::Diag { values } => {
                if i == j {
                    values[i]
                } else {
                    0.0
                }
            }
        }
    }
}

/// A parsed solver solution: the dual vector and both matrices.
#[derive(Clone, PartialEq, Debug)]
pub struct SdpSolution {
    pub y: Vec<f64>,
    pub z_blocks: Vec<SolBlock>,
    pub x_blocks: Vec<SolBlock>,
}

impl SdpSolution {
    /// The numeric bound: the value of the 1×1 bound block of `X`.
    pub fn bound(&self, problem: &SdpProblem) -> f64 {
        self.x_blocks[problem.bound_block()].get(0, 0)
    }

    /// Dense copies of the per-type blocks of `X`, in global type order.
    pub fn type_matrices(&self, problem: &SdpProblem) -> Vec<(usize, Vec<f64>)> {
        self.x_blocks[..problem.type_block_count]
            .iter()
            .map(|b| match b {
                SolBlock::Dense { dim, values } => (*dim, values.clone()),
                SolBlock::Diag { values } => {
                    let dim = values.len();
                    let mut dense = vec![0.0; dim * dim];
                    for (i, v) in values.iter().enumerate() {
                        dense[i * dim + i] = *v;
                    }
                    (dim, dense)
                }
            })
            .collect()
    }
}

/// Parses the standard solution layout: a first line with the dual vector
/// `y`, then entry lines `matno block i j value` where `matno` 1 is the dual
/// matrix `Z` and 2 the primal matrix `X`, 1-indexed upper triangle.
pub fn parse_solution<R: BufRead>(
    r: R,
    block_sizes: &[i64],
    constraint_count: usize,
) -> Result<SdpSolution, SdpError> {
    let mut lines = r.lines();
    let mut lineno = 0usize;
    let first = loop {
        lineno += 1;
        match lines.next() {
            None => {
                return Err(SdpError::Malformed {
                    line: lineno,
                    msg: "empty solution file".into(),
                })
            }
            Some(line) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line;
                }
            }
        }
    };
    let y: Vec<f64> = clean_tokens(&first)
        .map(|t| {
            t.parse().map_err(|_| SdpError::Malformed {
                line: lineno,
                msg: format!("bad dual value `{t}`"),
            })
        })
        .collect::<Result<_, _>>()?;
    if y.len() != constraint_count {
        return Err(SdpError::Malformed {
            line: lineno,
            msg: format!(
                "{} dual values for {} constraints",
                y.len(),
                constraint_count
            ),
        });
    }
    let mut z_blocks: Vec<SolBlock> = block_sizes.iter().map(|&s| SolBlock::empty_for(s)).collect();
    let mut x_blocks = z_blocks.clone();
    for line in lines {
        lineno += 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let toks: Vec<&str> = clean_tokens(trimmed).collect();
        if toks.len() != 5 {
            return Err(SdpError::Malformed {
                line: lineno,
                msg: format!("expected 5 fields in solution line, got {}", toks.len()),
            });
        }
        let int = |idx: usize| -> Result<usize, SdpError> {
            toks[idx].parse().map_err(|_| SdpError::Malformed {
                line: lineno,
                msg: format!("bad integer `{}`", toks[idx]),
            })
        };
        let (mat, block, i, j) = (int(0)?, int(1)?, int(2)?, int(3)?);
        let value: f64 = toks[4].parse().map_err(|_| SdpError::Malformed {
            line: lineno,
            msg: format!("bad value `{}`", toks[4]),
        })?;
        if block == 0 || block > block_sizes.len() || i == 0 || j == 0 {
            return Err(SdpError::Malformed {
                line: lineno,
                msg: "block or index out of range".into(),
            });
        }
        let target = match mat {
            1 => &mut z_blocks,
            2 => &mut x_blocks,
            other => {
                return Err(SdpError::Malformed {
                    line: lineno,
                    msg: format!("matrix tag must be 1 or 2, got {other}"),
                })
            }
        };
        target[block - 1]
            .set(i - 1, j - 1, value)
            .map_err(|msg| SdpError::Malformed { line: lineno, msg })?;
    }
    Ok(SdpSolution {
        y,
        z_blocks,
        x_blocks,
    })
}
