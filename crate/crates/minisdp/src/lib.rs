//! A small self-contained semidefinite-program solver.
//!
//! Solves problems in the sparse SDPA text convention:
//!
//! ```text
//!     maximize tr(C·X)   subject to   tr(A_k·X) = b_k  (k = 1..m),   X ⪰ 0,
//! ```
//!
//! where `X` is block-diagonal with declared block sizes (negative sizes are
//! diagonal blocks).  The algorithm is a standard infeasible-start primal-dual
//! predictor-corrector interior-point method with the HKM search direction;
//! the Schur complement is assembled from the sparse constraint matrices and
//! factored densely.  Everything is plain `std` — no external crates — so the
//! binary builds anywhere and stays an *external* solver from the point of
//! view of the exact pipeline: its output is never trusted, only rounded and
//! then verified exactly downstream.

pub mod linalg;
pub mod parse;
pub mod solver;

pub use parse::{parse_problem, Problem};
pub use solver::{solve, Options, SolveError, Solution, Status};

use std::io::Write;

/// Writes a solution in the conventional layout: one line with the dual
/// vector, then `1 block i j value` lines for the dual matrix `Z` and
/// `2 block i j value` lines for the primal matrix `X` (1-based, upper
/// triangle).
pub fn write_solution<W: Write>(w: &mut W, sol: &Solution) -> std::io::Result<()> {
    let y: Vec<String> = sol.y.iter().map(|v| format!("{v:.16e}")).collect();
    writeln!(w, "{}", y.join(" "))?;
    for (tag, mat) in [(1, &sol.z), (2, &sol.x)] {
        for (b, block) in mat.blocks.iter().enumerate() {
            match block {
                linalg::Block::Dense { dim, data } => {
                    for i in 0..*dim {
                        for j in i..*dim {
                            writeln!(w, "{} {} {} {} {:.16e}", tag, b + 1, i + 1, j + 1, data[i * dim + j])?;
                        }
                    }
                }
                linalg::Block::Diag { data } => {
                    for (i, v) in data.iter().enumerate() {
                        writeln!(w, "{} {} {} {} {:.16e}", tag, b + 1, i + 1, i + 1, v)?;
                    }
                }
            }
        }
    }
    Ok(())
}
