//! Infeasible-start primal-dual predictor-corrector interior-point method
//! with the HKM search direction.

use crate::linalg::{dense_cholesky, Block, BlockMat, SparseMat};
use crate::parse::Problem;

/// Tuning knobs; the defaults suit the flag-algebra programs this tool is
/// shipped for.
#[derive(Clone, Debug)]
pub struct Options {
    /// Relative feasibility/gap tolerance for declaring optimality.
    pub tol: f64,
    /// Looser tolerance at which a stalled run still counts as usable.
    pub near_tol: f64,
    pub max_iter: usize,
    pub verbose: bool,
}

impl Default for Options {
    fn default() -> Options {
        Options {
            tol: 1e-8,
            near_tol: 1e-5,
            max_iter: 200,
            verbose: false,
        }
    }
}

/// How a run ended.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    /// All residuals below `tol`.
    Optimal,
    /// Stopped early, but residuals below `near_tol`.
    NearOptimal,
    /// No usable point reached.
    Failed,
}

#[derive(Debug)]
pub enum SolveError {
    /// A constraint has an identically zero matrix but a nonzero right-hand
    /// side: trivially infeasible.
    InfeasibleZeroRow { constraint: usize },
    /// The Schur system could not be factored even with regularization.
    SchurBreakdown { iteration: usize },
}

impl std::fmt::Display for SolveError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveError::InfeasibleZeroRow { constraint } => {
                write!(f, "constraint {constraint} has a zero matrix and nonzero right-hand side")
            }
            SolveError::SchurBreakdown { iteration } => {
                write!(f, "Schur complement factorization failed at iteration {iteration}")
            }
        }
    }
}

impl std::error::Error for SolveError {}

/// A solved (or best-effort) primal-dual point.
#[derive(Debug)]
pub struct Solution {
    pub status: Status,
    pub iterations: usize,
    pub y: Vec<f64>,
    pub x: BlockMat,
    pub z: BlockMat,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub relative_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

struct Workspace {
    norms: Vec<f64>,
    b: Vec<f64>,
    cons: Vec<SparseMat>,
}

/// Normalizes every constraint row to unit Frobenius norm; returns the
/// scaling factors so the dual vector can be mapped back.
fn normalize(problem: &Problem) -> Result<Workspace, SolveError> {
    let mut norms = Vec::with_capacity(problem.m());
    let mut b = problem.b.clone();
    let mut cons = problem.constraints.clone();
    for (k, a) in cons.iter_mut().enumerate() {
        let norm = a.frob_norm();
        if norm == 0.0 {
            if b[k] != 0.0 {
                return Err(SolveError::InfeasibleZeroRow { constraint: k + 1 });
            }
            norms.push(1.0);
            continue;
        }
        a.scale(1.0 / norm);
        b[k] /= norm;
        norms.push(norm);
    }
    Ok(Workspace { norms, b, cons })
}

/// Dense per-row Schur build: `row[j − i] = tr(A_i Z⁻¹ A_j X)` for `j ≥ i`.
fn schur_row(
    i: usize,
    cons: &[SparseMat],
    zinv: &BlockMat,
    x: &BlockMat,
) -> Vec<f64> {
    // G_b = Z⁻¹_b · A_i,b · X_b per block, dense (or diagonal).
    let mut g_blocks: Vec<Block> = Vec::with_capacity(zinv.blocks.len());
    for (b, entries) in cons[i].by_block.iter().enumerate() {
        match (&zinv.blocks[b], &x.blocks[b]) {
            (Block::Dense { dim, data: zi }, Block::Dense { data: xd, .. }) => {
                let dim = *dim;
                if entries.is_empty() {
                    g_blocks.push(Block::Dense { dim: 0, data: Vec::new() });
                    continue;
                }
                // S = A_i,b · X_b  (A sparse symmetric).
                let mut s = vec![0.0; dim * dim];
                for e in entries {
                    let (p, q, v) = (e.i, e.j, e.v);
                    for (dst, src) in s[p * dim..(p + 1) * dim].iter_mut().zip(&xd[q * dim..(q + 1) * dim]) {
                        *dst += v * src;
                    }
                    if p != q {
                        for (dst, src) in s[q * dim..(q + 1) * dim].iter_mut().zip(&xd[p * dim..(p + 1) * dim]) {
                            *dst += v * src;
                        }
                    }
                }
                g_blocks.push(Block::Dense {
                    dim,
                    data: crate::linalg::dense_mul(dim, zi, &s),
                });
            }
            (Block::Diag { data: zi }, Block::Diag { data: xd }) => {
                let mut g = vec![0.0; zi.len()];
                for e in entries {
                    g[e.i] = zi[e.i] * e.v * xd[e.i];
                }
                g_blocks.push(Block::Diag { data: g });
            }
            _ => unreachable!("block kinds always match"),
        }
    }
    let mut row = vec![0.0; cons.len() - i];
    for (j, a_j) in cons.iter().enumerate().skip(i) {
        let mut acc = 0.0;
        for (b, entries) in a_j.by_block.iter().enumerate() {
            match &g_blocks[b] {
                Block::Dense { dim, data } => {
                    if *dim == 0 {
                        continue;
                    }
                    for e in entries {
                        acc += e.v * data[e.j * dim + e.i];
                        if e.i != e.j {
                            acc += e.v * data[e.i * dim + e.j];
                        }
                    }
                }
                Block::Diag { data } => {
                    for e in entries {
                        acc += e.v * data[e.i];
                    }
                }
            }
        }
        row[j - i] = acc;
    }
    row
}

/// Builds the full Schur complement matrix, threaded over rows.
fn build_schur(cons: &[SparseMat], zinv: &BlockMat, x: &BlockMat) -> Vec<f64> {
    let m = cons.len();
    let threads = std::thread::available_parallelism().map_or(1, |p| p.get()).min(m.max(1));
    let mut mat = vec![0.0; m * m];
    if threads <= 1 || m < 32 {
        for i in 0..m {
            let row = schur_row(i, cons, zinv, x);
            for (off, v) in row.iter().enumerate() {
                mat[i * m + i + off] = *v;
            }
        }
    } else {
        let rows: Vec<Vec<(usize, Vec<f64>)>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    scope.spawn(move || {
                        let mut out = Vec::new();
                        let mut i = t;
                        while i < m {
                            out.push((i, schur_row(i, cons, zinv, x)));
                            i += threads;
                        }
                        out
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("schur worker")).collect()
        });
        for chunk in rows {
            for (i, row) in chunk {
                for (off, v) in row.iter().enumerate() {
                    mat[i * m + i + off] = *v;
                }
            }
        }
    }
    for i in 0..m {
        for j in (i + 1)..m {
            mat[j * m + i] = mat[i * m + j];
        }
    }
    mat
}

fn chol_solve(dim: usize, l: &[f64], rhs: &[f64]) -> Vec<f64> {
    let mut v = rhs.to_vec();
    for i in 0..dim {
        let mut s = v[i];
        for k in 0..i {
            s -= l[i * dim + k] * v[k];
        }
        v[i] = s / l[i * dim + i];
    }
    for i in (0..dim).rev() {
        let mut s = v[i];
        for k in (i + 1)..dim {
            s -= l[k * dim + i] * v[k];
        }
        v[i] = s / l[i * dim + i];
    }
    v
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Solves the problem; `Ok` carries the best point reached together with its
/// status, `Err` only structural breakdowns.
pub fn solve(problem: &Problem, opts: &Options) -> Result<Solution, SolveError> {
    let ws = normalize(problem)?;
    let m = ws.b.len();
    let sizes = &problem.block_sizes;
    let k_total: usize = sizes.iter().map(|s| s.unsigned_abs() as usize).sum();

    let b_norm = norm2(&ws.b);
    let c_norm = {
        let mut c = BlockMat::zeros(sizes);
        c.add_sparse(&problem.c, 1.0);
        c.frob_norm()
    };

    let tau = (10.0_f64).max((k_total as f64).sqrt()).max(2.0 * ws.b.iter().fold(0.0f64, |a, &v| a.max(v.abs())));
    let mut x = BlockMat::identity(sizes, tau);
    let mut z = BlockMat::identity(sizes, tau);
    let mut y = vec![0.0; m];

    let mut best: Option<(f64, Solution)> = None;
    let mut stall = 0usize;

    for iter in 0..opts.max_iter {
        // Residuals.  Dual feasibility for `max tr(CX)` is `Z = Σ y_k A_k − C`,
        // so the dual residual is `Fd = Σ y_k A_k − C − Z`.
        let rp: Vec<f64> = (0..m).map(|k| ws.b[k] - x.trace_sparse(&ws.cons[k])).collect();
        let mut fd = BlockMat::zeros(sizes);
        fd.add_sparse(&problem.c, -1.0);
        fd.scale_add(1.0, &z, -1.0);
        for (k, a) in ws.cons.iter().enumerate() {
            if y[k] != 0.0 {
                fd.add_sparse(a, y[k]);
            }
        }
        let pobj = x.trace_sparse(&problem.c);
        let dobj: f64 = ws.b.iter().zip(&y).map(|(b, y)| b * y).sum();
        let gap = x.trace_full(&z);
        let mu = gap / k_total as f64;
        let pinf = norm2(&rp) / (1.0 + b_norm);
        let dinf = fd.frob_norm() / (1.0 + c_norm);
        let relgap = gap.abs() / (1.0 + pobj.abs() + dobj.abs());
        let score = pinf.max(dinf).max(relgap);

        if opts.verbose {
            eprintln!(
                "iter {iter:3}  pobj {pobj:+.9e}  dobj {dobj:+.9e}  gap {relgap:.2e}  pinf {pinf:.2e}  dinf {dinf:.2e}"
            );
        }

        let snapshot = |status: Status| Solution {
            status,
            iterations: iter,
            y: y.iter().zip(&ws.norms).map(|(v, n)| v / n).collect(),
            x: x.clone(),
            z: z.clone(),
            primal_objective: pobj,
            dual_objective: dobj,
            relative_gap: relgap,
            primal_infeasibility: pinf,
            dual_infeasibility: dinf,
        };

        if best.as_ref().is_none_or(|(s, _)| score < *s) {
            best = Some((score, snapshot(Status::Failed)));
        }
        if score <= opts.tol {
            return Ok(snapshot(Status::Optimal));
        }

        // Factor Z and form its inverse.
        let Some(z_chol) = z.cholesky() else {
            break;
        };
        let zinv = z_chol.inverse();

        // Schur complement and shared right-hand-side pieces.
        let schur = build_schur(&ws.cons, &zinv, &x);
        let a_vec: Vec<f64> = ws.cons.iter().map(|a| zinv.trace_sparse(a)).collect();
        let t2 = zinv.mul(&fd).mul(&x);
        let f_vec: Vec<f64> = ws.cons.iter().map(|a| t2.trace_sparse_general(a)).collect();

        // Factor the Schur matrix, regularizing on failure.
        let max_diag = (0..m).fold(0.0f64, |acc, i| acc.max(schur[i * m + i].abs())).max(1.0);
        let mut ridge = 0.0;
        let mut factor = schur.clone();
        let mut ok = dense_cholesky(m, &mut factor);
        while !ok {
            ridge = if ridge == 0.0 { 1e-14 * max_diag } else { ridge * 100.0 };
            if ridge > 1e-4 * max_diag {
                return Err(SolveError::SchurBreakdown { iteration: iter });
            }
            factor.copy_from_slice(&schur);
            for i in 0..m {
                factor[i * m + i] += ridge;
            }
            ok = dense_cholesky(m, &mut factor);
        }
        drop(schur);

        // Predictor (affine) direction: σ = 0.  The Newton system gives
        // `M dy = σμ·a − b − f (− corr)` and `dZ = Fd + Σ dy_j A_j`; a unit
        // step then restores exact dual feasibility.
        let rhs_aff: Vec<f64> = (0..m).map(|k| -ws.b[k] - f_vec[k]).collect();
        let dy_aff = chol_solve(m, &factor, &rhs_aff);
        let mut dz_aff = fd.clone();
        for (k, a) in ws.cons.iter().enumerate() {
            if dy_aff[k] != 0.0 {
                dz_aff.add_sparse(a, dy_aff[k]);
            }
        }
        // dX_aff = −X − Z⁻¹ dZ_aff X.
        let mut dx_aff = zinv.mul(&dz_aff).mul(&x);
        dx_aff.scale_add(-1.0, &x, -1.0);
        dx_aff.symmetrize();

        let ap_aff = crate::linalg::max_step(&x, &dx_aff);
        let ad_aff = crate::linalg::max_step(&z, &dz_aff);
        let mut x_trial = x.clone();
        x_trial.scale_add(1.0, &dx_aff, ap_aff);
        let mut z_trial = z.clone();
        z_trial.scale_add(1.0, &dz_aff, ad_aff);
        let mu_aff = x_trial.trace_full(&z_trial) / k_total as f64;
        let sigma = ((mu_aff / mu).powi(3)).clamp(1e-6, 1.0);

        // Corrector.
        let t3 = zinv.mul(&dz_aff).mul(&dx_aff);
        let corr: Vec<f64> = ws.cons.iter().map(|a| t3.trace_sparse_general(a)).collect();
        let rhs: Vec<f64> = (0..m)
            .map(|k| sigma * mu * a_vec[k] - ws.b[k] - f_vec[k] - corr[k])
            .collect();
        let dy = chol_solve(m, &factor, &rhs);
        let mut dz = fd.clone();
        for (k, a) in ws.cons.iter().enumerate() {
            if dy[k] != 0.0 {
                dz.add_sparse(a, dy[k]);
            }
        }
        // dX = σμ Z⁻¹ − X − Z⁻¹ dZ X − Z⁻¹ dZ_aff dX_aff.
        let mut dx = zinv.mul(&dz).mul(&x);
        dx.scale_add(-1.0, &x, -1.0);
        dx.scale_add(1.0, &zinv, sigma * mu);
        dx.scale_add(1.0, &t3, -1.0);
        dx.symmetrize();

        let ap = (0.98 * crate::linalg::max_step(&x, &dx)).min(1.0);
        let ad = (0.98 * crate::linalg::max_step(&z, &dz)).min(1.0);
        if ap < 1e-4 && ad < 1e-4 {
            stall += 1;
            if stall >= 5 {
                break;
            }
        } else {
            stall = 0;
        }

        x.scale_add(1.0, &dx, ap);
        z.scale_add(1.0, &dz, ad);
        for (yk, dyk) in y.iter_mut().zip(&dy) {
            *yk += ad * dyk;
        }
    }

    let (score, mut sol) = best.expect("at least one iterate");
    sol.status = if score <= opts.near_tol {
        Status::NearOptimal
    } else {
        Status::Failed
    };
    Ok(sol)
}
