//! Numeric helpers for the rounding path: eigenanalysis of solver blocks,
//! recovery of rational null-space bases, and small exact linear solves.
//!
//! Nothing here is used during verification, which remains free of
//! floating-point arithmetic.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use turan_field::Rational;

/// Jacobi eigendecomposition of a symmetric matrix, returning eigenvalues
/// and matching eigenvectors.  Plenty accurate for the modest dimensions of
/// flag blocks.
pub(crate) fn jacobi_eigen(dim: usize, entries: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut a = entries.to_vec();
    let mut v = vec![0.0; dim * dim];
    for i in 0..dim {
        v[i * dim + i] = 1.0;
    }
    for _ in 0..400 {
        let (mut p, mut q, mut best) = (0, 0, 0.0f64);
        let mut off = 0.0;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let m = a[i * dim + j].abs();
                off += m * m;
                if m > best {
                    best = m;
                    p = i;
                    q = j;
                }
            }
        }
        if off < 1e-30 {
            break;
        }
        let app = a[p * dim + p];
        let aqq = a[q * dim + q];
        let apq = a[p * dim + q];
        if apq == 0.0 {
            break;
        }
        let theta = 0.5 * (aqq - app) / apq;
        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let c = 1.0 / (t * t + 1.0).sqrt();
        let s = t * c;
        for k in 0..dim {
            let akp = a[k * dim + p];
            let akq = a[k * dim + q];
            a[k * dim + p] = c * akp - s * akq;
            a[k * dim + q] = s * akp + c * akq;
        }
        for k in 0..dim {
            let apk = a[p * dim + k];
            let aqk = a[q * dim + k];
            a[p * dim + k] = c * apk - s * aqk;
            a[q * dim + k] = s * apk + c * aqk;
        }
        for k in 0..dim {
            let vkp = v[k * dim + p];
            let vkq = v[k * dim + q];
            v[k * dim + p] = c * vkp - s * vkq;
            v[k * dim + q] = s * vkp + c * vkq;
        }
    }
    let values: Vec<f64> = (0..dim).map(|i| a[i * dim + i]).collect();
    let vectors: Vec<Vec<f64>> = (0..dim)
        .map(|i| (0..dim).map(|k| v[k * dim + i]).collect())
        .collect();
    (values, vectors)
}

/// Reduced row echelon form over floats with a pivot threshold; near-zero
/// rows are dropped and pivots normalized to 1.
pub(crate) fn float_rref(mut rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    if rows.is_empty() {
        return rows;
    }
    let cols = rows[0].len();
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(best) = (rank..rows.len())
            .max_by(|&a, &b| rows[a][col].abs().total_cmp(&rows[b][col].abs()))
        else {
            break;
        };
        if rows[best][col].abs() < 1e-4 {
            continue;
        }
        rows.swap(rank, best);
        let pivot = rows[rank][col];
        for x in rows[rank].iter_mut() {
            *x /= pivot;
        }
        for r in 0..rows.len() {
            if r != rank {
                let factor = rows[r][col];
                if factor != 0.0 {
                    for c in 0..cols {
                        let delta = factor * rows[rank][c];
                        rows[r][c] -= delta;
                    }
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    for row in &mut rows {
        for x in row.iter_mut() {
            if x.abs() < 1e-9 {
                *x = 0.0;
            }
        }
    }
    rows
}

/// Snaps one float vector to rationals with small denominators, or gives up
/// when some coordinate is not convincingly rational.
/// The smallest-denominator rational within `delta` of `x`: walks the
/// continued-fraction convergents and stops at the first that is close
/// enough.  Unlike best-under-a-cap rationalization this recovers an exact
/// small rational from a float that is merely accurate, without a tuned
/// denominator bound.
pub(crate) fn snap_min_den(x: f64, delta: f64, max_den: i128) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    if x.abs() <= delta {
        return Some(Rational::zero());
    }
    let (mut p0, mut q0): (i128, i128) = (1, 0);
    let (mut p1, mut q1): (i128, i128) = (x.floor() as i128, 1);
    let mut a = x;
    loop {
        if (p1 as f64 / q1 as f64 - x).abs() <= delta {
            return Some(Rational::new(BigInt::from(p1), BigInt::from(q1)));
        }
        let frac = a - a.floor();
        if frac.abs() < 1e-14 {
            return None;
        }
        a = 1.0 / frac;
        let ai = a.floor() as i128;
        let p2 = ai.checked_mul(p1)?.checked_add(p0)?;
        let q2 = ai.checked_mul(q1)?.checked_add(q0)?;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if q1 > max_den {
            return None;
        }
    }
}

/// Snaps a vector to small rationals after normalizing by its largest
/// component, so that a near-zero leading entry cannot blow up the scale.
/// `None` unless every entry lands on a denominator at most `max_den`.
pub(crate) fn snap_rational_vector(
    row: &[f64],
    delta: f64,
    max_den: i128,
) -> Option<Vec<Rational>> {
    let scale = row.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    row.iter()
        .map(|&x| snap_min_den(x / scale, delta, max_den))
        .collect()
}

pub(crate) fn bigrational_to_f64(r: &Rational) -> f64 {
    // `ToPrimitive` scales by bit length internally, so huge numerators and
    // denominators convert correctly instead of saturating to NaN.
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact kernel of the row span: RREF over ℚ, then the standard basis of
/// the solution space (one vector per free column).
pub(crate) fn kernel_basis(rows: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut rank = 0usize;
    for col in 0..dim {
        let Some(pivot_row) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot_row);
        let inv = m[rank][col].clone();
        for c in 0..dim {
            m[rank][c] = &m[rank][c] / &inv;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in 0..dim {
                    let delta = &factor * &m[rank][c];
                    m[r][c] = &m[r][c] - &delta;
                }
            }
        }
        pivots.push((rank, col));
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut basis = Vec::new();
    for free in 0..dim {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![Rational::zero(); dim];
        v[free] = Rational::one();
        for &(r, c) in &pivots {
            v[c] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Clears denominators: returns integer vectors and the common denominator.
pub(crate) fn clear_denominators(vectors: &[Vec<Rational>]) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut den = BigInt::one();
    for v in vectors {
        for x in v {
            let d = x.denom();
            let g = gcd(den.clone(), d.clone());
            den = &den / &g * d;
        }
    }
    let ints = vectors
        .iter()
        .map(|v| {
            v.iter()
                .map(|x| x.numer() * (&den / x.denom()))
                .collect()
        })
        .collect();
    (ints, den)
}

fn gcd(mut a: BigInt, mut b: BigInt) -> BigInt {
    a = a.abs();
    b = b.abs();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    if a.is_zero() {
        BigInt::one()
    } else {
        a
    }
}

/// Solves a square linear system over ℚ by Gaussian elimination; rank
/// deficiency is fine as long as the system is consistent (free variables
/// are set to zero).  Returns None when inconsistent.
pub(crate) fn solve_rational_system(
    mut g: Vec<Vec<Rational>>,
    mut rhs: Vec<Rational>,
) -> Option<Vec<Rational>> {
    let n = rhs.len();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut rank = 0usize;
    for col in 0..n {
        let Some(pivot_row) = (rank..n).find(|&r| !g[r][col].is_zero()) else {
            continue;
        };
        g.swap(rank, pivot_row);
        rhs.swap(rank, pivot_row);
        let inv = g[rank][col].clone();
        for c in 0..n {
            g[rank][c] = &g[rank][c] / &inv;
        }
        rhs[rank] = &rhs[rank] / &inv;
        for r in 0..n {
            if r != rank && !g[r][col].is_zero() {
                let factor = g[r][col].clone();
                for c in 0..n {
                    let delta = &factor * &g[rank][c];
                    g[r][c] = &g[r][c] - &delta;
                }
                let delta = &factor * &rhs[rank];
                rhs[r] = &rhs[r] - &delta;
            }
        }
        pivots.push((rank, col));
        rank += 1;
        if rank == n {
            break;
        }
    }
    // Any zeroed-out row must have a zero right-hand side.
    for r in rank..n {
        if !rhs[r].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rational::zero(); n];
    for &(r, c) in &pivots {
        x[c] = rhs[r].clone();
    }
    Some(x)
}

/// Dense float product `a (rows×inner) · b (inner×cols)`.
pub(crate) fn mat_mul_f64(
    a: &[f64],
    b: &[f64],
    rows: usize,
    inner: usize,
    cols: usize,
) -> Vec<f64> {
    let mut out = vec![0.0; rows * cols];
    for i in 0..rows {
        for k in 0..inner {
            let aik = a[i * inner + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..cols {
                out[i * cols + j] += aik * b[k * cols + j];
            }
        }
    }
    out
}

/// Solves `a x = rhs` for a square float system with partial pivoting;
/// `rhs` holds `cols` right-hand sides column-major-free (row-major n×cols).
pub(crate) fn solve_f64(a: &[f64], rhs: &[f64], n: usize, cols: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut r = rhs.to_vec();
    for col in 0..n {
        let best = (col..n).max_by(|&x, &y| m[x * n + col].abs().total_cmp(&m[y * n + col].abs()))?;
        if m[best * n + col].abs() < 1e-12 {
            return None;
        }
        for c in 0..n {
            m.swap(col * n + c, best * n + c);
        }
        for c in 0..cols {
            r.swap(col * cols + c, best * cols + c);
        }
        let pivot = m[col * n + col];
        for c in 0..n {
            m[col * n + c] /= pivot;
        }
        for c in 0..cols {
            r[col * cols + c] /= pivot;
        }
        for row in 0..n {
            if row != col {
                let factor = m[row * n + col];
                if factor != 0.0 {
                    for c in 0..n {
                        let delta = factor * m[col * n + c];
                        m[row * n + c] -= delta;
                    }
                    for c in 0..cols {
                        let delta = factor * r[col * cols + c];
                        r[row * cols + c] -= delta;
                    }
                }
            }
        }
    }
    Some(r)
}
