//! Hypergraph Lagrangians.
//!
//! The Lagrangian of a 3-graph `G` is
//! `λ(G) = max { 6·Σ_{{i,j,k} ∈ E} x_i x_j x_k : x in the probability simplex }`,
//! the limiting edge density of the densest blow-up of `G`.
//!
//! The numeric path maximizes by multiplicative (replicator) ascent from
//! random starts: `x_i ← x_i · ∂_i λ / (3λ)`. Because the objective is
//! homogeneous of degree 3, the normalization is exact on the simplex and the
//! objective never decreases. The exact path evaluates `λ(G, x)` at
//! field-element weights, which is how the closed-form optima are certified:
//! the maximizer is taken from a witness, not rederived.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use turan_field::{FieldElement, FieldError};
use turan_hypergraph::{GraphError, ThreeGraph};

pub const DEFAULT_RESTARTS: usize = 200;
pub const DEFAULT_ITERATIONS: usize = 10_000;

/// Base seed for the per-restart RNGs; fixed so results are reproducible.
const SEED_BASE: u64 = 0x7511_ab21;

#[derive(Debug, Error)]
pub enum LagrangianError {
    #[error("weight vector has {got} coordinates, graph has {expected} vertices")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("class sizes must be nonnegative and sum to at most the blow-up order")]
    NegativeClassSize,
    #[error("blow-up order {n} is smaller than the graph order {k}")]
    OrderTooSmall { n: usize, k: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `λ(G, x) = 6·Σ_{{i,j,k} ∈ E} x_i x_j x_k` for floating-point weights.
pub fn lambda_value(g: &ThreeGraph, x: &[f64]) -> f64 {
    assert_eq!(x.len(), g.n());
    let mut total = 0.0;
    for [i, j, k] in g.edges() {
        total += x[i] * x[j] * x[k];
    }
    6.0 * total
}

/// Exact `λ(G, x)` for field-element weights.
pub fn lambda_at(g: &ThreeGraph, x: &[FieldElement]) -> Result<FieldElement, LagrangianError> {
    if x.len() != g.n() {
        return Err(LagrangianError::DimensionMismatch {
            expected: g.n(),
            got: x.len(),
        });
    }
    let mut total = FieldElement::zero();
    for [i, j, k] in g.edges() {
        let prod = x[i].try_mul(&x[j])?.try_mul(&x[k])?;
        total = total.try_add(&prod)?;
    }
    total.try_mul(&FieldElement::from_int(6)).map_err(Into::into)
}

/// One replicator update in place; returns the objective value *before* the
/// update. A zero objective leaves `x` unchanged (the ascent has nothing to
/// climb).
pub fn replicator_step(g: &ThreeGraph, edges: &[[usize; 3]], x: &mut [f64]) -> f64 {
    let n = g.n();
    debug_assert_eq!(x.len(), n);
    let mut grad = vec![0.0; n];
    for &[i, j, k] in edges {
        grad[i] += x[j] * x[k];
        grad[j] += x[i] * x[k];
        grad[k] += x[i] * x[j];
    }
    // By homogeneity, Σ x_i ∂_i = 3λ with ∂_i = 6·grad_i.
    let lambda: f64 = 2.0 * x.iter().zip(&grad).map(|(&xi, &gi)| xi * gi).sum::<f64>();
    if lambda <= f64::MIN_POSITIVE {
        return lambda;
    }
    let scale = 6.0 / (3.0 * lambda);
    let mut sum = 0.0;
    for (xi, &gi) in x.iter_mut().zip(&grad) {
        *xi *= gi * scale;
        sum += *xi;
    }
    // The update preserves the simplex exactly in real arithmetic; fold the
    // floating-point drift back in.
    for xi in x.iter_mut() {
        *xi /= sum;
    }
    lambda
}

fn ascend(g: &ThreeGraph, edges: &[[usize; 3]], x: &mut [f64], iterations: usize) -> f64 {
    let mut last = lambda_value(g, x);
    let mut flat = 0usize;
    for _ in 0..iterations {
        let before = replicator_step(g, edges, x);
        debug_assert!(
            before >= last - 1e-9 * last.abs().max(1.0),
            "replicator ascent must be monotone"
        );
        let now = lambda_value(g, x);
        if now - last <= 1e-16 * last.max(1.0) {
            flat += 1;
            if flat >= 64 {
                break;
            }
        } else {
            flat = 0;
        }
        last = now;
    }
    last
}

fn random_simplex_point(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    // Exponential spacings give the uniform distribution on the simplex.
    let mut x: Vec<f64> = (0..n).map(|_| -f64::ln(1.0 - rng.gen::<f64>())).collect();
    let sum: f64 = x.iter().sum();
    for xi in &mut x {
        *xi /= sum;
    }
    x
}

/// Sorted-descending lexicographic comparison, the deterministic tie-break
/// between restarts that reach the same objective value.
fn tie_break_key(x: &[f64]) -> Vec<f64> {
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sorted
}

/// Maximizes `λ(G, ·)` by seeded multiplicative ascent from `restarts`
/// random starts. Deterministic for fixed inputs: restart `r` uses an RNG
/// seeded by `r`, and ties within 10⁻¹² are broken toward the
/// lexicographically largest sorted weight vector.
pub fn maximize_lagrangian(
    g: &ThreeGraph,
    restarts: usize,
    iterations: usize,
) -> (f64, Vec<f64>) {
    let n = g.n();
    if n == 0 {
        return (0.0, Vec::new());
    }
    let uniform = vec![1.0 / n as f64; n];
    if g.edge_count() == 0 {
        return (0.0, uniform);
    }
    let edges = g.edges();
    let mut results: Vec<(f64, Vec<f64>)> = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED_BASE ^ (r as u64));
            let mut x = if r == 0 {
                // Always try the uniform point: it is the optimum for
                // vertex-transitive graphs and a good start elsewhere.
                uniform.clone()
            } else {
                random_simplex_point(n, &mut rng)
            };
            let value = ascend(g, &edges, &mut x, iterations);
            (value, x)
        })
        .collect();
    // Reduce in restart order so thread scheduling cannot change the result.
    let mut best = results.remove(0);
    for (value, x) in results {
        if value > best.0 + 1e-12 {
            best = (value, x);
        } else if (value - best.0).abs() <= 1e-12
            && tie_break_key(&x) > tie_break_key(&best.1)
        {
            best = (value, x);
        }
    }
    best
}

/// The `n`-vertex blow-up `G(x, n)`: vertex `i < k` becomes a class of
/// `⌊x_i·n⌋` vertices and the last vertex takes the remainder.
pub fn weighted_blowup(
    g: &ThreeGraph,
    x: &[FieldElement],
    n: usize,
) -> Result<ThreeGraph, LagrangianError> {
    let k = g.n();
    if x.len() != k {
        return Err(LagrangianError::DimensionMismatch {
            expected: k,
            got: x.len(),
        });
    }
    if k == 0 {
        return Ok(g.blowup_with_sizes(&[])?);
    }
    if n < k {
        return Err(LagrangianError::OrderTooSmall { n, k });
    }
    let scale = FieldElement::from_int(n as i64);
    let mut sizes = Vec::with_capacity(k);
    let mut assigned = 0usize;
    for xi in &x[..k - 1] {
        let floor = xi.try_mul(&scale)?.floor();
        let size = usize::try_from(&floor).map_err(|_| LagrangianError::NegativeClassSize)?;
        sizes.push(size);
        assigned += size;
    }
    if assigned > n {
        return Err(LagrangianError::NegativeClassSize);
    }
    sizes.push(n - assigned);
    Ok(g.blowup_with_sizes(&sizes)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use turan_field::rat;

    fn g(text: &str) -> ThreeGraph {
        text.parse().unwrap()
    }

    fn rats(xs: &[(i64, i64)]) -> Vec<FieldElement> {
        xs.iter()
            .map(|&(p, q)| FieldElement::from_rational(rat(p, q)))
            .collect()
    }

    #[test]
    fn single_edge_values() {
        let edge = g("3:123");
        let x = rats(&[(1, 3), (1, 3), (1, 3)]);
        assert_eq!(
            lambda_at(&edge, &x).unwrap(),
            FieldElement::from_rational(rat(2, 9))
        );
        let (value, witness) = maximize_lagrangian(&edge, 20, 2000);
        assert!((value - 2.0 / 9.0).abs() < 1e-12);
        for w in witness {
            assert!((w - 1.0 / 3.0).abs() < 1e-7);
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let edge = g("3:123");
        assert!(matches!(
            lambda_at(&edge, &rats(&[(1, 2), (1, 2)])),
            Err(LagrangianError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn empty_graph_maximizes_to_zero() {
        let (value, witness) = maximize_lagrangian(&g("4:"), 5, 100);
        assert_eq!(value, 0.0);
        assert_eq!(witness.len(), 4);
    }

    #[test]
    fn replicator_is_monotone_and_stays_on_simplex() {
        let k4m = g("4:123,124,134");
        let edges = k4m.edges();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut x = random_simplex_point(4, &mut rng);
        let mut last = lambda_value(&k4m, &x);
        for _ in 0..500 {
            replicator_step(&k4m, &edges, &mut x);
            let now = lambda_value(&k4m, &x);
            assert!(now >= last - 1e-13);
            let sum: f64 = x.iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            last = now;
        }
        assert!((last - 8.0 / 27.0).abs() < 1e-10);
    }

    #[test]
    fn maximize_is_deterministic() {
        let c5 = g("5:123,234,345,145,125");
        let a = maximize_lagrangian(&c5, 40, 3000);
        let b = maximize_lagrangian(&c5, 40, 3000);
        assert_eq!(a.0.to_bits(), b.0.to_bits());
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn weighted_blowup_uniform_edge() {
        let edge = g("3:123");
        let x = rats(&[(1, 3), (1, 3), (1, 3)]);
        let b = weighted_blowup(&edge, &x, 6).unwrap();
        assert_eq!(b.n(), 6);
        assert_eq!(b.edge_count(), 8);
        assert!(matches!(
            weighted_blowup(&edge, &x, 2),
            Err(LagrangianError::OrderTooSmall { .. })
        ));
    }
}
