//! Exact Turán certificates: rounding numeric SDP solutions into exact
//! matrices over ℚ or ℚ[√d], serializing them, and verifying them with pure
//! integer arithmetic.
//!
//! A certificate claims a density bound for a forbidden family: for every
//! admissible graph `H` of the stated order,
//!
//! ```text
//!     edge_density(H) + Σ_σ ⟨Q_σ, P_σ(H)⟩ ≤ bound,
//! ```
//!
//! where each `Q_σ` is positive semidefinite and `P_σ(H)` is the exact flag
//! pair-density matrix of `H` for type `σ`.  Verification proves positive
//! semidefiniteness by an exact LDLᵀ factorization and checks every
//! inequality with rational (or quadratic-field) arithmetic; no floating
//! point is involved anywhere on that path.

use std::fmt::Write as _;

use num_bigint::BigInt;
use rayon::prelude::*;
use thiserror::Error;
use turan_families::{enumerate_admissible, Family, FamilyError, FamilyMember};
use turan_field::{FieldElement, FieldError, Rational};
use turan_flags::{build_context, pair_density_matrix, FlagContext, FlagError, PairDensities};
use turan_hypergraph::{GraphError, ThreeGraph};

mod round;

#[derive(Debug, Error)]
pub enum CertError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Flags(#[from] FlagError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("block for type {type_index}: no such type (the context has {type_count})")]
    UnknownType { type_index: usize, type_count: usize },
    #[error("duplicate block for type {type_index}")]
    DuplicateBlock { type_index: usize },
    #[error("block for type {type_index}: dimension {got}, expected {expected}")]
    DimensionMismatch {
        type_index: usize,
        expected: usize,
        got: usize,
    },
    #[error("block for type {type_index} is not symmetric at ({i},{j})")]
    AsymmetricBlock { type_index: usize, i: usize, j: usize },
    #[error("element of ℚ[√{got}] in a certificate over ℚ[√{expected}]")]
    DiscriminantMismatch { expected: u64, got: u64 },
    #[error("block for type {type_index} is not positive semidefinite: {detail}")]
    NotPsd { type_index: usize, detail: String },
    #[error("bound violated by {graph}: exceeded by {violation}")]
    SlackViolation { graph: String, violation: String },
    #[error("numeric block for type {type_index} is asymmetric beyond 1e-6 at ({i},{j})")]
    NumericAsymmetry { type_index: usize, i: usize, j: usize },
    #[error(
        "no denominator in the schedule produced a valid certificate (worst slack: {ws}; worst pivot: {wp})",
        ws = .worst_slack.as_deref().unwrap_or("none seen"),
        wp = .worst_pivot.as_deref().unwrap_or("none seen")
    )]
    Rounding {
        worst_slack: Option<String>,
        worst_pivot: Option<String>,
    },
}

/// One symmetric certificate block: the full `dim × dim` matrix of the PSD
/// multiplier for one type, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CertBlock {
    pub type_index: usize,
    pub dim: usize,
    pub entries: Vec<FieldElement>,
}

impl CertBlock {
    pub fn get(&self, i: usize, j: usize) -> &FieldElement {
        &self.entries[i * self.dim + j]
    }
}

/// An exact certificate for a Turán density bound.
///
/// Types whose index does not appear among `blocks` carry the zero matrix.
/// The flag ordering inside each block is the frozen canonical order that
/// `turan_flags::build_context` reproduces deterministically from `family`
/// and `n`, so it is not stored in the file.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub n: usize,
    pub family: Family,
    pub discriminant: u64,
    pub bound: FieldElement,
    pub blocks: Vec<CertBlock>,
}

/// Exact per-graph slacks of a verified certificate.
#[derive(Clone, Debug)]
pub struct SlackReport {
    /// `(H, bound − edge_density(H) − Σ_σ ⟨Q_σ, P_σ(H)⟩)` in census order.
    pub slacks: Vec<(ThreeGraph, FieldElement)>,
    /// The graphs with exactly zero slack, in canonical order.
    pub sharp_set: Vec<ThreeGraph>,
}

// ---------------------------------------------------------------------------
// Exact LDLᵀ.
// ---------------------------------------------------------------------------

/// A unit-lower-triangular factor and the pivot diagonal of `M = L·D·Lᵀ`.
#[derive(Clone, Debug)]
pub struct Ldlt {
    pub dim: usize,
    /// Row-major `dim × dim`, unit diagonal.
    pub lower: Vec<FieldElement>,
    pub pivots: Vec<FieldElement>,
}

impl Ldlt {
    /// Recomputes `L·D·Lᵀ` exactly; used to validate the factorization.
    pub fn reassemble(&self) -> Result<Vec<FieldElement>, FieldError> {
        let d = self.dim;
        let mut out = vec![FieldElement::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                let mut s = FieldElement::zero();
                for k in 0..=i.min(j) {
                    let term = self.lower[i * d + k]
                        .try_mul(&self.pivots[k])?
                        .try_mul(&self.lower[j * d + k])?;
                    s = s.try_add(&term)?;
                }
                out[i * d + j] = s;
            }
        }
        Ok(out)
    }
}

/// Why a matrix failed the exact PSD test.
#[derive(Debug)]
pub enum PsdFailure {
    NegativePivot { index: usize, pivot: FieldElement },
    /// A zero pivot with a nonzero entry below it: the matrix has a negative
    /// eigenvalue direction even though no pivot is negative.
    ZeroColumn { pivot_index: usize, row: usize },
    Field(FieldError),
}

impl From<FieldError> for PsdFailure {
    fn from(e: FieldError) -> Self {
        PsdFailure::Field(e)
    }
}

impl std::fmt::Display for PsdFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PsdFailure::NegativePivot { index, pivot } => {
                write!(f, "negative pivot {pivot} at index {index}")
            }
            PsdFailure::ZeroColumn { pivot_index, row } => write!(
                f,
                "zero pivot at index {pivot_index} with a nonzero entry in row {row}"
            ),
            PsdFailure::Field(e) => write!(f, "field error: {e}"),
        }
    }
}

/// Exact LDLᵀ factorization of a symmetric matrix over ℚ[√d], succeeding iff
/// the matrix is positive semidefinite.  A zero pivot is accepted only when
/// the entire remaining column is zero, which is exactly the singular PSD
/// case; otherwise the failure names the offending pivot.
pub fn ldlt(dim: usize, entries: &[FieldElement]) -> Result<Ldlt, PsdFailure> {
    assert_eq!(entries.len(), dim * dim, "entries must be a full square matrix");
    let mut m = entries.to_vec();
    let mut lower = vec![FieldElement::zero(); dim * dim];
    let mut pivots = Vec::with_capacity(dim);
    for k in 0..dim {
        lower[k * dim + k] = FieldElement::one();
        let p = m[k * dim + k].clone();
        let sign = p.sign();
        if sign < 0 {
            return Err(PsdFailure::NegativePivot { index: k, pivot: p });
        }
        if sign == 0 {
            for i in (k + 1)..dim {
                if !m[i * dim + k].is_zero() {
                    return Err(PsdFailure::ZeroColumn { pivot_index: k, row: i });
                }
            }
            pivots.push(FieldElement::zero());
            continue;
        }
        for i in (k + 1)..dim {
            lower[i * dim + k] = m[i * dim + k].try_div(&p)?;
        }
        for i in (k + 1)..dim {
            let lik = lower[i * dim + k].clone();
            if lik.is_zero() {
                continue;
            }
            for j in (k + 1)..=i {
                let sub = lik.try_mul(&m[k * dim + j])?;
                m[i * dim + j] = m[i * dim + j].try_sub(&sub)?;
                if i != j {
                    m[j * dim + i] = m[i * dim + j].clone();
                }
            }
        }
        pivots.push(p);
    }
    Ok(Ldlt { dim, lower, pivots })
}

// ---------------------------------------------------------------------------
// Serialization.
// ---------------------------------------------------------------------------

/// Renders a certificate in the line-oriented text format.
pub fn serialize_certificate(cert: &Certificate) -> String {
    let mut out = String::new();
    out.push_str("TURAN-CERT v1\n");
    let _ = writeln!(out, "n {}", cert.n);
    let _ = writeln!(out, "discriminant {}", cert.discriminant);
    let _ = writeln!(out, "bound {}", cert.bound);
    let _ = writeln!(out, "family {}", cert.family.members().len());
    for member in cert.family.members() {
        let _ = writeln!(out, "{member}");
    }
    for block in &cert.blocks {
        let _ = writeln!(out, "block {} {}", block.type_index, block.dim);
        for i in 0..block.dim {
            let row: Vec<String> = (0..=i).map(|j| block.get(i, j).to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    out
}

/// Parses the certificate text format, reporting errors with line numbers.
pub fn parse_certificate(text: &str) -> Result<Certificate, CertError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut last_line = 0usize;
    let mut next = |what: &str| -> Result<(usize, &str), CertError> {
        match lines.next() {
            Some((no, l)) => {
                last_line = no;
                Ok((no, l))
            }
            None => Err(CertError::Parse {
                line: last_line + 1,
                msg: format!("unexpected end of file, expected {what}"),
            }),
        }
    };

    let (no, magic) = next("the header")?;
    if magic != "TURAN-CERT v1" {
        return Err(CertError::Parse {
            line: no,
            msg: format!("expected `TURAN-CERT v1`, found `{magic}`"),
        });
    }

    fn keyword_line<'a>(no: usize, line: &'a str, key: &str) -> Result<&'a str, CertError> {
        match line.split_once(char::is_whitespace) {
            Some((k, rest)) if k == key => Ok(rest.trim()),
            _ => Err(CertError::Parse {
                line: no,
                msg: format!("expected `{key} <value>`, found `{line}`"),
            }),
        }
    }

    let (no, line) = next("`n <order>`")?;
    let n: usize = keyword_line(no, line, "n")?
        .parse()
        .map_err(|e| CertError::Parse {
            line: no,
            msg: format!("invalid order: {e}"),
        })?;

    let (no, line) = next("`discriminant <d>`")?;
    let discriminant: u64 = keyword_line(no, line, "discriminant")?
        .parse()
        .map_err(|e| CertError::Parse {
            line: no,
            msg: format!("invalid discriminant: {e}"),
        })?;

    let in_field = |no: usize, e: &FieldElement| -> Result<(), CertError> {
        if e.discriminant() != 0 && e.discriminant() != discriminant {
            return Err(CertError::Parse {
                line: no,
                msg: format!(
                    "element of ℚ[√{}] in a certificate over ℚ[√{discriminant}]",
                    e.discriminant()
                ),
            });
        }
        Ok(())
    };

    let (no, line) = next("`bound <element>`")?;
    let bound: FieldElement =
        keyword_line(no, line, "bound")?
            .parse()
            .map_err(|e| CertError::Parse {
                line: no,
                msg: format!("invalid bound: {e}"),
            })?;
    in_field(no, &bound)?;

    let (no, line) = next("`family <count>`")?;
    let member_count: usize = keyword_line(no, line, "family")?
        .parse()
        .map_err(|e| CertError::Parse {
            line: no,
            msg: format!("invalid member count: {e}"),
        })?;
    let mut members = Vec::with_capacity(member_count);
    for _ in 0..member_count {
        let (no, line) = next("a family member")?;
        let member: FamilyMember = line.parse().map_err(|e| CertError::Parse {
            line: no,
            msg: format!("invalid family member: {e}"),
        })?;
        members.push(member);
    }
    let family = Family::new(members);

    let mut blocks: Vec<CertBlock> = Vec::new();
    while let Some((no, line)) = lines.next() {
        last_line = no;
        let mut it = line.split_whitespace();
        let header_err = || CertError::Parse {
            line: no,
            msg: format!("expected `block <type> <dimension>`, found `{line}`"),
        };
        if it.next() != Some("block") {
            return Err(header_err());
        }
        let type_index: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| header_err())?;
        let dim: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| header_err())?;
        if it.next().is_some() {
            return Err(header_err());
        }
        if dim == 0 {
            return Err(CertError::Parse {
                line: no,
                msg: format!("block {type_index} has dimension 0"),
            });
        }
        if blocks.iter().any(|b| b.type_index == type_index) {
            return Err(CertError::Parse {
                line: no,
                msg: format!("duplicate block for type {type_index}"),
            });
        }
        let mut entries = vec![FieldElement::zero(); dim * dim];
        for i in 0..dim {
            let (no, line) = match lines.next() {
                Some((no, l)) => (no, l),
                None => {
                    return Err(CertError::Parse {
                        line: last_line + 1,
                        msg: format!(
                            "unexpected end of file in block {type_index}: row {} of {dim} missing",
                            i + 1
                        ),
                    })
                }
            };
            last_line = no;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != i + 1 {
                return Err(CertError::Parse {
                    line: no,
                    msg: format!(
                        "block {type_index} (dimension {dim}): row {} must have {} entries, found {}",
                        i + 1,
                        i + 1,
                        tokens.len()
                    ),
                });
            }
            for (j, tok) in tokens.iter().enumerate() {
                let e: FieldElement = tok.parse().map_err(|err| CertError::Parse {
                    line: no,
                    msg: format!("invalid entry `{tok}`: {err}"),
                })?;
                in_field(no, &e)?;
                entries[i * dim + j] = e.clone();
                entries[j * dim + i] = e;
            }
        }
        blocks.push(CertBlock {
            type_index,
            dim,
            entries,
        });
    }

    Ok(Certificate {
        n,
        family,
        discriminant,
        bound,
        blocks,
    })
}

// ---------------------------------------------------------------------------
// The exact slack engine shared by verification and rounding.
// ---------------------------------------------------------------------------

fn big_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let zero = BigInt::default();
    let mut a = a.clone();
    let mut b = b.clone();
    while b != zero {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn big_lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a / big_gcd(a, b) * b
}

/// A certificate block with denominators cleared: `Q = (R + S·√d) / denom`
/// entrywise, with `R`, `S` integer matrices.  Slack accumulation then only
/// needs integer dot products against the pair-count matrices.
struct BlockNums {
    denom: BigInt,
    rat: Vec<BigInt>,
    surd: Vec<BigInt>,
    any_surd: bool,
}

fn block_nums(block: &CertBlock, d: u64) -> Result<BlockNums, CertError> {
    let mut denom = BigInt::from(1u32);
    for e in &block.entries {
        if e.discriminant() != 0 && e.discriminant() != d {
            return Err(CertError::DiscriminantMismatch {
                expected: d,
                got: e.discriminant(),
            });
        }
        denom = big_lcm(&denom, e.rational_part().denom());
        denom = big_lcm(&denom, e.surd_part().denom());
    }
    let mut any_surd = false;
    let mut rat = Vec::with_capacity(block.entries.len());
    let mut surd = Vec::with_capacity(block.entries.len());
    for e in &block.entries {
        rat.push(e.rational_part().numer() * (&denom / e.rational_part().denom()));
        let s = e.surd_part().numer() * (&denom / e.surd_part().denom());
        if s != BigInt::default() {
            any_surd = true;
        }
        surd.push(s);
    }
    Ok(BlockNums {
        denom,
        rat,
        surd,
        any_surd,
    })
}

/// Precomputed exact data for slack evaluation: the census, the flag context,
/// and the pair-density matrices of every census graph for a fixed list of
/// types (one per candidate block, in block order).
struct Engine<'a> {
    census: &'a [ThreeGraph],
    discriminant: u64,
    bound: &'a FieldElement,
    densities: Vec<Vec<PairDensities>>,
}

enum Attempt {
    Valid(Vec<FieldElement>),
    BadPivot { type_index: usize, failure: PsdFailure },
    BadSlack { graph_index: usize, slack: FieldElement },
}

impl<'a> Engine<'a> {
    fn new(
        census: &'a [ThreeGraph],
        ctx: &FlagContext,
        type_indices: &[usize],
        bound: &'a FieldElement,
        discriminant: u64,
    ) -> Result<Engine<'a>, CertError> {
        let densities = census
            .par_iter()
            .map(|h| {
                type_indices
                    .iter()
                    .map(|&ti| pair_density_matrix(&ctx.sets[ti], h))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Engine {
            census,
            discriminant,
            bound,
            densities,
        })
    }

    /// Exact LDLᵀ on every block; the first failure is returned with its
    /// owning type.
    fn psd_failure(
        &self,
        blocks: &[CertBlock],
    ) -> Result<Option<(usize, PsdFailure)>, CertError> {
        for block in blocks {
            if let Err(failure) = ldlt(block.dim, &block.entries) {
                if let PsdFailure::Field(e) = failure {
                    return Err(CertError::Field(e));
                }
                return Ok(Some((block.type_index, failure)));
            }
        }
        Ok(None)
    }

    /// The exact slack of every census graph, in census order, with no sign
    /// check; `blocks` must align positionally with the engine's density
    /// tables.
    fn slack_vector(&self, blocks: &[CertBlock]) -> Result<Vec<FieldElement>, CertError> {
        let nums: Vec<BlockNums> = blocks
            .iter()
            .map(|b| block_nums(b, self.discriminant))
            .collect::<Result<_, _>>()?;
        let slacks: Vec<FieldElement> = self
            .census
            .par_iter()
            .enumerate()
            .map(|(hi, h)| {
                let mut s = self
                    .bound
                    .try_sub(&FieldElement::from_rational(h.edge_density()))?;
                for (bi, bn) in nums.iter().enumerate() {
                    let pd = &self.densities[hi][bi];
                    let counts = pd.counts();
                    let mut dr = BigInt::default();
                    let mut ds = BigInt::default();
                    for (idx, &cnt) in counts.iter().enumerate() {
                        if cnt == 0 {
                            continue;
                        }
                        dr += &bn.rat[idx] * cnt;
                        if bn.any_surd {
                            ds += &bn.surd[idx] * cnt;
                        }
                    }
                    let zero = BigInt::default();
                    if dr == zero && ds == zero {
                        continue;
                    }
                    let full = &bn.denom * pd.total();
                    let val = FieldElement::new(
                        Rational::new(dr, full.clone()),
                        Rational::new(ds, full),
                        self.discriminant,
                    );
                    s = s.try_sub(&val)?;
                }
                Ok::<FieldElement, CertError>(s)
            })
            .collect::<Result<_, _>>()?;
        Ok(slacks)
    }

    /// PSD-checks every block, then computes every slack; the worst slack
    /// violation is reported rather than the first.
    fn check(&self, blocks: &[CertBlock]) -> Result<Attempt, CertError> {
        if let Some((type_index, failure)) = self.psd_failure(blocks)? {
            return Ok(Attempt::BadPivot {
                type_index,
                failure,
            });
        }
        let slacks = self.slack_vector(blocks)?;
        if let Some(w) = worst_negative(&slacks) {
            return Ok(Attempt::BadSlack {
                graph_index: w,
                slack: slacks[w].clone(),
            });
        }
        Ok(Attempt::Valid(slacks))
    }
}

/// Index of the most negative entry, if any entry is negative.
fn worst_negative(slacks: &[FieldElement]) -> Option<usize> {
    let mut worst: Option<usize> = None;
    for (i, s) in slacks.iter().enumerate() {
        if s.sign() < 0 {
            let beat = match worst {
                None => true,
                Some(w) => matches!(s.try_cmp(&slacks[w]), Some(std::cmp::Ordering::Less)),
            };
            if beat {
                worst = Some(i);
            }
        }
    }
    worst
}

/// Structural validation of blocks against the context: known type, matching
/// dimension, no duplicates, symmetric entries.
fn validate_blocks(blocks: &[CertBlock], ctx: &FlagContext) -> Result<(), CertError> {
    let mut seen = vec![false; ctx.sets.len()];
    for block in blocks {
        let set = ctx
            .sets
            .get(block.type_index)
            .ok_or(CertError::UnknownType {
                type_index: block.type_index,
                type_count: ctx.sets.len(),
            })?;
        if seen[block.type_index] {
            return Err(CertError::DuplicateBlock {
                type_index: block.type_index,
            });
        }
        seen[block.type_index] = true;
        if block.dim != set.dim() {
            return Err(CertError::DimensionMismatch {
                type_index: block.type_index,
                expected: set.dim(),
                got: block.dim,
            });
        }
        assert_eq!(block.entries.len(), block.dim * block.dim);
        for i in 0..block.dim {
            for j in (i + 1)..block.dim {
                if block.get(i, j) != block.get(j, i) {
                    return Err(CertError::AsymmetricBlock {
                        type_index: block.type_index,
                        i,
                        j,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Verifies a certificate with exact arithmetic only.
///
/// Succeeds iff every block passes the exact LDLᵀ positive-semidefiniteness
/// test and every admissible graph satisfies the bound inequality exactly;
/// returns the per-graph slacks and the sharp (zero-slack) set.
pub fn verify_certificate(cert: &Certificate) -> Result<SlackReport, CertError> {
    let census = enumerate_admissible(&cert.family, cert.n)?;
    let ctx = build_context(&cert.family, cert.n, &census)?;
    validate_blocks(&cert.blocks, &ctx)?;
    if cert.bound.discriminant() != 0 && cert.bound.discriminant() != cert.discriminant {
        return Err(CertError::DiscriminantMismatch {
            expected: cert.discriminant,
            got: cert.bound.discriminant(),
        });
    }
    let types: Vec<usize> = cert.blocks.iter().map(|b| b.type_index).collect();
    let engine = Engine::new(&census, &ctx, &types, &cert.bound, cert.discriminant)?;
    match engine.check(&cert.blocks)? {
        Attempt::Valid(slacks) => {
            let sharp_set: Vec<ThreeGraph> = census
                .iter()
                .zip(&slacks)
                .filter(|(_, s)| s.is_zero())
                .map(|(h, _)| h.clone())
                .collect();
            Ok(SlackReport {
                slacks: census.into_iter().zip(slacks).collect(),
                sharp_set,
            })
        }
        Attempt::BadPivot {
            type_index,
            failure,
        } => Err(CertError::NotPsd {
            type_index,
            detail: failure.to_string(),
        }),
        Attempt::BadSlack { graph_index, slack } => Err(CertError::SlackViolation {
            graph: census[graph_index].to_string(),
            violation: (-&slack).to_string(),
        }),
    }
}

/// The zero-slack graphs of a verifying certificate, canonical-sorted.
pub fn sharp_graphs(cert: &Certificate) -> Result<Vec<ThreeGraph>, CertError> {
    Ok(verify_certificate(cert)?.sharp_set)
}

// ---------------------------------------------------------------------------
// Rounding.
// ---------------------------------------------------------------------------

/// One numeric PSD block from an SDP solution, row-major `dim × dim`.
#[derive(Clone, Debug)]
pub struct NumericBlock {
    pub type_index: usize,
    pub dim: usize,
    pub entries: Vec<f64>,
}

/// The fixed shrinking schedule of identity shifts tried when a rounded
/// block has a slightly negative pivot: `Q + ε·I` restores positive
/// semidefiniteness at the cost of slack, so smaller ε is tried as well.
const EPSILON_SHIFTS: [(i64, i64); 6] = [
    (0, 1),
    (1, 1_000),
    (1, 100_000),
    (1, 10_000_000),
    (1, 1_000_000_000),
    (1, 100_000_000_000),
];

/// The nearest fraction with the given denominator (not reduced here; the
/// rational constructor reduces).
fn snap_rational_fixed(x: f64, den: u64) -> Rational {
    let num = (x * den as f64).round();
    // f64 → i128 is exact for every plausible magnitude here.
    Rational::new(BigInt::from(num as i128), BigInt::from(den))
}

/// Snaps one numeric value into ℚ[√d] at a fixed denominator: the nearer of
/// `round(x·D)/D` and `round(x·D/√d)/D·√d` (generation over a quadratic
/// field is best-effort; verification is exact regardless).  A shared
/// denominator keeps every cleared-denominator integer small, which is what
/// makes the exact slack and LDLᵀ arithmetic fast.
fn snap_entry(x: f64, d: u64, den: u64) -> FieldElement {
    if x.abs() < 1e-12 {
        return FieldElement::zero();
    }
    let r = FieldElement::from_rational(snap_rational_fixed(x, den));
    if d == 0 {
        return r;
    }
    let s = FieldElement::new(
        turan_field::rat(0, 1),
        snap_rational_fixed(x / (d as f64).sqrt(), den),
        d,
    );
    if (s.to_f64() - x).abs() < (r.to_f64() - x).abs() {
        s
    } else {
        r
    }
}

/// Rounds a numeric SDP solution to an exact certificate at the given target
/// bound.
///
/// Entries are rationalized with each denominator limit from
/// `denominator_schedule` in turn; when the exact LDLᵀ test finds a slightly
/// negative pivot, a rational multiple of the identity from a fixed
/// shrinking schedule is added and the slacks are re-checked.  The first
/// candidate that verifies completely is returned; if none does, the error
/// reports the worst slack and worst pivot seen.
pub fn round_solution(
    family: &Family,
    n: usize,
    blocks: &[NumericBlock],
    target_bound: &FieldElement,
    denominator_schedule: &[u64],
) -> Result<Certificate, CertError> {
    let census = enumerate_admissible(family, n)?;
    let ctx = build_context(family, n, &census)?;
    let discriminant = target_bound.discriminant();

    // Structural checks on the numeric input.
    let mut seen = vec![false; ctx.sets.len()];
    for b in blocks {
        let set = ctx.sets.get(b.type_index).ok_or(CertError::UnknownType {
            type_index: b.type_index,
            type_count: ctx.sets.len(),
        })?;
        if seen[b.type_index] {
            return Err(CertError::DuplicateBlock {
                type_index: b.type_index,
            });
        }
        seen[b.type_index] = true;
        if b.dim != set.dim() || b.entries.len() != b.dim * b.dim {
            return Err(CertError::DimensionMismatch {
                type_index: b.type_index,
                expected: set.dim(),
                got: b.dim,
            });
        }
        for i in 0..b.dim {
            for j in (i + 1)..b.dim {
                if (b.entries[i * b.dim + j] - b.entries[j * b.dim + i]).abs() > 1e-6 {
                    return Err(CertError::NumericAsymmetry {
                        type_index: b.type_index,
                        i,
                        j,
                    });
                }
            }
        }
    }

    let types: Vec<usize> = blocks.iter().map(|b| b.type_index).collect();
    let engine = Engine::new(&census, &ctx, &types, target_bound, discriminant)?;
    let mut diag = Diagnosis::default();

    // Pass 1: entrywise fixed-denominator snapping, with a shrinking
    // identity-shift ladder when the snapped block barely misses PSD.
    for &den in denominator_schedule {
        let rounded: Vec<CertBlock> = blocks
            .iter()
            .map(|b| {
                let mut entries = vec![FieldElement::zero(); b.dim * b.dim];
                for i in 0..b.dim {
                    for j in i..b.dim {
                        let avg = 0.5 * (b.entries[i * b.dim + j] + b.entries[j * b.dim + i]);
                        let e = snap_entry(avg, discriminant, den);
                        entries[i * b.dim + j] = e.clone();
                        entries[j * b.dim + i] = e;
                    }
                }
                CertBlock {
                    type_index: b.type_index,
                    dim: b.dim,
                    entries,
                }
            })
            .collect();

        for (eps_num, eps_den) in EPSILON_SHIFTS {
            let candidate = if eps_num == 0 {
                rounded.clone()
            } else {
                let eps = FieldElement::from_rational(turan_field::rat(eps_num, eps_den));
                let mut shifted = rounded.clone();
                for b in &mut shifted {
                    for i in 0..b.dim {
                        let v = b.entries[i * b.dim + i].try_add(&eps)?;
                        b.entries[i * b.dim + i] = v;
                    }
                }
                shifted
            };
            // Slacks first: they are much cheaper than the exact LDLᵀ, and
            // once the unshifted candidate fails on slack no shift helps
            // (shifts only lower slacks further).
            let slacks = engine.slack_vector(&candidate)?;
            if let Some(w) = worst_negative(&slacks) {
                diag.note_slack(&slacks[w]);
                if eps_num == 0 {
                    break;
                }
                continue;
            }
            match engine.psd_failure(&candidate)? {
                None => {
                    return Ok(Certificate {
                        n,
                        family: family.clone(),
                        discriminant,
                        bound: target_bound.clone(),
                        blocks: candidate,
                    });
                }
                Some((_, failure)) => {
                    if let PsdFailure::NegativePivot { pivot, .. } = &failure {
                        diag.note_pivot(pivot);
                    }
                    // A larger identity shift may fix a bad pivot; keep going.
                }
            }
        }
    }

    // Pass 2: at a tight bound the optimal matrices are singular in exact
    // rational directions, and every solution-supported graph needs slack
    // exactly zero — entrywise snapping almost never lands on that face.
    // Recover the face numerically and project onto it exactly.
    if discriminant == 0 {
        if let Some(cert) = projection_pass(
            family,
            n,
            blocks,
            target_bound,
            denominator_schedule,
            &engine,
            &mut diag,
        )? {
            return Ok(cert);
        }
    }

    Err(CertError::Rounding {
        worst_slack: diag.slack.map(|s| s.to_string()),
        worst_pivot: diag.pivot.map(|p| p.to_string()),
    })
}

/// The least-negative slack and pivot seen across all failed attempts — the
/// closest any candidate came to verifying, reported on failure.
#[derive(Default)]
struct Diagnosis {
    slack: Option<FieldElement>,
    pivot: Option<FieldElement>,
}

impl Diagnosis {
    fn note_slack(&mut self, s: &FieldElement) {
        let beat = match &self.slack {
            None => true,
            Some(w) => matches!(s.try_cmp(w), Some(std::cmp::Ordering::Greater)),
        };
        if beat {
            self.slack = Some(s.clone());
        }
    }

    fn note_pivot(&mut self, p: &FieldElement) {
        let beat = match &self.pivot {
            None => true,
            Some(w) => matches!(p.try_cmp(w), Some(std::cmp::Ordering::Greater)),
        };
        if beat {
            self.pivot = Some(p.clone());
        }
    }
}

// ---------------------------------------------------------------------------
// Null-space projection (rounding, pass 2).
// ---------------------------------------------------------------------------

/// An exact rational basis of the complement of one numeric block's
/// near-null space, with denominators cleared: the certificate block is
/// sought as `Q = B·R·Bᵀ / den²` with `R` a small `p × p` rational matrix,
/// which makes `Q` exactly singular along the recovered null directions and
/// reduces positive semidefiniteness of `Q` to that of `R`.
struct BlockBasis {
    dim: usize,
    /// Number of basis vectors (the compressed dimension).
    p: usize,
    /// `p` integer vectors of length `dim` (rows), linearly independent.
    vecs: Vec<Vec<BigInt>>,
    /// Shared denominator of the basis vectors.
    den: BigInt,
    /// The numeric solution block compressed onto the basis, `p × p`
    /// row-major: `G⁻¹·Bᵀ·A·B·G⁻¹` with `G = Bᵀ·B`.
    r_num: Vec<f64>,
}

impl BlockBasis {
    fn identity(dim: usize, sym: &[f64]) -> BlockBasis {
        BlockBasis {
            dim,
            p: dim,
            vecs: (0..dim)
                .map(|i| (0..dim).map(|j| BigInt::from(u32::from(i == j))).collect())
                .collect(),
            den: BigInt::from(1u32),
            r_num: sym.to_vec(),
        }
    }
}

fn round_debug() -> bool {
    std::env::var_os("TURAN_ROUND_DEBUG").is_some()
}

/// Recovers the near-null space of a symmetric numeric matrix, snaps it to
/// small rationals, and returns an exact basis of its complement together
/// with the compressed numeric block.  Eigenvalues at most `null_tol`
/// (relative to the largest) count as zero.  Falls back to the identity
/// basis (no compression) when the null space does not snap cleanly.
fn extract_basis(sym: &[f64], dim: usize, null_tol: f64) -> BlockBasis {
    if dim == 0 {
        return BlockBasis {
            dim: 0,
            p: 0,
            vecs: Vec::new(),
            den: BigInt::from(1u32),
            r_num: Vec::new(),
        };
    }
    let (values, vectors) = round::jacobi_eigen(dim, sym);
    let lmax = values.iter().cloned().fold(0.0_f64, f64::max);
    let tol = null_tol.max(null_tol * lmax);
    if round_debug() {
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.truncate(8);
        eprintln!("round: dim {dim}: lowest eigenvalues {sorted:?}");
    }
    let null_rows: Vec<Vec<f64>> = values
        .iter()
        .zip(vectors.iter())
        .filter(|(v, _)| v.abs() <= tol)
        .map(|(_, vec)| vec.clone())
        .collect();
    if null_rows.is_empty() {
        return BlockBasis::identity(dim, sym);
    }
    let rref = round::float_rref(null_rows);
    if round_debug() && dim < 16 {
        for row in &rref {
            let shown: Vec<String> = row.iter().map(|x| format!("{x:.9}")).collect();
            eprintln!("round: dim {dim}: null row [{}]", shown.join(", "));
        }
    }
    // Keep only the null directions that snap to clean small rationals; a
    // dropped direction merely stays in the complement, where a small
    // identity shift can absorb it later.
    let null_exact: Vec<Vec<Rational>> = rref
        .iter()
        .filter_map(|row| round::snap_rational_vector(row, 1e-5, 128))
        .collect();
    if null_exact.is_empty() {
        return BlockBasis::identity(dim, sym);
    }
    let kernel = round::kernel_basis(&null_exact, dim);
    if kernel.is_empty() {
        // The block is forced to zero outright.
        return BlockBasis {
            dim,
            p: 0,
            vecs: Vec::new(),
            den: BigInt::from(1u32),
            r_num: Vec::new(),
        };
    }
    let p = kernel.len();
    // Numeric copy of the basis, column-major as a dim × p matrix.
    let mut bf = vec![0.0_f64; dim * p];
    let mut bft = vec![0.0_f64; p * dim];
    for (a, v) in kernel.iter().enumerate() {
        for (i, e) in v.iter().enumerate() {
            let x = round::bigrational_to_f64(e);
            bf[i * p + a] = x;
            bft[a * dim + i] = x;
        }
    }
    // R = G⁻¹·(Bᵀ·A·B)·G⁻¹ with G = Bᵀ·B, the least-squares compression of
    // the numeric block onto the basis subspace.
    let t = round::mat_mul_f64(sym, &bf, dim, dim, p);
    let y = round::mat_mul_f64(&bft, &t, p, dim, p);
    let g = round::mat_mul_f64(&bft, &bf, p, dim, p);
    let Some(s) = round::solve_f64(&g, &y, p, p) else {
        return BlockBasis::identity(dim, sym);
    };
    let mut st = vec![0.0_f64; p * p];
    for a in 0..p {
        for b in 0..p {
            st[b * p + a] = s[a * p + b];
        }
    }
    let Some(w) = round::solve_f64(&g, &st, p, p) else {
        return BlockBasis::identity(dim, sym);
    };
    let mut r_num = vec![0.0_f64; p * p];
    for a in 0..p {
        for b in 0..p {
            r_num[a * p + b] = w[b * p + a];
        }
    }
    let (vecs, den) = round::clear_denominators(&kernel);
    if round_debug() {
        let bmax = vecs
            .iter()
            .flatten()
            .map(|v| round::bigrational_to_f64(&Rational::from(v.clone())).abs())
            .fold(0.0_f64, f64::max);
        let rmax = r_num.iter().cloned().fold(0.0_f64, |m, v| m.max(v.abs()));
        eprintln!(
            "round: dim {dim}: p {p}, basis den {den}, max |B int| {bmax:.3e}, max |R| {rmax:.3e}"
        );
    }
    BlockBasis { dim, p, vecs, den, r_num }
}

/// Expands a compressed rational matrix back to a full certificate block:
/// `Q = B·R·Bᵀ / den²`, computed with one shared denominator so the entries
/// stay cheap for the exact slack engine.
fn assemble_block(type_index: usize, basis: &BlockBasis, r: &[Rational]) -> CertBlock {
    let dim = basis.dim;
    let p = basis.p;
    if p == 0 {
        return CertBlock {
            type_index,
            dim,
            entries: vec![FieldElement::zero(); dim * dim],
        };
    }
    let mut rden = BigInt::from(1u32);
    for e in r {
        rden = big_lcm(&rden, e.denom());
    }
    let rn: Vec<BigInt> = r
        .iter()
        .map(|e| e.numer() * (&rden / e.denom()))
        .collect();
    // T = R·B (p × dim), then Q = Bᵀ·T (dim × dim).
    let mut t = vec![BigInt::default(); p * dim];
    for a in 0..p {
        for b in 0..p {
            let c = &rn[a * p + b];
            if *c == BigInt::default() {
                continue;
            }
            for j in 0..dim {
                let v = &basis.vecs[b][j];
                if *v != BigInt::default() {
                    t[a * dim + j] += c * v;
                }
            }
        }
    }
    let full = &rden * &basis.den * &basis.den;
    let mut entries = vec![FieldElement::zero(); dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let mut q = BigInt::default();
            for a in 0..p {
                let v = &basis.vecs[a][i];
                if *v != BigInt::default() {
                    q += v * &t[a * dim + j];
                }
            }
            let e = FieldElement::from_rational(Rational::new(q, full.clone()));
            entries[i * dim + j] = e.clone();
            entries[j * dim + i] = e;
        }
    }
    CertBlock {
        type_index,
        dim,
        entries,
    }
}

fn assemble_all(
    blocks: &[NumericBlock],
    bases: &[BlockBasis],
    r: &[Vec<Rational>],
) -> Vec<CertBlock> {
    blocks
        .iter()
        .zip(bases)
        .zip(r)
        .map(|((nb, bb), rb)| assemble_block(nb.type_index, bb, rb))
        .collect()
}

/// One graph's pair-count matrix compressed onto a block basis, as an
/// integer matrix and its denominator: `M = Bᵀ·C·B / (den²·total)`, so that
/// the slack contribution of the block is exactly `⟨R, M⟩`.
fn compressed_density(basis: &BlockBasis, pd: &PairDensities) -> (Vec<BigInt>, BigInt) {
    let dim = basis.dim;
    let p = basis.p;
    if p == 0 {
        return (Vec::new(), BigInt::from(1u32));
    }
    let counts = pd.counts();
    // T = B·C (p × dim): T[a][j] = Σ_i B[a][i]·C[i][j].
    let mut t = vec![BigInt::default(); p * dim];
    for a in 0..p {
        for i in 0..dim {
            let v = &basis.vecs[a][i];
            if *v == BigInt::default() {
                continue;
            }
            for j in 0..dim {
                let c = counts[i * dim + j];
                if c != 0 {
                    t[a * dim + j] += v * c;
                }
            }
        }
    }
    let mut m = vec![BigInt::default(); p * p];
    for a in 0..p {
        for b in 0..p {
            let mut acc = BigInt::default();
            for j in 0..dim {
                let v = &basis.vecs[b][j];
                if *v != BigInt::default() {
                    acc += &t[a * dim + j] * v;
                }
            }
            m[a * p + b] = acc;
        }
    }
    let den = &basis.den * &basis.den * BigInt::from(pd.total());
    (m, den)
}

/// Pass 2 of rounding: compress each block onto the exact complement of its
/// numeric near-null space, snap, then solve a small exact linear system so
/// that every near-tight slack becomes exactly zero.  Restricted to ℚ
/// (`discriminant == 0`), where tight bounds demand exact face membership.
#[allow(clippy::too_many_arguments)]
/// Picks the slack threshold separating "sharp, must be exactly zero" from
/// "genuinely positive". Sharp graphs cluster at the rounding-noise scale and
/// the rest sit orders of magnitude higher, so the threshold goes in the
/// widest multiplicative gap of the sorted slacks; forcing a genuinely
/// positive slack to zero would drag the matrices far from the solution.
fn adaptive_margin(sorted: &[f64]) -> f64 {
    const CAP: f64 = 0.05;
    const FALLBACK: f64 = 0.01;
    let floor = sorted
        .first()
        .map(|x| (3.0 * x.abs()).max(1e-8))
        .unwrap_or(1e-8);
    let mut best_ratio = 0.0f64;
    let mut best_margin = FALLBACK;
    for w in sorted.windows(2) {
        if w[1] > CAP {
            break;
        }
        let a = w[0].max(floor);
        let b = w[1].max(floor);
        if b / a > best_ratio {
            best_ratio = b / a;
            best_margin = (a * b).sqrt();
        }
    }
    if best_ratio >= 20.0 {
        best_margin
    } else {
        FALLBACK
    }
}

fn projection_pass(
    family: &Family,
    n: usize,
    blocks: &[NumericBlock],
    target_bound: &FieldElement,
    denominator_schedule: &[u64],
    engine: &Engine,
    diag: &mut Diagnosis,
) -> Result<Option<Certificate>, CertError> {
    let symmetrized: Vec<Vec<f64>> = blocks
        .iter()
        .map(|b| {
            let mut sym = vec![0.0_f64; b.dim * b.dim];
            for i in 0..b.dim {
                for j in 0..b.dim {
                    sym[i * b.dim + j] =
                        0.5 * (b.entries[i * b.dim + j] + b.entries[j * b.dim + i]);
                }
            }
            sym
        })
        .collect();
    let dim_max = blocks.iter().map(|b| b.dim as u64).max().unwrap_or(0);

    // Coarse denominators cannot absorb the basis expansion; skip them, but
    // always try at least the finest one.
    let mut dens: Vec<u64> = denominator_schedule
        .iter()
        .copied()
        .filter(|&d| d >= dim_max * dim_max)
        .collect();
    if dens.is_empty() {
        dens.extend(denominator_schedule.last().copied());
    }

    // Interior-point solvers leave "zero" eigenvalues anywhere below about
    // √tolerance when complementarity is degenerate, so the right null
    // cutoff is not knowable in advance; try a ladder, tightest first.
    const NULL_CUTS: [f64; 4] = [1e-6, 1e-5, 1e-4, 1e-3];
    let mut tried: Vec<Vec<usize>> = Vec::new();
    for null_tol in NULL_CUTS {
        let bases: Vec<BlockBasis> = symmetrized
            .iter()
            .zip(blocks)
            .map(|(sym, b)| extract_basis(sym, b.dim, null_tol))
            .collect();
        let signature: Vec<usize> = bases.iter().map(|bb| bb.p).collect();
        if tried.contains(&signature) {
            continue;
        }
        if round_debug() {
            eprintln!(
                "round: null cut {null_tol:.0e} -> compressed dims {signature:?} (full {:?})",
                blocks.iter().map(|b| b.dim).collect::<Vec<_>>()
            );
        }
        tried.push(signature);
        if let Some(cert) = projection_attempt(
            family,
            n,
            blocks,
            target_bound,
            &dens,
            engine,
            diag,
            &bases,
        )? {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

/// Runs the denominator schedule for one fixed set of block bases.
#[allow(clippy::too_many_arguments)]
fn projection_attempt(
    family: &Family,
    n: usize,
    blocks: &[NumericBlock],
    target_bound: &FieldElement,
    dens: &[u64],
    engine: &Engine,
    diag: &mut Diagnosis,
    bases: &[BlockBasis],
) -> Result<Option<Certificate>, CertError> {
    // Pair densities compressed onto the bases, computed lazily per graph.
    let mut mat_cache: std::collections::HashMap<usize, Vec<(Vec<BigInt>, BigInt)>> =
        std::collections::HashMap::new();
    // Rational identity shifts tried at the compressed level: a dropped or
    // undetected junk null direction leaves a near-zero eigenvalue that the
    // slack correction can tip negative; a small shift gives it margin, and
    // re-solving the correction afterwards keeps the tight slacks exactly
    // zero.
    const COMPRESSED_SHIFTS: [(i64, i64); 6] = [
        (0, 1),
        (1, 1_000_000),
        (1, 100_000),
        (1, 10_000),
        (1, 1_000),
        (1, 100),
    ];

    for &den in dens {
        // Snap the compressed blocks at the fixed denominator.
        let r0: Vec<Vec<Rational>> = bases
            .iter()
            .map(|bb| {
                let mut r = vec![turan_field::rat(0, 1); bb.p * bb.p];
                for a in 0..bb.p {
                    for b in a..bb.p {
                        let avg = 0.5 * (bb.r_num[a * bb.p + b] + bb.r_num[b * bb.p + a]);
                        let v = if avg.abs() < 1e-12 {
                            turan_field::rat(0, 1)
                        } else {
                            snap_rational_fixed(avg, den)
                        };
                        r[a * bb.p + b] = v.clone();
                        r[b * bb.p + a] = v;
                    }
                }
                r
            })
            .collect();

        // The sharp set is a property of the solution, not of the diagonal
        // shift, so membership is decided once per denominator from the
        // unshifted slacks and reused as the shift ladder climbs.
        let mut fixed_tight: Option<Vec<usize>> = None;
        for (eps_num, eps_den) in COMPRESSED_SHIFTS {
            let mut base = r0.clone();
            if eps_num != 0 {
                let eps = turan_field::rat(eps_num, eps_den);
                for (bb, r) in bases.iter().zip(base.iter_mut()) {
                    for a in 0..bb.p {
                        r[a * bb.p + a] += &eps;
                    }
                }
            }
            let c_base = assemble_all(blocks, bases, &base);
            let slacks = engine.slack_vector(&c_base)?;
            let tight: Vec<usize> = match &fixed_tight {
                Some(t) => t.clone(),
                None => {
                    let mut sorted: Vec<f64> = slacks.iter().map(|s| s.to_f64()).collect();
                    sorted.sort_by(f64::total_cmp);
                    let margin = adaptive_margin(&sorted);
                    let t: Vec<usize> = slacks
                        .iter()
                        .enumerate()
                        .filter(|(_, s)| s.to_f64() < margin)
                        .map(|(i, _)| i)
                        .collect();
                    if round_debug() {
                        let shown: Vec<String> = sorted
                            .iter()
                            .take(12)
                            .map(|x| format!("{x:.3e}"))
                            .collect();
                        eprintln!(
                            "round: den {den}: {} tight slacks at margin {margin:.2e}, lowest [{}]",
                            t.len(),
                            shown.join(", ")
                        );
                    }
                    fixed_tight = Some(t.clone());
                    t
                }
            };

            let (r1, c1, s1) = if tight.is_empty() {
                (base, c_base, slacks)
            } else {
                let missing: Vec<usize> = tight
                    .iter()
                    .copied()
                    .filter(|h| !mat_cache.contains_key(h))
                    .collect();
                let fresh: Vec<(usize, Vec<(Vec<BigInt>, BigInt)>)> = missing
                    .par_iter()
                    .map(|&h| {
                        let mats = bases
                            .iter()
                            .enumerate()
                            .map(|(bi, bb)| compressed_density(bb, &engine.densities[h][bi]))
                            .collect();
                        (h, mats)
                    })
                    .collect();
                mat_cache.extend(fresh);
                let mats: Vec<&Vec<(Vec<BigInt>, BigInt)>> =
                    tight.iter().map(|h| &mat_cache[h]).collect();
                // Gram matrix of the density profiles and the slack targets:
                // the least-norm correction ΔR = Σ_t μ_t·M_t zeroes every
                // tight slack.
                let t = tight.len();
                let mut g = vec![vec![turan_field::rat(0, 1); t]; t];
                for i in 0..t {
                    for j in i..t {
                        let mut acc = turan_field::rat(0, 1);
                        for bi in 0..bases.len() {
                            let (mi, di) = &mats[i][bi];
                            let (mj, dj) = &mats[j][bi];
                            if mi.is_empty() {
                                continue;
                            }
                            let mut dot = BigInt::default();
                            for k in 0..mi.len() {
                                if mi[k] != BigInt::default() && mj[k] != BigInt::default() {
                                    dot += &mi[k] * &mj[k];
                                }
                            }
                            if dot != BigInt::default() {
                                acc += Rational::new(dot, di * dj);
                            }
                        }
                        g[i][j] = acc.clone();
                        g[j][i] = acc;
                    }
                }
                let rhs: Vec<Rational> = tight
                    .iter()
                    .map(|&h| slacks[h].rational_part().clone())
                    .collect();
                let Some(mu) = round::solve_rational_system(g, rhs) else {
                    if round_debug() {
                        eprintln!("round: den {den}: tight-slack system inconsistent");
                    }
                    continue;
                };
                if round_debug() {
                    let mumax = mu
                        .iter()
                        .map(|c| round::bigrational_to_f64(c).abs())
                        .fold(0.0f64, f64::max);
                    eprintln!(
                        "round: den {den}, shift {eps_num}/{eps_den}: max |mu| {mumax:.3e}"
                    );
                }
                let mut r1 = base.clone();
                for (ti, coeff) in mu.iter().enumerate() {
                    if *coeff == turan_field::rat(0, 1) {
                        continue;
                    }
                    for bi in 0..bases.len() {
                        let (mn, d) = &mats[ti][bi];
                        for (k, num) in mn.iter().enumerate() {
                            if *num != BigInt::default() {
                                r1[bi][k] += coeff * Rational::new(num.clone(), d.clone());
                            }
                        }
                    }
                }
                if round_debug() {
                    for (bi, bb) in bases.iter().enumerate() {
                        if bb.p == 0 {
                            continue;
                        }
                        let delta: f64 = r1[bi]
                            .iter()
                            .zip(&base[bi])
                            .map(|(a, b)| round::bigrational_to_f64(&(a - b)).abs())
                            .fold(0.0f64, f64::max);
                        let floats: Vec<f64> =
                            r1[bi].iter().map(round::bigrational_to_f64).collect();
                        let (evals, _) = round::jacobi_eigen(bb.p, &floats);
                        let lo = evals.iter().copied().fold(f64::INFINITY, f64::min);
                        if lo < 1e-3 {
                            eprintln!(
                                "round:   block {bi}: max |dR| {delta:.3e}, min eig(R1) {lo:.3e}"
                            );
                        }
                    }
                }
                let c1 = assemble_all(blocks, bases, &r1);
                let s1 = engine.slack_vector(&c1)?;
                (r1, c1, s1)
            };

            // Positive semidefiniteness at the compressed level: for a basis
            // of full column rank, `B·R·Bᵀ ⪰ 0` exactly when `R ⪰ 0`, and
            // `R` is far smaller.
            let mut all_psd = true;
            for (bi, bb) in bases.iter().enumerate() {
                if bb.p == 0 {
                    continue;
                }
                let fe_entries: Vec<FieldElement> = r1[bi]
                    .iter()
                    .map(|q| FieldElement::from_rational(q.clone()))
                    .collect();
                match ldlt(bb.p, &fe_entries) {
                    Ok(_) => {}
                    Err(PsdFailure::Field(e)) => return Err(CertError::Field(e)),
                    Err(failure) => {
                        if round_debug() {
                            eprintln!(
                                "round: den {den}, shift {eps_num}/{eps_den}: block {bi} (compressed dim {}) not PSD: {}",
                                bb.p,
                                match &failure {
                                    PsdFailure::NegativePivot { index, pivot } =>
                                        format!("pivot {:.3e} at k={index}", pivot.to_f64()),
                                    other => other.to_string(),
                                }
                            );
                            let floats: Vec<f64> =
                                r1[bi].iter().map(round::bigrational_to_f64).collect();
                            if let PsdFailure::NegativePivot { index, .. } = &failure {
                                let k = index + 1;
                                let sub: Vec<f64> = (0..k)
                                    .flat_map(|i| (0..k).map(move |j| (i, j)))
                                    .map(|(i, j)| floats[i * bb.p + j])
                                    .collect();
                                let (mut se, _) = round::jacobi_eigen(k, &sub);
                                se.sort_by(f64::total_cmp);
                                eprintln!(
                                    "round:   leading {k}x{k} minor min eig {:.3e}",
                                    se.first().copied().unwrap_or(f64::NAN)
                                );
                            }
                            let (mut evals, _) = round::jacobi_eigen(bb.p, &floats);
                            evals.sort_by(f64::total_cmp);
                            let shown: Vec<String> =
                                evals.iter().take(4).map(|x| format!("{x:.3e}")).collect();
                            {
                                use num_traits::{Signed as _, Zero as _};
                                let p = bb.p;
                                let mut mm = r1[bi].clone();
                                let mut bad: Option<(usize, f64)> = None;
                                for k in 0..p {
                                    let piv = mm[k * p + k].clone();
                                    if piv.is_negative() {
                                        bad = Some((k, round::bigrational_to_f64(&piv)));
                                        break;
                                    }
                                    if piv.is_zero() {
                                        continue;
                                    }
                                    for i in (k + 1)..p {
                                        let f = &mm[i * p + k] / &piv;
                                        if f.is_zero() {
                                            continue;
                                        }
                                        for j in (k + 1)..p {
                                            let s = &f * &mm[k * p + j];
                                            mm[i * p + j] = &mm[i * p + j] - &s;
                                        }
                                    }
                                }
                                eprintln!("round:   xcheck independent elimination: {bad:?}");
                            }
                            let asym = (0..bb.p)
                                .flat_map(|i| (0..i).map(move |j| (i, j)))
                                .map(|(i, j)| {
                                    let d = &r1[bi][i * bb.p + j] - &r1[bi][j * bb.p + i];
                                    round::bigrational_to_f64(&d).abs()
                                })
                                .fold(0.0f64, f64::max);
                            eprintln!(
                                "round:   failing block spectrum [{}], asym {asym:.3e}",
                                shown.join(", ")
                            );
                        }
                        if let PsdFailure::NegativePivot { pivot, .. } = &failure {
                            diag.note_pivot(pivot);
                        }
                        all_psd = false;
                        break;
                    }
                }
            }
            if !all_psd {
                continue;
            }
            if let Some(w) = worst_negative(&s1) {
                if round_debug() {
                    eprintln!(
                        "round: den {den}, shift {eps_num}/{eps_den}: residual negative slack {:.3e} on graph {w}",
                        s1[w].to_f64()
                    );
                }
                diag.note_slack(&s1[w]);
                continue;
            }
            return Ok(Some(Certificate {
                n,
                family: family.clone(),
                discriminant: 0,
                bound: target_bound.clone(),
                blocks: c1,
            }));
        }
    }
    Ok(None)
}
