//! Exact arithmetic over ℚ and the real quadratic fields ℚ[√d].
//!
//! Everything downstream that *proves* something (positive semidefiniteness,
//! slack nonnegativity) is built on this crate, so the contract here is strict:
//! values are arbitrary-precision rationals `a + b·√d`, every operation is
//! exact, and comparisons — in particular [`FieldElement::sign`] — are decided
//! by integer arithmetic alone, never by floating point.
//!
//! `d = 0` encodes the pure-rational case (then `b = 0` after normalization),
//! so certificates over ℚ and over ℚ[√d] share one code path. Discriminants are
//! normalized to be square-free: `√12` is stored as `2·√3`, `√9` folds into the
//! rational part.
//!
//! ```
//! use turan_field::FieldElement;
//!
//! // (−1 + √5)/2, the reciprocal golden ratio, is positive…
//! let x: FieldElement = "-1/2+1/2*sqrt(5)".parse().unwrap();
//! assert_eq!(x.sign(), 1);
//! // …and satisfies x² + x = 1 exactly.
//! assert_eq!(&(&x * &x) + &x, FieldElement::one());
//! ```

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number, always in lowest terms with a
/// positive denominator (invariants enforced by `num-rational`).
pub type Rational = num_rational::BigRational;

/// Errors from field arithmetic and parsing.
#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    /// Two operands live in different quadratic fields.
    #[error("mismatched discriminants: sqrt({0}) vs sqrt({1})")]
    DiscriminantMismatch(u64, u64),
    /// Inversion or division by zero.
    #[error("division by zero")]
    DivisionByZero,
    /// `rationalize` was handed a NaN or infinity.
    #[error("non-finite input {0}")]
    NonFinite(f64),
    /// Text did not match the field-element grammar.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Convenience constructor for small rationals.
///
/// # Panics
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0, "zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Formats a rational as `p/q` with the denominator always present
/// (`5` renders as `5/1`), the syntax used in certificate files.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` (signed numerator, mandatory positive denominator).
pub fn parse_rational(s: &str) -> Result<Rational, FieldError> {
    let mut p = Parser::new(s);
    let r = p.fraction()?;
    p.finish()?;
    Ok(r)
}

/// Splits `d` into `(s, f)` with `d = s²·f` and `f` square-free.
fn split_square(d: u64) -> (u64, u64) {
    let (mut s, mut f, mut rem) = (1u64, 1u64, d);
    let mut p = 2u64;
    while p * p <= rem {
        let mut e = 0u32;
        while rem % p == 0 {
            rem /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            f *= p;
        }
        p += 1;
    }
    (s, f * rem)
}

/// An element `a + b·√d` of ℚ[√d], with `d` a square-free non-negative
/// integer. Normal form: `d = 0` whenever `b = 0`, and `d` is never a perfect
/// square (square factors are folded into `b`, and `√1` into `a`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    a: Rational,
    b: Rational,
    d: u64,
}

impl FieldElement {
    /// Builds `a + b·√d`, normalizing the discriminant.
    pub fn new(a: Rational, b: Rational, d: u64) -> FieldElement {
        let (s, f) = split_square(d);
        let b = b * Rational::from_integer(BigInt::from(s));
        if f <= 1 || b.is_zero() {
            // √0 = 0 and √1 = 1 are rational; so is anything with b = 0.
            let a = if f == 1 { a + b } else { a };
            FieldElement { a, b: Rational::zero(), d: 0 }
        } else {
            FieldElement { a, b, d: f }
        }
    }

    pub fn from_rational(a: Rational) -> FieldElement {
        FieldElement { a, b: Rational::zero(), d: 0 }
    }

    pub fn from_int(n: i64) -> FieldElement {
        FieldElement::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// `√d` itself.
    pub fn sqrt_of(d: u64) -> FieldElement {
        FieldElement::new(Rational::zero(), Rational::one(), d)
    }

    pub fn zero() -> FieldElement {
        FieldElement::from_int(0)
    }

    pub fn one() -> FieldElement {
        FieldElement::from_int(1)
    }

    /// Rational part `a`.
    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    /// Coefficient `b` of `√d`.
    pub fn surd_part(&self) -> &Rational {
        &self.b
    }

    /// The (normalized) discriminant; `0` for plain rationals.
    pub fn discriminant(&self) -> u64 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// True iff the element lies in ℚ.
    pub fn is_rational(&self) -> bool {
        self.d == 0
    }

    /// The element as a rational, if it is one.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.d == 0 { Some(&self.a) } else { None }
    }

    /// The discriminant both operands can live in, or an error if they are
    /// genuinely different quadratic fields.
    fn unify_d(&self, other: &FieldElement) -> Result<u64, FieldError> {
        match (self.d, other.d) {
            (0, d) | (d, 0) => Ok(d),
            (x, y) if x == y => Ok(x),
            (x, y) => Err(FieldError::DiscriminantMismatch(x, y)),
        }
    }

    pub fn try_add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        let d = self.unify_d(other)?;
        Ok(FieldElement::new(&self.a + &other.a, &self.b + &other.b, d))
    }

    pub fn try_sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        let d = self.unify_d(other)?;
        Ok(FieldElement::new(&self.a - &other.a, &self.b - &other.b, d))
    }

    pub fn try_mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        let d = self.unify_d(other)?;
        let dr = Rational::from_integer(BigInt::from(d));
        let a = &self.a * &other.a + &self.b * &other.b * &dr;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(FieldElement::new(a, b, d))
    }

    /// Exact multiplicative inverse via the conjugate:
    /// `1/(a+b√d) = (a−b√d)/(a²−b²d)`.
    pub fn try_inv(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let dr = Rational::from_integer(BigInt::from(self.d));
        let norm = &self.a * &self.a - &self.b * &self.b * &dr;
        // For square-free d > 1 the norm vanishes only at zero.
        debug_assert!(!norm.is_zero());
        Ok(FieldElement::new(&self.a / &norm, -(&self.b / &norm), self.d))
    }

    pub fn try_div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.try_mul(&other.try_inv()?)
    }

    /// Exact sign of the real number `a + b√d`, decided without floating
    /// point: by the signs of `a` and `b` alone when they agree, otherwise by
    /// comparing `a²` against `b²·d` (an integer comparison after clearing
    /// denominators, which `Rational::cmp` performs internally).
    pub fn sign(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if self.d == 0 || sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        let lhs = &self.a * &self.a;
        let dr = Rational::from_integer(BigInt::from(self.d));
        let rhs = &self.b * &self.b * dr;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            // Unreachable for square-free d > 1 (it would make √d rational);
            // kept for mathematical completeness.
            Ordering::Equal => 0,
        }
    }

    pub fn abs(&self) -> FieldElement {
        if self.sign() < 0 { -self } else { self.clone() }
    }

    /// Exact comparison; `None` if the operands live in different fields.
    pub fn try_cmp(&self, other: &FieldElement) -> Option<Ordering> {
        let diff = self.try_sub(other).ok()?;
        Some(match diff.sign() {
            s if s < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }

    /// `⌊a + b√d⌋`, computed exactly: a floating-point estimate seeds the
    /// answer and exact sign tests against neighbouring integers correct it.
    pub fn floor(&self) -> BigInt {
        if self.d == 0 {
            return self.a.floor().to_integer();
        }
        let mut n = BigInt::from_f64(self.to_f64().floor()).unwrap_or_else(BigInt::zero);
        let lt_int = |x: &FieldElement, n: &BigInt| {
            x.try_sub(&FieldElement::from_rational(Rational::from_integer(n.clone())))
                .expect("integer is compatible with any field")
                .sign()
                < 0
        };
        while lt_int(self, &n) {
            n -= 1;
        }
        while !lt_int(self, &(&n + BigInt::one())) {
            n += 1;
        }
        n
    }

    /// Floating-point approximation; for reporting and numeric seeding only —
    /// nothing exactness-critical may depend on this.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.d == 0 {
            return a;
        }
        a + self.b.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt()
    }
}

fn sign_of(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &FieldElement) -> Option<Ordering> {
        self.try_cmp(other)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

macro_rules! panicking_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs).expect("field operands share a discriminant")
            }
        }
        impl std::ops::$trait for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
    };
}

panicking_binop!(Add, add, try_add);
panicking_binop!(Sub, sub, try_sub);
panicking_binop!(Mul, mul, try_mul);
panicking_binop!(Div, div, try_div);

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { a: -&self.a, b: -&self.b, d: self.d }
    }
}

impl std::ops::Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl std::iter::Sum for FieldElement {
    fn sum<I: Iterator<Item = FieldElement>>(iter: I) -> FieldElement {
        iter.fold(FieldElement::zero(), |acc, x| &acc + &x)
    }
}

/// Certificate-file syntax: `p/q` or `p/q+r/s*sqrt(d)`, optional sign on
/// either term, denominators mandatory, no whitespace. Examples: `2/9`,
/// `-1/2+3/7*sqrt(5)`, `1/20-1/20*sqrt(13)`.
impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_rational(&self.a))?;
        if self.d != 0 {
            let sign = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{sign}{}*sqrt({})", fmt_rational(&self.b.abs()), self.d)?;
        }
        Ok(())
    }
}

impl FromStr for FieldElement {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<FieldElement, FieldError> {
        let mut p = Parser::new(s);
        let a = p.fraction()?;
        if p.at_end() {
            return Ok(FieldElement::from_rational(a));
        }
        let sign = p.sign_symbol()?;
        let mut b = p.fraction_unsigned()?;
        if sign < 0 {
            b = -b;
        }
        p.expect("*sqrt(")?;
        let d = p.integer_u64()?;
        p.expect(")")?;
        p.finish()?;
        Ok(FieldElement::new(a, b, d))
    }
}

/// Minimal cursor-based parser for the whitespace-free grammar above.
struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Parser<'a> {
        Parser { bytes: s.as_bytes(), pos: 0 }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FieldError> {
        Err(FieldError::Parse { pos: self.pos, msg: msg.into() })
    }

    fn at_end(&self) -> bool {
        self.pos == self.bytes.len()
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn finish(&mut self) -> Result<(), FieldError> {
        if self.at_end() { Ok(()) } else { self.err("trailing characters") }
    }

    fn expect(&mut self, lit: &str) -> Result<(), FieldError> {
        if self.bytes[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            Ok(())
        } else {
            self.err(format!("expected `{lit}`"))
        }
    }

    fn sign_symbol(&mut self) -> Result<i32, FieldError> {
        match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                Ok(1)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-1)
            }
            _ => self.err("expected `+` or `-`"),
        }
    }

    fn digits(&mut self) -> Result<BigInt, FieldError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected digits");
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        Ok(text.parse().unwrap())
    }

    fn integer_u64(&mut self) -> Result<u64, FieldError> {
        let n = self.digits()?;
        n.to_u64().map_or_else(|| self.err("integer out of range"), Ok)
    }

    /// `p/q` with optional leading sign.
    fn fraction(&mut self) -> Result<Rational, FieldError> {
        let sign = match self.peek() {
            Some(b'+') => {
                self.pos += 1;
                1
            }
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            _ => 1,
        };
        let f = self.fraction_unsigned()?;
        Ok(if sign < 0 { -f } else { f })
    }

    /// `p/q`, both unsigned, denominator mandatory and nonzero.
    fn fraction_unsigned(&mut self) -> Result<Rational, FieldError> {
        let p = self.digits()?;
        self.expect("/")?;
        let q = self.digits()?;
        if q.is_zero() {
            return self.err("zero denominator");
        }
        Ok(Rational::new(p, q))
    }
}

/// Best rational approximation to `x` with denominator at most
/// `max_denominator`, via continued-fraction convergents and semiconvergents.
/// The comparison between the two final candidates is exact.
///
/// The input is taken at face value as the exact dyadic rational the double
/// encodes — this is the rounding front door of the certificate pipeline.
pub fn rationalize(x: f64, max_denominator: u64) -> Result<Rational, FieldError> {
    if !x.is_finite() {
        return Err(FieldError::NonFinite(x));
    }
    assert!(max_denominator >= 1, "max_denominator must be at least 1");
    let exact = Rational::from_float(x).expect("finite doubles are rational");
    Ok(best_approximation(&exact, &BigInt::from(max_denominator)))
}

/// Best rational approximation to the rational `x` with denominator bounded
/// by `max_den` (ties broken toward the smaller denominator).
pub fn best_approximation(x: &Rational, max_den: &BigInt) -> Rational {
    if x.denom() <= max_den {
        return x.clone();
    }
    // Continued-fraction state: (p0/q0, p1/q1) are the previous two
    // convergents; (num, den) is the remaining tail with x = [a0; a1, ...].
    let mut p0 = BigInt::one();
    let mut q0 = BigInt::zero();
    let mut p1 = x.numer().div_floor(x.denom());
    let mut q1 = BigInt::one();
    let mut num = x.denom().clone();
    let mut den = x.numer() - &p1 * x.denom();
    loop {
        if den.is_zero() {
            // x itself was reached (cannot happen given the early return, but
            // kept for safety).
            return Rational::new(p1, q1);
        }
        let a = num.div_floor(&den);
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if &q2 > max_den {
            // The full convergent overshoots the denominator bound. The best
            // candidates are the last convergent p1/q1 and the largest
            // admissible semiconvergent (k·p1+p0)/(k·q1+q0).
            let k = (max_den - &q0).div_floor(&q1);
            let semi = Rational::new(&k * &p1 + &p0, &k * &q1 + &q0);
            let conv = Rational::new(p1, q1);
            let err_semi = (x - &semi).abs();
            let err_conv = (x - &conv).abs();
            return match err_semi.cmp(&err_conv) {
                Ordering::Less => semi,
                Ordering::Greater => conv,
                Ordering::Equal => {
                    if semi.denom() < conv.denom() { semi } else { conv }
                }
            };
        }
        let rem = &num - &a * &den;
        num = std::mem::replace(&mut den, rem);
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminant_normalization() {
        // √12 = 2√3.
        let x = FieldElement::new(rat(0, 1), rat(1, 1), 12);
        assert_eq!(x.discriminant(), 3);
        assert_eq!(x.surd_part(), &rat(2, 1));
        // √9 = 3 is rational.
        let y = FieldElement::new(rat(1, 1), rat(2, 1), 9);
        assert!(y.is_rational());
        assert_eq!(y.rational_part(), &rat(7, 1));
        // b = 0 forces d = 0.
        let z = FieldElement::new(rat(4, 3), rat(0, 1), 5);
        assert_eq!(z.discriminant(), 0);
    }

    #[test]
    fn mismatched_discriminants_error() {
        let a = FieldElement::sqrt_of(5);
        let b = FieldElement::sqrt_of(13);
        assert_eq!(a.try_add(&b), Err(FieldError::DiscriminantMismatch(5, 13)));
        // Rationals embed into any quadratic field.
        assert!(a.try_add(&FieldElement::from_int(2)).is_ok());
    }

    #[test]
    fn floor_examples() {
        assert_eq!(FieldElement::sqrt_of(5).floor(), BigInt::from(2));
        assert_eq!((-FieldElement::sqrt_of(5)).floor(), BigInt::from(-3));
        assert_eq!(FieldElement::from_rational(rat(-3, 2)).floor(), BigInt::from(-2));
        assert_eq!(FieldElement::from_rational(rat(3, 2)).floor(), BigInt::from(1));
        // ⌊30·(5−√13)/6⌋ = ⌊6.969…⌋ = 6 — the kind of value weighted blow-ups need.
        let x = FieldElement::new(rat(5, 1), rat(-1, 1), 13)
            .try_mul(&FieldElement::from_rational(rat(30, 6)))
            .unwrap();
        assert_eq!(x.floor(), BigInt::from(6));
    }

    #[test]
    fn display_parse_round_trip() {
        for text in ["2/9", "-35/27", "0/1", "-1/2+3/7*sqrt(5)", "1/20-1/20*sqrt(13)", "5/1"] {
            let x: FieldElement = text.parse().unwrap();
            assert_eq!(x.to_string(), text, "round trip of {text}");
        }
    }

    #[test]
    fn parse_rejects_malformed() {
        for text in ["", "3", "3/", "/4", "1/0", "1/2 + 1/2*sqrt(5)", "1/2+sqrt(5)", "1/2+1/2*sqrt(5)x", "1/2+1/2*sqrt()"] {
            assert!(text.parse::<FieldElement>().is_err(), "{text:?} should not parse");
        }
    }
}
