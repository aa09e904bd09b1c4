//! Exact rationals, rationality-tagged reals, and the high-precision store backing irrationals.
//!
//! A [`Real`] is either an exact [`Rational`] or an irrational carried as a `BigDecimal`
//! at the process working precision. The tag decides every integrality predicate; numeric
//! closeness never does. Irrationals also cache a 128-bit fixed-point image so that
//! `floor(n·x)` and `{n·x}` for large `n` are exact integer operations, with a fallback to
//! the decimal value only when the fixed-point error interval straddles an integer.

use std::cmp::Ordering;
use std::fmt;
use std::num::NonZeroU64;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use bigdecimal::{BigDecimal, Context, RoundingMode};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

pub const DEFAULT_DIGITS: u32 = 50;
pub const MIN_DIGITS: u32 = 30;
pub const MAX_DIGITS: u32 = 400;
/// Extra digits carried beyond the requested precision.
pub const GUARD_DIGITS: u32 = 20;

static DIGITS: AtomicU32 = AtomicU32::new(DEFAULT_DIGITS);

/// Sets the process-wide working precision in significant decimal digits.
pub fn set_precision(digits: u32) -> Result<()> {
    if !(MIN_DIGITS..=MAX_DIGITS).contains(&digits) {
        return Err(Error::InvalidArgument(format!(
            "precision must be in {MIN_DIGITS}..={MAX_DIGITS} digits, got {digits}"
        )));
    }
    DIGITS.store(digits, AtomicOrdering::Relaxed);
    Ok(())
}

pub fn precision() -> u32 {
    DIGITS.load(AtomicOrdering::Relaxed)
}

fn context() -> Context {
    let digits = u64::from(precision() + GUARD_DIGITS);
    Context::default()
        .with_precision(NonZeroU64::new(digits).expect("positive precision"))
        .with_rounding_mode(RoundingMode::HalfEven)
}

fn round(x: BigDecimal) -> BigDecimal {
    context().round_decimal(x)
}

fn big_div(a: &BigDecimal, b: &BigDecimal) -> BigDecimal {
    let ctx = context();
    let wide = ctx.with_prec(u64::from(precision() + 2 * GUARD_DIGITS)).expect("valid precision");
    round(a * b.inverse_with_context(&wide))
}

fn big_floor(x: &BigDecimal) -> BigInt {
    let (digits, scale) = x.with_scale_round(0, RoundingMode::Floor).into_bigint_and_exponent();
    debug_assert_eq!(scale, 0);
    digits
}

fn rational_to_big(q: &Rational) -> BigDecimal {
    big_div(&BigDecimal::from(*q.numer()), &BigDecimal::from(*q.denom()))
}

fn bigint_to_i128(x: &BigInt) -> i128 {
    x.to_i128().expect("integer part exceeds i128")
}

/// `floor(x · 2^128)` split into an integer part and 128 fractional bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fixed {
    pub int: i128,
    pub frac: u128,
}

fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    let (a_hi, a_lo) = (a >> 64, a & u128::from(u64::MAX));
    let (b_hi, b_lo) = (b >> 64, b & u128::from(u64::MAX));
    let ll = a_lo * b_lo;
    let lh = a_lo * b_hi;
    let hl = a_hi * b_lo;
    let hh = a_hi * b_hi;
    let mid = (ll >> 64) + (lh & u128::from(u64::MAX)) + (hl & u128::from(u64::MAX));
    let lo = (ll & u128::from(u64::MAX)) | (mid << 64);
    let hi = hh + (lh >> 64) + (hl >> 64) + (mid >> 64);
    (hi, lo)
}

impl Fixed {
    fn from_big(x: &BigDecimal) -> Fixed {
        let two128 = BigDecimal::from(BigInt::one() << 128usize);
        let scaled = big_floor(&(x * two128));
        let int = &scaled >> 128usize;
        let frac = scaled - (&int << 128usize);
        Fixed { int: bigint_to_i128(&int), frac: frac.to_u128().expect("fraction bits fit u128") }
    }

    /// `floor(n·x)` and the fractional bits of `n·x` computed from the truncated image,
    /// or `None` when the truncation error could move the value across an integer.
    pub fn mul(&self, n: u64) -> Option<(i128, u128)> {
        let (hi, lo) = mul_wide(u128::from(n), self.frac);
        lo.checked_add(u128::from(n))?;
        let floor = self.int.checked_mul(i128::from(n))?.checked_add(hi as i128)?;
        Some((floor, lo))
    }
}

/// An irrational number: decimal value plus cached fast images.
#[derive(Clone, Debug)]
pub struct Irrational {
    value: BigDecimal,
    fixed: Fixed,
    approx: f64,
}

impl Irrational {
    fn new(value: BigDecimal) -> Irrational {
        let value = round(value);
        let fixed = Fixed::from_big(&value);
        let approx = value.to_f64().expect("finite value");
        Irrational { value, fixed, approx }
    }
}

/// A real number whose rationality is part of its type.
#[derive(Clone, Debug)]
pub enum Real {
    Rational(Rational),
    Irrational(Box<Irrational>),
}

impl Real {
    pub fn int(n: i128) -> Real {
        Real::Rational(Rational::from_integer(n))
    }

    pub fn ratio(p: i128, q: i128) -> Real {
        Real::Rational(Rational::new(p, q))
    }

    /// Tags `value` as irrational. The caller vouches for irrationality.
    pub fn irrational(value: BigDecimal) -> Real {
        Real::Irrational(Box::new(Irrational::new(value)))
    }

    /// Parses a decimal string as an irrational value.
    pub fn irrational_str(s: &str) -> Result<Real> {
        let value = BigDecimal::from_str(s.trim())
            .map_err(|e| Error::Parse(format!("bad decimal {s:?}: {e}")))?;
        Ok(Real::irrational(value))
    }

    /// `√k`, rational exactly when `k` is a perfect square.
    pub fn sqrt_int(k: u64) -> Real {
        let r = k.isqrt();
        if r * r == k {
            return Real::int(i128::from(r));
        }
        let v = BigDecimal::from(k).sqrt_with_context(&context()).expect("non-negative");
        Real::irrational(v)
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Real::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Real::Rational(q) => Some(q),
            Real::Irrational(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Rational(q) => *q.numer() as f64 / *q.denom() as f64,
            Real::Irrational(x) => x.approx,
        }
    }

    pub fn to_big(&self) -> BigDecimal {
        match self {
            Real::Rational(q) => rational_to_big(q),
            Real::Irrational(x) => x.value.clone(),
        }
    }

    /// Fixed-point image; `None` for rationals, which are handled exactly.
    pub fn fixed(&self) -> Option<&Fixed> {
        match self {
            Real::Rational(_) => None,
            Real::Irrational(x) => Some(&x.fixed),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Real::Rational(q) if q.is_zero())
    }

    pub fn signum(&self) -> i32 {
        match self {
            Real::Rational(q) => q.numer().signum() as i32,
            Real::Irrational(x) => match x.value.sign() {
                Sign::Minus => -1,
                Sign::NoSign => 0,
                Sign::Plus => 1,
            },
        }
    }

    pub fn floor(&self) -> i128 {
        self.floor_mul(1)
    }

    /// `[n·x]`.
    pub fn floor_mul(&self, n: i128) -> i128 {
        match self {
            Real::Rational(q) => (q * n).floor().to_integer(),
            Real::Irrational(x) => {
                if n >= 0 {
                    if let Some((f, _)) = u64::try_from(n).ok().and_then(|m| x.fixed.mul(m)) {
                        return f;
                    }
                }
                bigint_to_i128(&big_floor(&(&x.value * BigDecimal::from(n))))
            }
        }
    }

    /// `E(n·x)`, the least integer not below `n·x`.
    pub fn ceil_mul(&self, n: i128) -> i128 {
        match self {
            Real::Rational(q) => (q * n).ceil().to_integer(),
            Real::Irrational(_) if n == 0 => 0,
            Real::Irrational(_) => self.floor_mul(n) + 1,
        }
    }

    /// Whether `n·x ∈ Z`, decided by the tag for irrationals.
    pub fn is_integer_mul(&self, n: i128) -> bool {
        match self {
            Real::Rational(q) => (q * n).is_integer(),
            Real::Irrational(_) => n == 0,
        }
    }

    /// `{n·x}`.
    pub fn frac_mul(&self, n: i128) -> Real {
        match self {
            Real::Rational(q) => Real::Rational((q * n).fract_floor()),
            Real::Irrational(_) if n == 0 => Real::int(0),
            Real::Irrational(x) => {
                let y = &x.value * BigDecimal::from(n);
                let f = big_floor(&y);
                Real::irrational(y - BigDecimal::from(f))
            }
        }
    }

    pub fn abs(&self) -> Real {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Real {
        &Real::int(1) / self
    }

    /// Total order: exact for rational pairs, decimal comparison otherwise.
    pub fn cmp_real(&self, other: &Real) -> Ordering {
        match (self, other) {
            (Real::Rational(a), Real::Rational(b)) => a.cmp(b),
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                let scale = a.abs().max(b.abs()).max(1.0);
                if (a - b).abs() > 1e-9 * scale {
                    return a.partial_cmp(&b).unwrap_or(Ordering::Equal);
                }
                self.to_big().cmp(&other.to_big())
            }
        }
    }

    /// Equality up to the working precision for irrationals; exact for rationals; never
    /// equal across tags.
    pub fn same_value(&self, other: &Real) -> bool {
        match (self, other) {
            (Real::Rational(a), Real::Rational(b)) => a == b,
            (Real::Irrational(a), Real::Irrational(b)) => {
                if (a.approx - b.approx).abs() > 1e-9 * a.approx.abs().max(1.0) {
                    return false;
                }
                let tol = BigDecimal::new(BigInt::one(), i64::from(precision()) - 2);
                (&a.value - &b.value).abs() <= tol * a.value.abs().max(BigDecimal::one())
            }
            _ => false,
        }
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal_string(&self, digits: u32) -> String {
        let ctx = Context::default()
            .with_precision(NonZeroU64::new(u64::from(digits.max(1))).expect("positive"))
            .with_rounding_mode(RoundingMode::HalfEven);
        ctx.round_decimal(self.to_big()).normalized().to_plain_string()
    }

    /// Parses a literal: `p/q`, an integer, a finite decimal (all rational), or
    /// `sqrtK` / `c*sqrtK` surds.
    pub fn parse_literal(s: &str) -> Result<Real> {
        Ok(Surd::from_str(s)?.to_real())
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Real) -> bool {
        self.same_value(other)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Rational(q) => write!(f, "{q}"),
            Real::Irrational(_) => f.write_str(&self.to_decimal_string(precision())),
        }
    }
}

impl From<Rational> for Real {
    fn from(q: Rational) -> Real {
        Real::Rational(q)
    }
}

impl From<i64> for Real {
    fn from(n: i64) -> Real {
        Real::int(i128::from(n))
    }
}

fn combine(a: &Real, b: &Real, exact: impl Fn(&Rational, &Rational) -> Rational, big: impl Fn(&BigDecimal, &BigDecimal) -> BigDecimal) -> Real {
    match (a, b) {
        (Real::Rational(x), Real::Rational(y)) => Real::Rational(exact(x, y)),
        _ => Real::irrational(big(&a.to_big(), &b.to_big())),
    }
}

impl Add for &Real {
    type Output = Real;
    fn add(self, rhs: &Real) -> Real {
        combine(self, rhs, |x, y| x + y, |x, y| x + y)
    }
}

impl Sub for &Real {
    type Output = Real;
    fn sub(self, rhs: &Real) -> Real {
        combine(self, rhs, |x, y| x - y, |x, y| x - y)
    }
}

impl Mul for &Real {
    type Output = Real;
    fn mul(self, rhs: &Real) -> Real {
        if self.is_zero() || rhs.is_zero() {
            return Real::int(0);
        }
        combine(self, rhs, |x, y| x * y, |x, y| x * y)
    }
}

impl Div for &Real {
    type Output = Real;
    fn div(self, rhs: &Real) -> Real {
        assert!(!rhs.is_zero(), "division of a real by zero");
        if self.is_zero() {
            return Real::int(0);
        }
        combine(self, rhs, |x, y| x / y, big_div)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        match self {
            Real::Rational(q) => Real::Rational(-q),
            Real::Irrational(x) => Real::irrational(-&x.value),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real { (&self).$m(&rhs) }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(self, rhs: &Real) -> Real { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

trait FractFloor {
    fn fract_floor(&self) -> Self;
}

impl FractFloor for Rational {
    fn fract_floor(&self) -> Rational {
        self - self.floor()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RealRepr {
    Rational(String),
    Irrational(String),
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Real::Rational(q) => RealRepr::Rational(q.to_string()),
            Real::Irrational(_) => RealRepr::Irrational(self.to_decimal_string(precision() + GUARD_DIGITS)),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Real, D::Error> {
        match RealRepr::deserialize(d)? {
            RealRepr::Rational(s) => parse_rational(&s).map(Real::Rational),
            RealRepr::Irrational(s) => Real::irrational_str(&s),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Parses `p/q`, an integer, or a finite decimal into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = |e: &dyn fmt::Display| Error::Parse(format!("bad rational {s:?}: {e}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|e| bad(&e))?;
        let q: i128 = q.trim().parse().map_err(|e| bad(&e))?;
        if q == 0 {
            return Err(bad(&"zero denominator"));
        }
        return Ok(Rational::new(p, q));
    }
    let d = BigDecimal::from_str(s).map_err(|e| bad(&e))?;
    let (digits, scale) = d.normalized().into_bigint_and_exponent();
    let numer = digits.to_i128().ok_or_else(|| bad(&"numerator overflows i128"))?;
    if scale <= 0 {
        let factor = 10i128
            .checked_pow(u32::try_from(-scale).map_err(|e| bad(&e))?)
            .ok_or_else(|| bad(&"value overflows i128"))?;
        let n = numer.checked_mul(factor).ok_or_else(|| bad(&"value overflows i128"))?;
        Ok(Rational::from_integer(n))
    } else {
        let denom = 10i128
            .checked_pow(u32::try_from(scale).map_err(|e| bad(&e))?)
            .ok_or_else(|| bad(&"denominator overflows i128"))?;
        Ok(Rational::new(numer, denom))
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// `c·√k` with `c` rational and `k` squarefree; ratios of surds with equal radicands are
/// rational, all others irrational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    pub coef: Rational,
    pub radicand: u64,
}

fn squarefree_split(mut k: u64) -> (u64, u64) {
    let mut outside = 1u64;
    let mut p = 2u64;
    while p * p <= k {
        while k.is_multiple_of(p * p) {
            k /= p * p;
            outside *= p;
        }
        p += 1;
    }
    (outside, k)
}

impl Surd {
    pub fn new(coef: Rational, radicand: u64) -> Result<Surd> {
        if radicand == 0 {
            return Ok(Surd { coef: Rational::zero(), radicand: 1 });
        }
        let (outside, k) = squarefree_split(radicand);
        Ok(Surd { coef: coef * Rational::from_integer(i128::from(outside)), radicand: k })
    }

    pub fn rational(coef: Rational) -> Surd {
        Surd { coef, radicand: 1 }
    }

    pub fn is_rational(&self) -> bool {
        self.radicand == 1 || self.coef.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.coef > Rational::zero()
    }

    pub fn to_real(&self) -> Real {
        if self.is_rational() {
            return Real::Rational(self.coef);
        }
        &Real::Rational(self.coef) * &Real::sqrt_int(self.radicand)
    }

    /// `self / other` as a surd.
    pub fn div(&self, other: &Surd) -> Result<Surd> {
        if other.coef.is_zero() {
            return Err(Error::InvalidArgument("division by a zero surd".into()));
        }
        let coef = self.coef / other.coef / Rational::from_integer(i128::from(other.radicand));
        let prod = self
            .radicand
            .checked_mul(other.radicand)
            .ok_or_else(|| Error::InvalidArgument("surd radicand overflow".into()))?;
        Surd::new(coef, prod)
    }
}

impl FromStr for Surd {
    type Err = Error;

    fn from_str(s: &str) -> Result<Surd> {
        let t = s.trim();
        let (coef_part, root_part) = match t.find("sqrt") {
            Some(pos) => (t[..pos].trim().trim_end_matches('*').trim(), Some(&t[pos + 4..])),
            None => (t, None),
        };
        let coef = match coef_part {
            "" => Rational::one(),
            "-" => -Rational::one(),
            c => parse_rational(c)?,
        };
        let radicand = match root_part {
            None => 1,
            Some(r) => r
                .trim()
                .trim_start_matches('(')
                .trim_end_matches(')')
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("bad radicand in {s:?}: {e}")))?,
        };
        Surd::new(coef, radicand)
    }
}

impl Serialize for Surd {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Surd {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Surd, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.radicand, self.coef == Rational::one()) {
            (1, _) => write!(f, "{}", self.coef),
            (k, true) => write!(f, "sqrt{k}"),
            (k, false) => write!(f, "{}*sqrt{k}", self.coef),
        }
    }
}

/// The four floor-type values of a real: `([x], E(x), {x}, φ(x))`.
#[derive(Clone, Debug, PartialEq)]
pub struct FloorParts {
    pub floor: i128,
    pub ceil: i128,
    pub frac: Real,
    pub phi: i128,
}

pub fn floor_parts(x: &Real) -> FloorParts {
    let floor = x.floor();
    let ceil = x.ceil_mul(1);
    FloorParts { floor, ceil, frac: x.frac_mul(1), phi: ceil - floor }
}

pub fn lcm_all(values: impl IntoIterator<Item = i128>) -> i128 {
    values.into_iter().fold(1i128, |acc, v| acc.lcm(&v))
}

/// Best rational approximation with denominator at most `bound`, when the continued
/// fraction of `x` terminates within working precision before exceeding the bound.
pub fn detect_rational(x: &BigDecimal, bound: i128) -> Option<Rational> {
    let tol = BigDecimal::new(BigInt::one(), i64::from(precision()) - 5);
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut rest = x.clone();
    for _ in 0..200 {
        let a = big_floor(&rest);
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        if q2 > BigInt::from(bound) {
            return None;
        }
        let approx = BigDecimal::from(p2.clone()) / BigDecimal::from(q2.clone());
        if (&approx - x).abs() <= &tol * x.abs().max(BigDecimal::one()) {
            return Some(Rational::new(p2.to_i128()?, q2.to_i128()?));
        }
        let f = &rest - BigDecimal::from(a);
        if f.is_zero() {
            return None;
        }
        rest = big_div(&BigDecimal::one(), &f);
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi() -> Real {
        (&Real::int(1) + &Real::sqrt_int(5)) / Real::int(2)
    }

    #[test]
    fn floor_parts_examples() {
        let p = floor_parts(&Real::int(1));
        assert_eq!((p.floor, p.ceil, p.phi), (1, 1, 0));
        assert!(p.frac.is_zero());
        let p = floor_parts(&Real::ratio(5, 4));
        assert_eq!((p.floor, p.ceil, p.phi), (1, 2, 1));
        assert_eq!(p.frac, Real::ratio(1, 4));
        let p = floor_parts(&Real::ratio(-1, 2));
        assert_eq!((p.floor, p.ceil, p.phi), (-1, 0, 1));
        assert_eq!(p.frac, Real::ratio(1, 2));
    }

    #[test]
    fn irrational_floor_matches_decimal() {
        let x = Real::sqrt_int(2);
        for n in [1i128, 7, 1000, 123_456_789, 10_000_000_000] {
            let direct = big_floor(&(x.to_big() * BigDecimal::from(n)));
            assert_eq!(x.floor_mul(n), bigint_to_i128(&direct));
        }
        assert_eq!(x.floor_mul(-1), -2);
        assert_eq!(x.ceil_mul(3), 5);
    }

    #[test]
    fn tags_propagate() {
        let s = Real::sqrt_int(2);
        assert!(!(&s + &Real::int(1)).is_rational());
        assert!((&s * &Real::int(0)).is_rational());
        assert!(Real::sqrt_int(9).is_rational());
        assert!(!Real::int(3).is_integer_mul(0) || Real::int(3).is_integer_mul(1));
        assert!(!s.is_integer_mul(1_000_000));
    }

    #[test]
    fn golden_ratio_identity() {
        let p = phi();
        let lhs = &p * &p;
        let rhs = &p + &Real::int(1);
        assert!(lhs.same_value(&rhs));
    }

    #[test]
    fn fixed_point_agrees_with_decimal_frac() {
        let x = phi();
        for n in [1u64, 2, 3, 89, 144, 999_983] {
            let (f, bits) = x.fixed().unwrap().mul(n).unwrap();
            assert_eq!(f, x.floor_mul(n as i128));
            let approx = bits as f64 / 2f64.powi(128);
            assert!((approx - x.frac_mul(n as i128).to_f64()).abs() < 1e-12);
        }
    }

    #[test]
    fn parse_literals() {
        assert_eq!(parse_rational("3/6").unwrap(), Rational::new(1, 2));
        assert_eq!(parse_rational("1.25").unwrap(), Rational::new(5, 4));
        assert_eq!(parse_rational("12e2").unwrap(), Rational::from_integer(1200));
        assert!(parse_rational("1/0").is_err());
        let s: Surd = "sqrt8".parse().unwrap();
        assert_eq!(s, Surd { coef: Rational::from_integer(2), radicand: 2 });
        let s: Surd = "3/2*sqrt3".parse().unwrap();
        assert_eq!(s.radicand, 3);
        assert!(Real::parse_literal("sqrt4").unwrap().is_rational());
        assert!(Surd::from_str("sqrtx").is_err());
    }

    #[test]
    fn surd_ratios() {
        let a: Surd = "sqrt2".parse().unwrap();
        let b: Surd = "3*sqrt2".parse().unwrap();
        let c: Surd = "sqrt3".parse().unwrap();
        assert!(b.div(&a).unwrap().is_rational());
        assert!(!c.div(&a).unwrap().is_rational());
        assert_eq!(c.div(&a).unwrap(), Surd { coef: Rational::new(1, 2), radicand: 6 });
    }

    #[test]
    fn serde_round_trip() {
        let vals = [Real::ratio(3, 7), Real::sqrt_int(3)];
        for v in vals {
            let js = serde_json::to_string(&v).unwrap();
            let back: Real = serde_json::from_str(&js).unwrap();
            assert!(v.same_value(&back), "{js}");
            assert_eq!(v.is_rational(), back.is_rational());
        }
        assert_eq!(serde_json::to_string(&Real::ratio(1, 2)).unwrap(), r#"{"rational":"1/2"}"#);
    }

    #[test]
    fn continued_fraction_detection() {
        let x = (Real::ratio(355, 113) * Real::sqrt_int(2)) / Real::sqrt_int(2);
        assert_eq!(detect_rational(&x.to_big(), 1_000_000), Some(Rational::new(355, 113)));
        assert_eq!(detect_rational(&Real::sqrt_int(2).to_big(), 1_000_000), None);
    }

    #[test]
    fn precision_bounds() {
        assert!(set_precision(10).is_err());
        assert!(set_precision(DEFAULT_DIGITS).is_ok());
    }
}
