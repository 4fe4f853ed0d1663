//! Two-level number tower: exact rationals and high-precision reals.
//!
//! Every quantity in the library is a [`Scalar`]: either an arbitrary-precision
//! rational (always in lowest terms, positive denominator) or a binary floating
//! point number with a configurable mantissa width. Arithmetic between two exact
//! scalars is exact; as soon as an approximate scalar is involved the result is
//! approximate, computed with correct rounding (round half to even) at the larger
//! operand precision. Comparison across the two modes is exact: a finite float is
//! a dyadic rational and is compared as one.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Exponent, RoundingMode, Sign, Word};
use num_bigint::{BigInt, BigUint, Sign as IntSign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default mantissa width for approximate arithmetic.
pub const DEFAULT_PRECISION_BITS: usize = 256;

/// Smallest supported mantissa width.
pub const MIN_PRECISION_BITS: usize = 64;

const RM: RoundingMode = RoundingMode::ToEven;
const WORD_BITS: usize = std::mem::size_of::<Word>() * 8;

thread_local! {
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("constants cache initialization"));
}

/// Runs `body` with the thread-local cache of mathematical constants.
pub fn with_consts<R>(body: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| body(&mut cc.borrow_mut()))
}

/// An exact rational or a high-precision real.
#[derive(Clone, Debug)]
pub enum Scalar {
    /// Arbitrary-precision rational in lowest terms.
    Exact(BigRational),
    /// Binary floating point number; precision is its mantissa capacity.
    Approx(BigFloat),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_u64(v: u64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    /// Exact rational `n/d`. Panics if `d == 0`.
    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Exact(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::Exact(r)
    }

    /// A floating-point zero carries no mantissa and would report precision
    /// zero, dragging later joined precisions down to the minimum; zero is
    /// representable exactly, so store it that way.
    pub fn from_bigfloat(f: BigFloat) -> Self {
        debug_assert!(!f.is_nan() && !f.is_inf(), "non-finite scalar");
        if f.is_zero() {
            return Scalar::Exact(BigRational::zero());
        }
        Scalar::Approx(f)
    }

    pub fn approx_from_f64(v: f64, bits: usize) -> Self {
        Self::from_bigfloat(BigFloat::from_f64(v, clamp_bits(bits)))
    }

    /// Parses `"p/q"` or `"p"` into an exact scalar.
    pub fn from_rational_str(s: &str) -> Result<Self> {
        parse_rational(s).map(Scalar::Exact)
    }

    /// Parses a decimal literal (optionally with exponent) into an approximate
    /// scalar at `bits`, correctly rounded.
    pub fn from_decimal_str(s: &str, bits: usize) -> Result<Self> {
        let r = rational_from_decimal_str(s)?;
        Ok(Scalar::from_bigfloat(rational_to_bigfloat(&r, bits)))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    /// Mantissa capacity in bits for approximate scalars.
    pub fn precision_bits(&self) -> Option<usize> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Approx(f) => f.precision(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(f) => f.is_zero(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Approx(f) => f.is_negative() && !f.is_zero(),
        }
    }

    pub fn is_positive(&self) -> bool {
        !self.is_zero() && !self.is_negative()
    }

    /// The exact rational value. Approximate scalars are dyadic rationals and
    /// convert losslessly.
    pub fn to_rational(&self) -> BigRational {
        match self {
            Scalar::Exact(r) => r.clone(),
            Scalar::Approx(f) => bigfloat_to_rational(f),
        }
    }

    /// Correctly rounded float at `bits` (lossless when `bits` suffices).
    pub fn to_bigfloat(&self, bits: usize) -> BigFloat {
        match self {
            Scalar::Exact(r) => rational_to_bigfloat(r, bits),
            Scalar::Approx(f) => {
                let bits = clamp_bits(bits);
                if f.precision() == Some(bits) {
                    f.clone()
                } else {
                    let mut g = f.clone();
                    g.set_precision(bits, RM).expect("precision change");
                    g
                }
            }
        }
    }

    fn operand(&self, bits: usize) -> BigFloat {
        match self {
            Scalar::Exact(r) => rational_to_bigfloat(r, bits),
            Scalar::Approx(f) => f.clone(),
        }
    }

    fn join_bits(&self, other: &Scalar) -> usize {
        self.precision_bits()
            .unwrap_or(0)
            .max(other.precision_bits().unwrap_or(0))
            .max(MIN_PRECISION_BITS)
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => {
                let p = self.join_bits(other);
                Scalar::from_bigfloat(self.operand(p).add(&other.operand(p), p, RM))
            }
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a - b),
            _ => {
                let p = self.join_bits(other);
                Scalar::from_bigfloat(self.operand(p).sub(&other.operand(p), p, RM))
            }
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            _ => {
                let p = self.join_bits(other);
                Scalar::from_bigfloat(self.operand(p).mul(&other.operand(p), p, RM))
            }
        }
    }

    /// Panics on division by zero, like the underlying rational type.
    pub fn div(&self, other: &Scalar) -> Scalar {
        assert!(!other.is_zero(), "scalar division by zero");
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a / b),
            _ => {
                let p = self.join_bits(other);
                Scalar::from_bigfloat(self.operand(p).div(&other.operand(p), p, RM))
            }
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Approx(f) => Scalar::Approx(f.neg()),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Approx(f) => Scalar::Approx(f.abs()),
        }
    }

    pub fn floor(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.floor()),
            Scalar::Approx(f) => Scalar::Approx(f.floor()),
        }
    }

    /// Fractional part `x - floor(x)`, always in `[0, 1)`.
    pub fn frac(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r - r.floor()),
            Scalar::Approx(f) => {
                let p = f.precision().unwrap_or(MIN_PRECISION_BITS);
                let one = BigFloat::from_word(1, MIN_PRECISION_BITS);
                let mut r = f.sub(&f.floor(), p, RM);
                // Rounding at the subtraction can land exactly on 1 when x is
                // just below an integer; fold back into the fundamental domain.
                while cmp_bigfloat(&r, &one) != Ordering::Less {
                    r = r.sub(&one, p, RM);
                }
                while r.is_negative() && !r.is_zero() {
                    r = r.add(&one, p, RM);
                }
                Scalar::from_bigfloat(r)
            }
        }
    }

    /// Reduces `x` into `[0, P)` modulo the period `P > 0`.
    pub fn reduce_mod_period(&self, period: &Scalar) -> Result<Scalar> {
        if !period.is_positive() {
            return Err(Error::InvalidArgument(format!(
                "period must be positive, got {period}"
            )));
        }
        match (self, period) {
            (Scalar::Exact(x), Scalar::Exact(p)) => {
                let q = (x / p).floor();
                Ok(Scalar::Exact(x - q * p))
            }
            _ => {
                let bits = self.join_bits(period);
                let x = self.operand(bits);
                let p = period.operand(bits);
                let q = x.div(&p, bits, RM).floor();
                let mut r = x.sub(&q.mul(&p, bits, RM), bits, RM);
                while cmp_bigfloat(&r, &p) != Ordering::Less {
                    r = r.sub(&p, bits, RM);
                }
                while r.is_negative() && !r.is_zero() {
                    r = r.add(&p, bits, RM);
                }
                Ok(Scalar::from_bigfloat(r))
            }
        }
    }

    /// Total order with exact cross-mode semantics.
    pub fn cmp_scalar(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            (Scalar::Approx(a), Scalar::Approx(b)) => cmp_bigfloat(a, b),
            _ => self.to_rational().cmp(&other.to_rational()),
        }
    }

    /// `|self - other| <= equality_tolerance` under `ctx`; exact equality when
    /// both operands are exact and the tolerance is zero.
    pub fn eq_tol(&self, other: &Scalar, ctx: &ToleranceContext) -> bool {
        let (lo, hi) = if self.cmp_scalar(other) == Ordering::Greater {
            (other, self)
        } else {
            (self, other)
        };
        !gt_tol(hi, lo, ctx)
    }

    pub fn sin(&self, bits: usize) -> Scalar {
        let bits = clamp_bits(bits);
        let x = self.operand(bits);
        Scalar::from_bigfloat(with_consts(|cc| x.sin(bits, RM, cc)))
    }

    pub fn cos(&self, bits: usize) -> Scalar {
        let bits = clamp_bits(bits);
        let x = self.operand(bits);
        Scalar::from_bigfloat(with_consts(|cc| x.cos(bits, RM, cc)))
    }

    pub fn pi(bits: usize) -> Scalar {
        let bits = clamp_bits(bits);
        Scalar::Approx(with_consts(|cc| cc.pi(bits, RM)))
    }

    pub fn e(bits: usize) -> Scalar {
        let bits = clamp_bits(bits);
        Scalar::Approx(with_consts(|cc| cc.e(bits, RM)))
    }

    pub fn sqrt2(bits: usize) -> Scalar {
        let bits = clamp_bits(bits);
        Scalar::Approx(BigFloat::from_word(2, bits).sqrt(bits, RM))
    }

    pub fn phi(bits: usize) -> Scalar {
        let bits = clamp_bits(bits);
        let five = BigFloat::from_word(5, bits);
        let one = BigFloat::from_word(1, bits);
        let two = BigFloat::from_word(2, bits);
        Scalar::Approx(five.sqrt(bits, RM).add(&one, bits, RM).div(&two, bits, RM))
    }

    /// Exact decimal rendering: `"p/q"` for rationals, the full (lossless)
    /// decimal expansion for floats.
    pub fn to_literal(&self) -> String {
        match self {
            Scalar::Exact(r) => rational_literal(r),
            Scalar::Approx(f) => dyadic_decimal_string(f),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_scalar(other) == Ordering::Equal
    }
}

impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_scalar(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_scalar(other)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

fn clamp_bits(bits: usize) -> usize {
    bits.max(MIN_PRECISION_BITS)
}

fn cmp_bigfloat(a: &BigFloat, b: &BigFloat) -> Ordering {
    let c = a.cmp(b).expect("comparison involving NaN");
    match c {
        0 => Ordering::Equal,
        n if n < 0 => Ordering::Less,
        _ => Ordering::Greater,
    }
}

/// Comparison context: precision for approximate arithmetic plus the equality
/// tolerance used to decide when two values count as the same.
#[derive(Clone, Debug)]
pub struct ToleranceContext {
    precision_bits: usize,
    tol: BigRational,
    tol_float: BigFloat,
}

impl ToleranceContext {
    /// Context for all-rational computations: zero tolerance.
    pub fn exact() -> Self {
        Self {
            precision_bits: DEFAULT_PRECISION_BITS,
            tol: BigRational::zero(),
            tol_float: BigFloat::new(MIN_PRECISION_BITS),
        }
    }

    /// Context for approximate computations at `bits` with the default
    /// equality tolerance 1e-30.
    pub fn approx(bits: usize) -> Self {
        let tol = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(30));
        Self::with_tolerance(bits, tol).expect("default tolerance")
    }

    pub fn with_tolerance(bits: usize, tol: BigRational) -> Result<Self> {
        if tol.is_negative() {
            return Err(Error::InvalidArgument(format!(
                "equality tolerance must be nonnegative, got {tol}"
            )));
        }
        let bits = clamp_bits(bits);
        let tol_float = rational_to_bigfloat(&tol, bits);
        Ok(Self {
            precision_bits: bits,
            tol,
            tol_float,
        })
    }

    pub fn precision_bits(&self) -> usize {
        self.precision_bits
    }

    pub fn equality_tolerance(&self) -> &BigRational {
        &self.tol
    }
}

impl Default for ToleranceContext {
    fn default() -> Self {
        Self::approx(DEFAULT_PRECISION_BITS)
    }
}

#[derive(Serialize, Deserialize)]
struct ToleranceContextRepr {
    precision_bits: usize,
    equality_tolerance: String,
}

impl Serialize for ToleranceContext {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ToleranceContextRepr {
            precision_bits: self.precision_bits,
            equality_tolerance: rational_literal(&self.tol),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ToleranceContext {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = ToleranceContextRepr::deserialize(d)?;
        let tol = parse_rational(&repr.equality_tolerance).map_err(serde::de::Error::custom)?;
        ToleranceContext::with_tolerance(repr.precision_bits, tol)
            .map_err(serde::de::Error::custom)
    }
}

/// `hi - lo > tolerance`, assuming `hi >= lo`.
pub(crate) fn gt_tol(hi: &Scalar, lo: &Scalar, ctx: &ToleranceContext) -> bool {
    match (hi, lo) {
        (Scalar::Exact(a), Scalar::Exact(b)) => (a - b) > *ctx.equality_tolerance(),
        _ => {
            let p = ctx.precision_bits();
            let diff = hi.operand(p).sub(&lo.operand(p), p, RM);
            cmp_bigfloat(&diff, &ctx.tol_float) == Ordering::Greater
        }
    }
}

/// Splits an ascending slice into clusters: a new cluster starts whenever a
/// value exceeds the current cluster's representative (its first member) by
/// more than the tolerance. Returns half-open index ranges.
pub(crate) fn cluster_ranges(
    values: &[Scalar],
    ctx: &ToleranceContext,
) -> Result<Vec<(usize, usize)>> {
    for w in values.windows(2) {
        if w[0].cmp_scalar(&w[1]) == Ordering::Greater {
            return Err(Error::InvalidArgument(
                "cluster_distinct requires ascending input".into(),
            ));
        }
    }
    let mut out = Vec::new();
    let mut start = 0usize;
    for i in 1..values.len() {
        if gt_tol(&values[i], &values[start], ctx) {
            out.push((start, i));
            start = i;
        }
    }
    if !values.is_empty() {
        out.push((start, values.len()));
    }
    Ok(out)
}

/// Collapses an ascending list to cluster representatives (first member of each
/// cluster). Consecutive representatives differ by more than the tolerance;
/// with zero tolerance only exact duplicates collapse.
pub fn cluster_distinct(values: &[Scalar], ctx: &ToleranceContext) -> Result<Vec<Scalar>> {
    Ok(cluster_ranges(values, ctx)?
        .into_iter()
        .map(|(s, _)| values[s].clone())
        .collect())
}

// ---------------------------------------------------------------------------
// Conversions between the two levels of the tower.

fn biguint_from_words(words: &[Word]) -> BigUint {
    let mut bytes = Vec::with_capacity(words.len() * WORD_BITS / 8);
    for w in words {
        for i in 0..WORD_BITS / 8 {
            bytes.push(((*w >> (8 * i)) & 0xff) as u8);
        }
    }
    BigUint::from_bytes_le(&bytes)
}

fn words_from_biguint(u: &BigUint) -> Vec<Word> {
    let bytes = u.to_bytes_le();
    let mut words = Vec::with_capacity(bytes.len() / (WORD_BITS / 8) + 1);
    for chunk in bytes.chunks(WORD_BITS / 8) {
        let mut w: Word = 0;
        for (i, b) in chunk.iter().enumerate() {
            w |= (*b as Word) << (8 * i);
        }
        words.push(w);
    }
    words
}

/// Lossless conversion: a finite float with mantissa `m` and exponent `e`
/// equals `±m * 2^(e - mantissa_bits)`.
pub fn bigfloat_to_rational(f: &BigFloat) -> BigRational {
    assert!(!f.is_nan() && !f.is_inf(), "non-finite float");
    if f.is_zero() {
        return BigRational::zero();
    }
    let (words, _n, sign, e, _) = f.as_raw_parts().expect("finite float raw parts");
    let m = biguint_from_words(words);
    let total_bits = (words.len() * WORD_BITS) as i64;
    let shift = e as i64 - total_bits;
    let mag = if shift >= 0 {
        BigRational::from_integer(BigInt::from(m << (shift as usize)))
    } else {
        BigRational::new(
            BigInt::from(m),
            BigInt::from(BigUint::one() << ((-shift) as usize)),
        )
    };
    match sign {
        Sign::Pos => mag,
        Sign::Neg => -mag,
    }
}

fn bigint_to_bigfloat_exact(i: &BigInt) -> BigFloat {
    if i.is_zero() {
        return BigFloat::new(MIN_PRECISION_BITS);
    }
    let (sign, mag) = (i.sign(), i.magnitude());
    let words = words_from_biguint(mag);
    let e = Exponent::try_from(words.len() * WORD_BITS).expect("exponent overflow");
    let s = if sign == IntSign::Minus {
        Sign::Neg
    } else {
        Sign::Pos
    };
    BigFloat::from_words(&words, s, e)
}

/// Correctly rounded conversion at `bits`.
pub fn rational_to_bigfloat(r: &BigRational, bits: usize) -> BigFloat {
    let bits = clamp_bits(bits);
    if r.is_zero() {
        return BigFloat::new(bits);
    }
    let n = bigint_to_bigfloat_exact(r.numer());
    let d = bigint_to_bigfloat_exact(r.denom());
    n.div(&d, bits, RM)
}

/// Exact decimal expansion of a finite float (a dyadic rational always has
/// one), so that parsing the string back at the same precision is lossless.
fn dyadic_decimal_string(f: &BigFloat) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let r = bigfloat_to_rational(f);
    let neg = r.is_negative();
    let num = r.numer().magnitude().clone();
    let den = r.denom().magnitude();
    let k = den.trailing_zeros().unwrap_or(0) as usize;
    debug_assert_eq!(&(BigUint::one() << k), den, "denominator is a power of two");
    let digits = (num * num_traits::pow(BigUint::from(5u32), k)).to_str_radix(10);
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    if k == 0 {
        s.push_str(&digits);
        return s;
    }
    let digits = if digits.len() <= k {
        format!("{}{}", "0".repeat(k + 1 - digits.len()), digits)
    } else {
        digits
    };
    let point = digits.len() - k;
    s.push_str(&digits[..point]);
    let frac = digits[point..].trim_end_matches('0');
    if !frac.is_empty() {
        s.push('.');
        s.push_str(frac);
    }
    s
}

fn rational_literal(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"` or an integer literal into a rational in lowest terms.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("not a rational literal: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::InvalidArgument("zero denominator".into()));
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(n))
        }
    }
}

/// Parses a decimal literal (`"1.25"`, `"-3"`, `"2.5e-7"`) into the exact
/// rational it denotes.
pub fn rational_from_decimal_str(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidArgument(format!("not a decimal literal: {s:?}"));
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i64 = e.parse().map_err(|_| bad())?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (mantissa, neg) = match mantissa.strip_prefix('-') {
        Some(rest) => (rest, true),
        None => (mantissa.strip_prefix('+').unwrap_or(mantissa), false),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}")
        .parse()
        .map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(if neg { -value } else { value })
}

// ---------------------------------------------------------------------------
// Serialization: {"rational": "p/q"} or {"real": "<decimal>", "bits": n}.

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Rational { rational: String },
    Real { real: String, bits: usize },
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            Scalar::Exact(r) => ScalarRepr::Rational {
                rational: rational_literal(r),
            },
            Scalar::Approx(f) => ScalarRepr::Real {
                real: dyadic_decimal_string(f),
                bits: f.precision().ok_or_else(|| {
                    serde::ser::Error::custom("cannot serialize non-finite scalar")
                })?,
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match ScalarRepr::deserialize(d)? {
            ScalarRepr::Rational { rational } => {
                Scalar::from_rational_str(&rational).map_err(serde::de::Error::custom)
            }
            ScalarRepr::Real { real, bits } => {
                Scalar::from_decimal_str(&real, bits).map_err(serde::de::Error::custom)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(s: &str) -> Scalar {
        Scalar::from_decimal_str(s, 256).unwrap()
    }

    #[test]
    fn dyadic_round_trip() {
        for s in ["0.25", "-7.125", "3", "0.3333333333333333", "1e-30"] {
            let x = approx(s);
            let json = serde_json::to_string(&x).unwrap();
            let back: Scalar = serde_json::from_str(&json).unwrap();
            assert_eq!(x, back, "round trip of {s}: {json}");
        }
    }

    #[test]
    fn float_rational_conversion_is_exact() {
        let x = Scalar::approx_from_f64(-2.815, 192);
        let r = x.to_rational();
        let back = Scalar::Approx(rational_to_bigfloat(&r, 192));
        assert_eq!(x, back);
    }

    #[test]
    fn decimal_strings() {
        assert_eq!(approx("0.25").to_literal(), "0.25");
        assert_eq!(approx("-12").to_literal(), "-12");
        assert_eq!(approx("0.0009765625").to_literal(), "0.0009765625");
        assert_eq!(Scalar::zero().to_literal(), "0");
        assert_eq!(Scalar::ratio(-3, 9).to_literal(), "-1/3");
    }

    #[test]
    fn decimal_parse_forms() {
        assert_eq!(
            rational_from_decimal_str("2.5e3").unwrap(),
            BigRational::from_integer(BigInt::from(2500))
        );
        assert_eq!(
            rational_from_decimal_str("1e-2").unwrap(),
            BigRational::new(BigInt::one(), BigInt::from(100))
        );
        assert!(rational_from_decimal_str("1.2.3").is_err());
        assert!(rational_from_decimal_str("").is_err());
    }

    #[test]
    fn cross_mode_comparison() {
        assert_eq!(Scalar::ratio(1, 4), approx("0.25"));
        assert!(Scalar::ratio(1, 3) > approx("0.3333333333"));
    }

    #[test]
    fn frac_edge_negative_tiny() {
        // -2^-300 at 256 bits: frac rounds to 1 and must fold into [0, 1).
        let tiny = Scalar::ratio(1, 2).to_bigfloat(256);
        let mut x = tiny;
        x.set_exponent(-300);
        let f = Scalar::Approx(x.neg()).frac();
        assert!(f < Scalar::one());
        assert!(!f.is_negative());
    }

    #[test]
    fn cluster_rejects_unsorted() {
        let ctx = ToleranceContext::exact();
        let vals = vec![Scalar::one(), Scalar::zero()];
        assert!(cluster_distinct(&vals, &ctx).is_err());
    }
}
