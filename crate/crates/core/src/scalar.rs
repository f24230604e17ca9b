//! Numeric modes.
//!
//! Every geometric and fuzzy type is generic over a [`Scalar`]. Two modes are
//! provided: [`Rational`] (arbitrary precision, exact equality) and `f64`
//! (grids, large random systems). Distances are never square-rooted inside the
//! library; see [`crate::geometry::Distance`].

use std::fmt::Debug;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision rational.
pub type Rational = BigRational;

/// Absolute tolerance used to merge nearby points in float mode.
pub const FLOAT_DEDUP_TOL: f64 = 1e-12;

/// Default absolute tolerance for float comparisons.
pub const FLOAT_CMP_TOL: f64 = 1e-9;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` for exact arithmetic.
    const EXACT: bool;

    /// Hashable bucket for deduplication. Exact mode uses the value itself;
    /// float mode quantizes to [`FLOAT_DEDUP_TOL`] cells.
    type Key: Hash + Eq + Clone + Debug + Send + Sync;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;

    fn key(&self) -> Self::Key;
    /// Buckets that may hold a value equal to one in `key` under the dedup rule.
    fn neighbor_keys(key: &Self::Key) -> Vec<Self::Key>;
    /// Dedup equality: exact equality, or within [`FLOAT_DEDUP_TOL`].
    fn same(&self, other: &Self) -> bool;

    /// Squared Euclidean distance between two coordinate slices of equal length.
    fn dist_sq(a: &[Self], b: &[Self]) -> Self;

    /// Human/machine readable value: `a/b` in exact mode, 17 significant
    /// digits in float mode.
    fn format(&self) -> String;

    fn is_zero_value(&self) -> bool {
        *self == Self::zero()
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn powi(&self, exp: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..exp {
            out = out * self.clone();
        }
        out
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    type Key = Rational;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn key(&self) -> Self::Key {
        self.clone()
    }

    fn neighbor_keys(key: &Self::Key) -> Vec<Self::Key> {
        vec![key.clone()]
    }

    fn same(&self, other: &Self) -> bool {
        self == other
    }

    fn dist_sq(a: &[Self], b: &[Self]) -> Self {
        if let Some(d) = small_dist_sq(a, b) {
            return d;
        }
        let mut acc = <Rational as Zero>::zero();
        for (x, y) in a.iter().zip(b) {
            let d = x - y;
            acc += &d * &d;
        }
        acc
    }

    fn format(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn powi(&self, exp: u32) -> Self {
        num_traits::pow(self.clone(), exp as usize)
    }
}

/// `dist_sq` in machine integers when every numerator and denominator fits
/// in an `i64`; `None` on overflow.
fn small_dist_sq(a: &[Rational], b: &[Rational]) -> Option<Rational> {
    let parts = |r: &Rational| Some((r.numer().to_i64()? as i128, r.denom().to_i64()? as i128));
    let (mut num, mut den) = (0i128, 1i128);
    for (x, y) in a.iter().zip(b) {
        let ((xn, xd), (yn, yd)) = (parts(x)?, parts(y)?);
        let mut dn = xn.checked_mul(yd)?.checked_sub(yn.checked_mul(xd)?)?;
        let mut dd = xd.checked_mul(yd)?;
        let g = dn.gcd(&dd);
        if g > 1 {
            dn /= g;
            dd /= g;
        }
        let (sn, sd) = (dn.checked_mul(dn)?, dd.checked_mul(dd)?);
        num = num.checked_mul(sd)?.checked_add(sn.checked_mul(den)?)?;
        den = den.checked_mul(sd)?;
        let g = num.gcd(&den);
        if g > 1 {
            num /= g;
            den /= g;
        }
    }
    Some(Rational::new_raw(BigInt::from(num), BigInt::from(den)))
}

impl Scalar for f64 {
    const EXACT: bool = false;
    type Key = i128;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn key(&self) -> Self::Key {
        let q = (self / FLOAT_DEDUP_TOL).round();
        // saturating cast
        q as i128
    }

    fn neighbor_keys(key: &Self::Key) -> Vec<Self::Key> {
        vec![key.saturating_sub(1), *key, key.saturating_add(1)]
    }

    fn same(&self, other: &Self) -> bool {
        (self - other).abs() <= FLOAT_DEDUP_TOL
    }

    fn dist_sq(a: &[Self], b: &[Self]) -> Self {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    }

    fn format(&self) -> String {
        format!("{:.16e}", self)
    }

    fn powi(&self, exp: u32) -> Self {
        f64::powi(*self, exp as i32)
    }
}

/// Parses `"a/b"`, an integer, or a finite decimal (optionally with exponent)
/// into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Number(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&all).map_err(|_| bad())?);
    let shift = exponent - frac_part.len() as i64;
    if exponent.unsigned_abs() > 10_000 {
        return Err(bad());
    }
    let ten = Rational::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Exact square root of a rational when both numerator and denominator are
/// perfect squares.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Rational approximation of an `f64`, exact for every finite double.
pub fn rational_from_f64(v: f64) -> Option<Rational> {
    Rational::from_float(v)
}
