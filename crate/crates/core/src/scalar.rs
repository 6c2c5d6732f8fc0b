//! Exact scalar arithmetic.
//!
//! All coordinates and probabilities live in `Rat` (arbitrary-precision
//! rationals). Inputs arrive as decimal strings, so every value is exactly
//! representable. Sidedness decisions are never made in floating point; the
//! fast profile uses `f64` for probability accumulation only.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

/// Parses a decimal string (`"-12.375"`, `"0.5"`, `"3"`) or an explicit
/// fraction (`"3/8"`) into an exact rational.
pub fn parse_decimal(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse(format!("empty numeric literal")));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad fraction numerator: {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad fraction denominator: {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator: {s:?}")));
        }
        return Ok(Rat::new(n, d));
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("bad numeric literal: {s:?}")));
    }
    let digits: String = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("bad numeric literal: {s:?}")));
    }
    let mantissa: BigInt = digits
        .parse()
        .map_err(|_| Error::Parse(format!("bad numeric literal: {s:?}")))?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    Ok(Rat::new(BigInt::from(sign) * mantissa, denom))
}

/// Renders a rational canonically: `"p"` when integral, `"p/q"` otherwise.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `r^k` for a nonnegative integer exponent.
pub fn rat_pow(r: &Rat, k: u64) -> Rat {
    let mut acc = Rat::one();
    let mut base = r.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc *= &base;
        }
        base = &base * &base;
        k >>= 1;
    }
    acc
}

pub fn rat_from_i64(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Best-effort `f64` view of a rational; used only in reporting and in the
/// fast probability profile.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back through a scaled division for extreme magnitudes.
        let n = r.numer().to_f64().unwrap_or(f64::MAX);
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// Scales a slice of rationals by the LCM of their denominators, returning
/// integer numerators. The multiplier is positive, so determinant and
/// cross-product signs computed from the scaled values are unchanged.
pub fn clear_denominators(vals: &[Rat]) -> (Vec<BigInt>, BigInt) {
    let mut lcm = BigInt::one();
    for v in vals {
        lcm = num_integer::lcm(lcm, v.denom().clone());
    }
    let scaled = vals
        .iter()
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect();
    (scaled, lcm)
}

/// Abstraction over the probability field: exact rationals for the default
/// profile, `f64` for the fast profile. Geometry never goes through here —
/// only probability accumulation does.
pub trait ProbField:
    Clone
    + std::fmt::Debug
    + PartialEq
    + Zero
    + One
    + std::ops::Sub<Output = Self>
    + std::ops::Div<Output = Self>
{
    fn from_rat(r: &Rat) -> Self;
}

impl ProbField for Rat {
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
}

impl ProbField for f64 {
    fn from_rat(r: &Rat) -> Self {
        rat_to_f64(r)
    }
}

/// Sign of a `BigInt` as -1/0/+1.
pub fn bigint_sign(v: &BigInt) -> i32 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}
