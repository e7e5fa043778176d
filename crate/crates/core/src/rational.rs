//! Exact probabilities.
//!
//! Everything is a [`BigRational`]; decimal strings are converted exactly
//! (`"0.35"` is `7/20`, never a binary float).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Prob = BigRational;

/// Parses `"3/10"`, `"0.3"`, `"1"` or `".5"` into an exact rational.
pub fn parse_prob(text: &str) -> Result<Prob> {
    let s = text.trim();
    let bad = || Error::InvalidProbability(text.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(num, den));
    }
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if (int_part.is_empty() && frac_part.is_empty())
        || !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
    Ok(BigRational::new(num, den))
}

/// `p/q` in lowest terms, or just `p` when the denominator is one.
pub fn format_fraction(p: &Prob) -> String {
    if p.denom().is_one() {
        p.numer().to_string()
    } else {
        format!("{}/{}", p.numer(), p.denom())
    }
}

/// Decimal rendering rounded half-up to `places` digits. Presentation only.
pub fn format_decimal(p: &Prob, places: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u32), places);
    let neg = p.is_negative();
    let abs = p.abs();
    let scaled = abs * BigRational::from_integer(scale.clone());
    let two = BigInt::from(2u32);
    // round half up: floor(x + 1/2)
    let rounded = (scaled.numer() * &two + scaled.denom()).div_floor(&(scaled.denom() * &two));
    let (int, frac) = rounded.div_rem(&scale);
    let sign = if neg && !rounded.is_zero() { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{:0>width$}", frac.to_string(), width = places)
    }
}

/// True when `0 < p <= 1`.
pub fn is_world_prob(p: &Prob) -> bool {
    p.is_positive() && *p <= Prob::one()
}

/// True when `0 < p < 1`.
pub fn is_var_prob(p: &Prob) -> bool {
    p.is_positive() && *p < Prob::one()
}

pub fn ratio(n: i64, d: i64) -> Prob {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
