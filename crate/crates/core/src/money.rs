//! Exact rational values and their dollar rendering.
//!
//! Utilities are integer cents; expectations are exact rationals in cents.
//! Display rounds half-up (towards +infinity) to whole cents, then prints
//! dollars with two decimals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Rounds an exact cent amount to whole cents, ties going up.
pub fn round_half_up_cents(cents: &Rational) -> BigInt {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let shifted = cents + half;
    shifted.numer().div_floor(shifted.denom())
}

/// Formats an exact cent amount as dollars with two decimals (`-0.03`, `0.13`).
pub fn format_dollars(cents: &Rational) -> String {
    format_whole_cents(&round_half_up_cents(cents))
}

pub fn format_whole_cents(cents: &BigInt) -> String {
    let sign = if cents.is_negative() { "-" } else { "" };
    let abs = cents.abs();
    let (dollars, rem) = abs.div_rem(&BigInt::from(100));
    format!("{sign}{dollars}.{rem:02}")
}

/// Exact rendering: `13`, `-10/3`.
pub fn format_exact(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses `a`, `a/b` or a decimal such as `0.25` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let mut numer: BigInt = digits.parse().ok()?;
        if negative {
            numer = -numer;
        }
        let denom = num_traits::pow(BigInt::from(10), frac.len());
        return Some(Rational::new(numer, denom));
    }
    text.parse::<BigInt>().ok().map(Rational::from_integer)
}

/// Lossy conversion for reporting and Monte Carlo comparisons.
pub fn to_f64(value: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}
