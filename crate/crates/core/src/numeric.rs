//! Exact rational arithmetic.
//!
//! Every quantity in this crate (supports, confidences, LP entries, verdict
//! minima) is a [`Rational`]: an arbitrary-precision fraction kept normalized
//! at all times (positive denominator, gcd of numerator and denominator equal
//! to one, zero stored as 0/1). There is no floating point anywhere in the
//! decision path; even the optional decimal rendering below is integer long
//! division.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision signed integer.
pub type BigInt = num_bigint::BigInt;

/// Arbitrary-precision rational, normalized on construction.
///
/// Backed by `num_rational::BigRational`, which maintains the invariants this
/// crate relies on: denominator strictly positive, fraction fully reduced,
/// zero represented as 0/1. Its `Display` form is the textual form used in
/// rule files and reports: `p/q`, with `/q` omitted when the denominator is
/// one and the sign attached to the numerator (`-1/2`).
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumericError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("least common denominator of an empty list")]
    EmptyList,
    #[error("malformed rational '{0}': expected 'p' or 'p/q' with q > 0")]
    MalformedRational(String),
}

/// Shorthand constructor from machine integers, mostly for tests and fixtures.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Exact division with an explicit error on a zero divisor.
///
/// The native `/` on [`Rational`] panics when the divisor is zero; all
/// division on user-controlled data goes through here instead.
pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational, NumericError> {
    if b.is_zero() {
        return Err(NumericError::DivisionByZero);
    }
    Ok(a / b)
}

/// Least common multiple of the denominators of a non-empty list.
///
/// This is the `n` of the counter-model construction: scaling a frequency
/// vector by it clears every fraction.
pub fn lcm_denominators(values: &[Rational]) -> Result<BigInt, NumericError> {
    if values.is_empty() {
        return Err(NumericError::EmptyList);
    }
    let mut acc = BigInt::one();
    for v in values {
        acc = acc.lcm(v.denom());
    }
    Ok(acc)
}

/// Parses the textual form `p` or `p/q` (decimal integers, q > 0).
///
/// The sign belongs to the numerator: `-1/2` parses, `1/-2` does not. This is
/// stricter than `BigRational::from_str`, which panics on a zero denominator.
pub fn parse_rational(text: &str) -> Result<Rational, NumericError> {
    let malformed = || NumericError::MalformedRational(text.to_string());
    let parse_int = |s: &str| -> Result<BigInt, NumericError> {
        if s.is_empty() || s == "-" || s == "+" {
            return Err(malformed());
        }
        let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
        if !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(malformed());
        }
        s.parse::<BigInt>().map_err(|_| malformed())
    };
    match text.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(text)?)),
        Some((numer, denom)) => {
            let numer = parse_int(numer)?;
            if denom.is_empty() || !denom.chars().all(|c| c.is_ascii_digit()) {
                return Err(malformed());
            }
            let denom = denom.parse::<BigInt>().map_err(|_| malformed())?;
            if denom.is_zero() {
                return Err(malformed());
            }
            Ok(Rational::new(numer, denom))
        }
    }
}

/// Renders `value` as a decimal string with `digits` fractional digits,
/// rounded half away from zero, by integer long division.
///
/// Used only to annotate reports behind the `--decimal` flag; exact values
/// are never replaced by this rendering.
pub fn decimal_string(value: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let numer = value.numer().abs() * &scale;
    let denom = value.denom().clone();
    let (mut quotient, remainder) = numer.div_rem(&denom);
    if &remainder * 2 >= denom {
        quotient += 1;
    }
    let (int_part, frac_part) = quotient.div_rem(&scale);
    let sign = if value.is_negative() { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!(
            "{sign}{int_part}.{frac_part:0>width$}",
            width = digits as usize
        )
    }
}

/// True when `value` lies in the closed unit interval.
pub fn in_unit_interval(value: &Rational) -> bool {
    !value.is_negative() && *value <= Rational::one()
}
