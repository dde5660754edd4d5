//! Small helpers around `BigRational`: the `<num>` / `<num>/<den>` text form
//! used by every file format and by CLI output, plus a few constructors that
//! keep test code terse.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer `{0}`")]
    BadInt(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `<num>` or `<num>/<den>`. The result is reduced; a negative
/// denominator moves its sign to the numerator.
pub fn parse_rational(s: &str) -> Result<BigRational, RatParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(RatParseError::Empty);
    }
    let (num_s, den_s) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num: BigInt = num_s
        .parse()
        .map_err(|_| RatParseError::BadInt(num_s.to_string()))?;
    let den: BigInt = match den_s {
        Some(d) => d
            .parse()
            .map_err(|_| RatParseError::BadInt(d.to_string()))?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(RatParseError::ZeroDenominator(s.to_string()));
    }
    Ok(BigRational::new(num, den))
}

/// Renders a rational as `<num>` when the denominator is 1, else `<num>/<den>`.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Integer as a rational.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `p/q` as a rational; panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// Rounds to the closest integer, halves away from zero.
pub fn round_to_nearest(r: &BigRational) -> BigInt {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if r.is_negative() {
        -((half - r).floor().to_integer())
    } else {
        (r + half).floor().to_integer()
    }
}
