//! Helpers around [`BigRational`]: parsing, canonical string form, and a few
//! integer-rounding utilities used throughout the exact code paths.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ArithError;

/// Arbitrary precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"a/b"`, `"a"` or a plain decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational, ArithError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(ArithError::Parse(s.to_string()));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if t.contains('/') {
            return Err(ArithError::Parse(s.to_string()));
        }
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ArithError::Parse(s.to_string()));
        }
        let num = BigInt::from_str(&digits).map_err(|_| ArithError::Parse(s.to_string()))?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(num, den);
        return Ok(if negative { -value } else { value });
    }
    let value = Rational::from_str(t).map_err(|_| ArithError::Parse(s.to_string()))?;
    Ok(value)
}

/// Canonical `"a/b"` form, `"a"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn floor_int(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub fn ceil_int(r: &Rational) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}

/// `2^-k` as a rational.
pub fn dyadic(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

/// Largest multiple of `2^-k` that is `<= r`.
pub fn round_down_dyadic(r: &Rational, k: u32) -> Rational {
    let scale = BigInt::one() << k;
    let scaled = Rational::from_integer(scale.clone()) * r;
    Rational::new(floor_int(&scaled), scale)
}

/// Nearest multiple of `2^-k` (ties away from zero).
pub fn round_dyadic(r: &Rational, k: u32) -> Rational {
    let scale = BigInt::one() << k;
    let scaled = Rational::from_integer(scale.clone()) * r;
    let rounded = if scaled.is_negative() {
        -floor_int(&(-scaled + rat(1, 2)))
    } else {
        floor_int(&(scaled + rat(1, 2)))
    };
    Rational::new(rounded, scale)
}

pub fn abs(r: &Rational) -> Rational {
    if r.is_negative() {
        -r.clone()
    } else {
        r.clone()
    }
}

pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}

/// Decimal rendering with `digits` fractional digits, truncated toward zero.
pub fn to_decimal_string(r: &Rational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (r.numer() * &scale) / r.denom();
    let negative = scaled.is_negative() || (scaled.is_zero() && r.is_negative());
    let mag = scaled.abs().to_string();
    let padded = if mag.len() <= digits {
        format!("{}{}", "0".repeat(digits + 1 - mag.len()), mag)
    } else {
        mag
    };
    let (int_part, frac_part) = padded.split_at(padded.len() - digits);
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// Lossy conversion for diagnostics only; never used in certified paths.
pub fn to_f64(r: &Rational) -> f64 {
    to_decimal_string(r, 17).parse().unwrap_or(f64::NAN)
}

/// `serde` adapter serializing a rational as its canonical string.
pub mod serde_str {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}

/// Same as [`serde_str`] for sequences of rationals.
pub mod serde_vec {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_rational(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rational(s).map_err(D::Error::custom))
            .collect()
    }
}
