//! Exact rational helpers: parsing user input, decimal rendering.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parses an exact rational from `3`, `-0.25`, `.5`, `1e-3`, `2.5E2`, or
/// `1/4`. Whitespace around the number is ignored.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("`{s}` is not a number"));
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num.trim()).ok_or_else(bad)?;
        let den = parse_decimal(den.trim()).ok_or_else(bad)?;
        if den.is_zero() {
            return Err(Error::InvalidInput(format!("`{s}` divides by zero")));
        }
        return Ok(num / den);
    }
    parse_decimal(s).ok_or_else(bad)
}

// Exponents beyond this are rejected; they only serve to exhaust memory.
const MAX_EXPONENT: i64 = 4096;

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    if exponent.abs() > MAX_EXPONENT {
        return None;
    }
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigInt::parse_bytes(all_digits.as_bytes(), 10)?;
    if negative {
        value = -value;
    }
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u32);
    let power = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Some(if scale >= 0 {
        BigRational::from_integer(value * power)
    } else {
        BigRational::new(value, power)
    })
}

/// Rounds to `digits` decimal places, ties to even, and renders with exactly
/// that many places.
pub fn format_decimal(x: &BigRational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u32), digits);
    let scaled = x * BigRational::from_integer(scale);
    let floor = scaled.floor();
    let frac = &scaled - &floor;
    let half = BigRational::new(BigInt::one(), BigInt::from(2u32));
    let mut n = floor.to_integer();
    if frac > half || (frac == half && n.is_odd()) {
        n += 1;
    }
    render_scaled(&n, digits)
}

/// Truncates toward zero to `digits` decimal places.
pub fn truncate_decimal(x: &BigRational, digits: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10u32), digits);
    let scaled = x * BigRational::from_integer(scale);
    render_scaled(&scaled.trunc().to_integer(), digits)
}

fn render_scaled(n: &BigInt, digits: usize) -> String {
    let negative = n.sign() == Sign::Minus;
    let mut s = n.abs().to_string();
    if digits > 0 {
        if s.len() <= digits {
            s = format!("{}{s}", "0".repeat(digits + 1 - s.len()));
        }
        s.insert(s.len() - digits, '.');
    }
    if negative {
        s.insert(0, '-');
    }
    s
}

/// `a/b` form, or just `a` for integers.
pub fn to_fraction_string(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn from_usize(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn pow(x: &BigRational, n: usize) -> BigRational {
    num_traits::pow(x.clone(), n)
}

/// Serde adapter rendering a rational as its fraction string.
pub mod serde_fraction {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&to_fraction_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Like [`serde_fraction`] for optional values.
pub mod serde_opt_fraction {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        x: &Option<BigRational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match x {
            Some(x) => s.serialize_some(&to_fraction_string(x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<BigRational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}
