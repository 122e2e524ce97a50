//! Exact rational numbers and their textual form.
//!
//! Rationals travel through JSON as strings `"num/den"` or as plain integers.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serializer};

use crate::error::{BoundError, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p/q"`, `"p"` or a decimal literal such as `"1.5"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || BoundError::InvalidArg(format!("not a rational: {text:?}"));
    if let Some((num, den)) = text.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.trim_start().starts_with('-');
        let whole_val = if whole.is_empty() || whole == "-" || whole == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(whole).map_err(|_| bad())?
        };
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        let frac_val = BigInt::from_str(frac).map_err(|_| bad())?;
        let mut num = whole_val.abs() * &scale + frac_val;
        if negative {
            num = -num;
        }
        return Ok(Rational::new(num, scale));
    }
    BigInt::from_str(text).map(Rational::from_integer).map_err(|_| bad())
}

pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Nearest `f64`, correctly scaled even when numerator and denominator
/// individually overflow.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Rational approximation of a finite float, exact in binary.
pub fn from_f64(value: f64) -> Option<Rational> {
    Rational::from_float(value)
}

pub fn floor_int(value: &Rational) -> BigInt {
    value.floor().to_integer()
}

pub fn ceil_int(value: &Rational) -> BigInt {
    value.ceil().to_integer()
}

/// Least common multiple of positive rationals: `lcm(nums) / gcd(dens)`.
pub fn lcm(values: &[Rational]) -> Option<Rational> {
    let first = values.first()?;
    let mut num = first.numer().clone();
    let mut den = first.denom().clone();
    for v in &values[1..] {
        num = num.lcm(v.numer());
        den = den.gcd(v.denom());
    }
    Some(Rational::new(num, den))
}

/// Greatest common divisor of positive rationals: `gcd(nums) / lcm(dens)`.
pub fn gcd(values: &[Rational]) -> Option<Rational> {
    let first = values.first()?;
    let mut num = first.numer().clone();
    let mut den = first.denom().clone();
    for v in &values[1..] {
        num = num.gcd(v.numer());
        den = den.lcm(v.denom());
    }
    Some(Rational::new(num, den))
}

pub fn positive_part(value: Rational) -> Rational {
    if value.is_negative() {
        Rational::zero()
    } else {
        value
    }
}

pub fn is_one(value: &Rational) -> bool {
    value.is_one()
}

pub(crate) fn serialize<S: Serializer>(value: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(value))
}

pub(crate) fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Int(v) => Ok(int(v)),
        Raw::Text(t) => parse_rational(&t).map_err(de::Error::custom),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("250").unwrap(), int(250));
        assert_eq!(parse_rational("1.25").unwrap(), ratio(5, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), ratio(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn lcm_and_gcd_of_periods() {
        assert_eq!(lcm(&[ratio(1, 2), ratio(1, 3)]).unwrap(), int(1));
        assert_eq!(lcm(&[int(2), int(3), ratio(3, 2)]).unwrap(), int(6));
        assert_eq!(gcd(&[int(4), int(6)]).unwrap(), int(2));
        assert_eq!(gcd(&[ratio(1, 2), ratio(1, 3)]).unwrap(), ratio(1, 6));
    }

    #[test]
    fn huge_rationals_convert() {
        let num = num_traits::pow(BigInt::from(2), 3000) + BigInt::one();
        let den = num_traits::pow(BigInt::from(2), 3001);
        assert!((to_f64(&Rational::new(num, den)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn format_round_trips() {
        for s in ["1/3", "7", "-2/5"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
    }
}
