//! Exact rational scalars.
//!
//! Every coefficient in the crate is a [`Rational`]: an arbitrary-precision
//! numerator/denominator pair kept in lowest terms with a positive
//! denominator. Serialization always goes through strings of the form
//! `"p/q"` (or `"p"` for integers) so that JSON never sees a float.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{JacquetError, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p"`, `"p/q"`, or a terminating decimal such as `"-1.25"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || JacquetError::Parse(format!("not a rational number: {text:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(JacquetError::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let v = Rational::new(n, d);
        return Ok(if negative { -v } else { v });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Returns the integer value when `q` is integral and fits in an `i64`.
pub fn as_integer(q: &Rational) -> Option<i64> {
    if q.denom().is_one() {
        q.numer().to_i64()
    } else {
        None
    }
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

/// `n!` as a rational.
pub fn factorial(n: u32) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    Rational::from_integer(acc)
}

/// Binomial coefficient `C(n, k)`.
pub fn binomial(n: u32, k: u32) -> Rational {
    if k > n {
        return zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Serde adaptor storing a rational as its `"p/q"` string.
pub mod serde_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adaptor for `Vec<Rational>`.
pub mod serde_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        items
            .iter()
            .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("2").unwrap(), int(2));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn canonical_format() {
        assert_eq!(format_rational(&rat(6, -8)), "-3/4");
        assert_eq!(format_rational(&int(5)), "5");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), int(10));
        assert_eq!(binomial(2, 5), int(0));
        assert_eq!(factorial(0), int(1));
    }
}
