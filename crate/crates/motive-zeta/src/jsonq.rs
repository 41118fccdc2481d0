//! JSON encoding of exact rationals.
//!
//! One rule is used everywhere JSON is produced or consumed:
//!
//! * entries of a **coefficient list** are emitted as plain JSON integers
//!   when the value is integral and fits in `i64`, and as `"num/den"`
//!   strings otherwise;
//! * **scalar** rational fields (determinants, fractions, bounds, Dirichlet
//!   coefficients) are always strings, so their type never flips when a
//!   value happens to be integral.
//!
//! Parsers accept both forms in every position. Floating-point JSON numbers
//! are rejected: files are exact or they are wrong.

use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::{BigRational, One, ToPrimitive};
use serde_json::Value;
use std::str::FromStr;

/// Encode one coefficient: integer when it is an integral `i64`, string
/// otherwise.
pub fn coeff_to_json(x: &BigRational) -> Value {
    if x.denom().is_one() {
        if let Some(v) = x.numer().to_i64() {
            return Value::from(v);
        }
    }
    Value::String(x.to_string())
}

/// Encode a coefficient list in ascending degree.
pub fn coeffs_to_json(xs: &[BigRational]) -> Value {
    Value::Array(xs.iter().map(coeff_to_json).collect())
}

/// Encode a scalar rational; always a string.
pub fn scalar_to_json(x: &BigRational) -> Value {
    Value::String(x.to_string())
}

/// Decode a rational from either an integer or a `"num/den"` string.
pub fn rational_from_json(v: &Value) -> Result<BigRational> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(BigInt::from(i)))
            } else if let Some(u) = n.as_u64() {
                Ok(BigRational::from_integer(BigInt::from(u)))
            } else {
                Err(Error::BadInput(format!(
                    "expected an exact rational, got floating point {n}"
                )))
            }
        }
        Value::String(s) => rational_from_str(s),
        other => Err(Error::BadInput(format!(
            "expected an integer or \"num/den\" string, got {other}"
        ))),
    }
}

/// Parse a rational from text: `"3"`, `"-3"`, or `"num/den"`.
pub fn rational_from_str(s: &str) -> Result<BigRational> {
    let t = s.trim();
    if t.contains('/') {
        let (n, d) = t.split_once('/').unwrap();
        let numer = BigInt::from_str(n.trim())
            .map_err(|_| Error::BadInput(format!("bad rational `{s}`")))?;
        let denom = BigInt::from_str(d.trim())
            .map_err(|_| Error::BadInput(format!("bad rational `{s}`")))?;
        if denom == BigInt::from(0) {
            return Err(Error::DivisionByZero);
        }
        Ok(BigRational::new(numer, denom))
    } else {
        let numer =
            BigInt::from_str(t).map_err(|_| Error::BadInput(format!("bad rational `{s}`")))?;
        Ok(BigRational::from_integer(numer))
    }
}

/// Decode a coefficient list.
pub fn coeffs_from_json(v: &Value) -> Result<Vec<BigRational>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::BadInput(format!("expected a coefficient list, got {v}")))?;
    arr.iter().map(rational_from_json).collect()
}

/// Fetch a required field of a JSON object.
pub fn get<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::BadInput(format!("missing field `{key}`")))
}

/// Fetch a required u64 field.
pub fn get_u64(obj: &Value, key: &str) -> Result<u64> {
    get(obj, key)?
        .as_u64()
        .ok_or_else(|| Error::BadInput(format!("field `{key}` must be a nonnegative integer")))
}

/// Fetch a required i64 field.
pub fn get_i64(obj: &Value, key: &str) -> Result<i64> {
    get(obj, key)?
        .as_i64()
        .ok_or_else(|| Error::BadInput(format!("field `{key}` must be an integer")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn integral_coefficients_are_numbers() {
        assert_eq!(coeff_to_json(&q(-3, 1)), Value::from(-3i64));
        assert_eq!(coeff_to_json(&q(1, 2)), Value::String("1/2".into()));
    }

    #[test]
    fn huge_integers_fall_back_to_strings() {
        let big = BigRational::from_integer(BigInt::from(i64::MAX) * 2);
        match coeff_to_json(&big) {
            Value::String(s) => assert_eq!(s, big.to_string()),
            other => panic!("expected string, got {other}"),
        }
    }

    #[test]
    fn scalars_are_always_strings() {
        assert_eq!(scalar_to_json(&q(4, 1)), Value::String("4".into()));
    }

    #[test]
    fn both_forms_parse() {
        assert_eq!(rational_from_json(&Value::from(5i64)).unwrap(), q(5, 1));
        assert_eq!(
            rational_from_json(&Value::String("-7/3".into())).unwrap(),
            q(-7, 3)
        );
        assert!(rational_from_json(&Value::from(0.5f64)).is_err());
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(rational_from_str("1/0"), Err(Error::DivisionByZero));
    }
}
