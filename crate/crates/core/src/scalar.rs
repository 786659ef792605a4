//! Scalar abstraction shared by the exact and floating matrix backends.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Field-like scalar usable by the matrix, polynomial and Lie-geometry code.
///
/// Exact scalars (`BigRational`) compare with `==`; floating scalars compare
/// up to [`Scalar::tolerance`].
pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync
{
    const EXACT: bool;

    /// Absolute tolerance used by structural checks (skewness, orthogonality).
    fn tolerance() -> f64;

    /// `twice / 2`, exact for rationals.
    fn from_twice(twice: i64) -> Self {
        Self::from_i64(twice).expect("i64 fits every scalar") / Self::from_i64(2).unwrap()
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// JSON encoding: numbers for floats, `"p/q"` strings for rationals.
    fn to_json(&self) -> serde_json::Value;

    fn from_json(v: &serde_json::Value) -> Option<Self>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn tolerance() -> f64 {
        1e-12
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(*self)
    }

    fn from_json(v: &serde_json::Value) -> Option<Self> {
        v.as_f64()
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn tolerance() -> f64 {
        1e-5
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(*self)
    }

    fn from_json(v: &serde_json::Value) -> Option<Self> {
        v.as_f64().map(|x| x as f32)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn tolerance() -> f64 {
        0.0
    }

    fn from_twice(twice: i64) -> Self {
        BigRational::new(BigInt::from(twice), BigInt::from(2))
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }

    fn from_json(v: &serde_json::Value) -> Option<Self> {
        parse_rational(v.as_str()?)
    }
}

/// Parses `"p"` or `"p/q"` into a normalized rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
        Some((p, q)) => {
            let p = p.trim().parse::<BigInt>().ok()?;
            let q = q.trim().parse::<BigInt>().ok()?;
            if q == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(p, q))
        }
    }
}

/// Compares two scalars exactly (rationals) or within `tol` (floats).
pub fn approx_eq<T: Scalar>(a: &T, b: &T, tol: f64) -> bool {
    if T::EXACT {
        a == b
    } else {
        (a.clone() - b.clone()).abs().to_f64_lossy() <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_json_round_trip() {
        let q = BigRational::new(BigInt::from(-3), BigInt::from(6));
        let v = q.to_json();
        assert_eq!(v, serde_json::json!("-1/2"));
        assert_eq!(BigRational::from_json(&v), Some(q));
        assert_eq!(
            BigRational::from_json(&serde_json::json!("8")),
            Some(BigRational::from_integer(8.into()))
        );
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn from_twice_is_exact() {
        assert_eq!(BigRational::from_twice(3).to_string(), "3/2");
        assert_eq!(f64::from_twice(-5), -2.5);
        assert_eq!(f32::from_twice(4), 2.0);
    }
}
