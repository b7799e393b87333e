//! Scalar backends.
//!
//! Exact mode uses arbitrary-precision rationals; float mode uses `f64`.
//! Code that must run in both modes is written against [`Field`].

use std::fmt::Debug;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar, always reduced with a positive denominator.
pub type Rational = BigRational;

/// Arithmetic shared by the exact and float backends.
pub trait Field: Num + Signed + Clone + PartialOrd + FromPrimitive + Debug + Send + Sync {
    fn to_f64_lossy(&self) -> f64;

    /// Exact `p/q` text when the backend is exact.
    fn fraction(&self) -> Option<String> {
        None
    }

    fn of(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize fits every backend")
    }

    fn powi(&self, exp: usize) -> Self {
        num::traits::pow(self.clone(), exp)
    }

    /// `self^-exp`; the caller guarantees `self != 0`.
    fn powi_neg(&self, exp: usize) -> Self {
        Self::one() / self.powi(exp)
    }
}

impl Field for f64 {
    fn to_f64_lossy(&self) -> f64 {
        *self
    }

    fn powi(&self, exp: usize) -> Self {
        f64::powi(*self, exp as i32)
    }
}

impl Field for Rational {
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn fraction(&self) -> Option<String> {
        Some(fraction_string(self))
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or an integer. Decimals are rejected so nothing is silently rounded.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::ParseRational(text.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => BigInt::from_str(s)
            .map(Rational::from_integer)
            .map_err(|_| bad()),
    }
}

/// Parses a rational or, failing that, a decimal literal converted exactly to a rational.
pub fn parse_rational_or_decimal(text: &str) -> Result<Rational> {
    if let Ok(r) = parse_rational(text) {
        return Ok(r);
    }
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| Error::ParseRational(text.to_string()))?;
    Rational::from_float(v).ok_or_else(|| Error::ParseRational(text.to_string()))
}

pub fn fraction_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `(x, y)_k = prod_{i=0}^{k-1} (1 - x y^i)`.
pub fn pochhammer<T: Field>(x: &T, y: &T, k: usize) -> T {
    let mut acc = T::one();
    let mut yi = T::one();
    for _ in 0..k {
        acc = acc * (T::one() - x.clone() * yi.clone());
        yi = yi * y.clone();
    }
    acc
}

pub fn abs<T: Field>(x: &T) -> T {
    Signed::abs(x)
}

pub fn max_abs<T: Field>(values: impl IntoIterator<Item = T>) -> T {
    values
        .into_iter()
        .map(|v| abs(&v))
        .fold(T::zero(), |m, v| if v > m { v } else { m })
}

/// Checks `x > 1` for a scalar parameter.
pub fn require_gt_one<T: Field>(name: &str, x: &T) -> Result<()> {
    if *x > T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must exceed 1, got {x:?}")))
    }
}

pub fn is_one<T: Field>(x: &T) -> bool {
    x.is_one()
}
