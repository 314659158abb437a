//! Scalar field abstraction.
//!
//! Everything in the engine is generic over [`Scalar`], which is implemented
//! for exact arbitrary-precision rationals ([`Rational`]) and for `f64`.
//! A computation picks one scalar type for all of its values; the
//! [`ScalarMode`] flag names that choice at runtime (CLI, JSON).

use std::fmt::{self, Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact arbitrary-precision rational.
pub type Rational = BigRational;

/// Default absolute tolerance for float comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Which scalar field a computation runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarMode {
    Exact,
    Float,
}

impl ScalarMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarMode::Exact => "exact",
            ScalarMode::Float => "float",
        }
    }
}

impl Display for ScalarMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScalarMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" | "rational" => Ok(ScalarMode::Exact),
            "float" | "f64" => Ok(ScalarMode::Float),
            other => Err(Error::Parse(format!("unknown scalar mode `{other}`"))),
        }
    }
}

/// A field element the engine can compute with.
///
/// The by-reference operator bounds let hot loops avoid cloning the right
/// operand; the left operand is still consumed.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Num
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    const MODE: ScalarMode;

    fn from_i64(n: i64) -> Self;

    /// `num / den`; panics if `den == 0`.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Embeds an exact rational (exactly, or rounded in float mode).
    fn from_rational(q: &Rational) -> Self;

    /// Equality up to `tol` in float mode; exact equality otherwise.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    /// Parses `"p/q"`, `"p"` or (float mode only) a decimal literal.
    fn parse_scalar(s: &str) -> Result<Self>;

    /// Canonical string form: `"p/q"` for rationals, shortest round-trip
    /// decimal for floats.
    fn to_repr(&self) -> String;

    fn from_usize(n: usize) -> Self {
        Self::from_i64(n as i64)
    }

    fn abs_value(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// `self^k` by repeated squaring.
    fn powi(&self, k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * &base;
            }
        }
        acc
    }
}

fn split_ratio(s: &str) -> Option<(&str, &str)> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => Some((p.trim(), q.trim())),
        None => Some((s, "1")),
    }
}

impl Scalar for Rational {
    const MODE: ScalarMode = ScalarMode::Exact;

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // numerator/denominator beyond f64 range individually
            let n = self.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn parse_scalar(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("`{s}` is not a rational of the form p/q"));
        let (p, q) = split_ratio(s).ok_or_else(bad)?;
        let p = BigInt::from_str(p).map_err(|_| bad())?;
        let q = BigInt::from_str(q).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("`{s}` has a zero denominator")));
        }
        Ok(BigRational::new(p, q))
    }

    fn to_repr(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }
}

impl Scalar for f64 {
    const MODE: ScalarMode = ScalarMode::Float;

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_rational(q: &Rational) -> Self {
        Scalar::to_f64(q)
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }

    fn parse_scalar(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("`{s}` is not a number"));
        if let Some((p, q)) = s.trim().split_once('/') {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(Error::Parse(format!("`{s}` has a zero denominator")));
            }
            Ok(p / q)
        } else {
            s.trim().parse().map_err(|_| bad())
        }
    }

    fn to_repr(&self) -> String {
        format!("{self:?}")
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn powi(&self, k: u32) -> Self {
        f64::powi(*self, k as i32)
    }
}

/// Shorthand used throughout the tests and examples.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

/// `true` if `x` is exactly (exact mode) or approximately (float mode) zero.
pub fn is_negligible<T: Scalar>(x: &T, tol: f64) -> bool {
    x.approx_eq(&T::zero(), tol)
}
