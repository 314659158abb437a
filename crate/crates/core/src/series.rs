//! Truncated formal power series.
//!
//! A [`TruncatedSeries`] of order `N` stores the coefficients of `z^0..z^N`;
//! everything above `z^N` is unknown, not zero. Binary operations return the
//! smallest order at which the result is still fully determined.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar, ScalarMode};

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> TruncatedSeries<T> {
    /// Builds a series from `coeffs[0..=N]`; the order is `coeffs.len() - 1`.
    ///
    /// Panics on an empty vector.
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a truncated series needs at least one coefficient"
        );
        Self { coeffs }
    }

    /// A polynomial viewed as a series of the given order (zero padded or cut).
    pub fn polynomial(coeffs: &[T], order: usize) -> Self {
        let mut c: Vec<T> = coeffs.iter().take(order + 1).cloned().collect();
        c.resize(order + 1, T::zero());
        Self { coeffs: c }
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![T::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(T::one(), order)
    }

    pub fn constant(c: T, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c * z^k` to the given order.
    pub fn monomial(c: T, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// The identity series `z`.
    pub fn identity(order: usize) -> Self {
        Self::monomial(T::one(), 1, order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of `z^k`; `None` above the truncation order.
    pub fn coeff(&self, k: usize) -> Option<&T> {
        self.coeffs.get(k)
    }

    /// Drops information above `order` (no-op if already lower).
    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        Self {
            coeffs: self.coeffs[..=n].to_vec(),
        }
    }

    /// Index of the first coefficient that is not negligible, if any.
    pub fn valuation(&self, tol: f64) -> Option<usize> {
        self.coeffs
            .iter()
            .position(|c| !c.approx_eq(&T::zero(), tol))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.order() == other.order()
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn scale(&self, c: &T) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a.clone() * c).collect(),
        }
    }

    /// Multiplication by `z^k`; the order grows by `k` since the low
    /// coefficients are known zeros.
    pub fn mul_z_pow(&self, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Division by `z^k`; requires the first `k` coefficients to vanish exactly.
    pub fn div_z_pow(&self, k: usize) -> Result<Self> {
        if k > self.order() {
            return Err(Error::OrderExceeded {
                requested: k,
                supported: self.order(),
            });
        }
        if self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return Err(Error::Precondition(format!(
                "series is not divisible by z^{k}"
            )));
        }
        Ok(Self {
            coeffs: self.coeffs[k..].to_vec(),
        })
    }

    pub fn add_series(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Self {
            coeffs: (0..=n)
                .map(|i| self.coeffs[i].clone() + &other.coeffs[i])
                .collect(),
        }
    }

    pub fn sub_series(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Self {
            coeffs: (0..=n)
                .map(|i| self.coeffs[i].clone() - &other.coeffs[i])
                .collect(),
        }
    }

    /// Cauchy product to `min(order_a, order_b)`.
    pub fn mul_series(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        self.mul_to(other, n)
    }

    /// Cauchy product computed only up to `order` (which must not exceed
    /// either operand's order).
    fn mul_to(&self, other: &Self, order: usize) -> Self {
        let mut coeffs = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc = T::zero();
            for i in 0..=k {
                if self.coeffs[i].is_zero() || other.coeffs[k - i].is_zero() {
                    continue;
                }
                acc += &(self.coeffs[i].clone() * &other.coeffs[k - i]);
            }
            coeffs.push(acc);
        }
        Self { coeffs }
    }

    /// `self^k` to the operand's order.
    pub fn pow(&self, k: usize) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..k {
            acc = acc.mul_series(self);
        }
        acc
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::NonInvertible);
        }
        let inv0 = T::one() / a0;
        let mut b: Vec<T> = Vec::with_capacity(self.coeffs.len());
        b.push(inv0.clone());
        for n in 1..=self.order() {
            let mut acc = T::zero();
            for i in 1..=n {
                if self.coeffs[i].is_zero() {
                    continue;
                }
                acc += &(self.coeffs[i].clone() * &b[n - i]);
            }
            b.push(-(acc * &inv0));
        }
        Ok(Self { coeffs: b })
    }

    /// `self / other`. A common factor `z^v` is cancelled first, so the
    /// quotient of two series vanishing at the origin is well defined; the
    /// result order drops by `v`.
    pub fn divide(&self, other: &Self) -> Result<Self> {
        let v = other
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .ok_or(Error::NonInvertible)?;
        let num = self.div_z_pow(v).map_err(|_| Error::NonInvertible)?;
        let den = other.div_z_pow(v)?;
        Ok(num.mul_series(&den.reciprocal()?))
    }

    /// The composition `self(inner(z))`; `inner` must have no constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::CompositionDomain);
        }
        let qn = inner.order();
        // Unknown coefficients of `self` beyond its order only enter at
        // z^((order+1)·v), where v is the valuation of `inner`.
        let v = inner
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(qn + 1);
        let order = qn.min((self.order() + 1) * v - 1);
        let q = inner.truncate(order);
        let mut acc = Self::constant(self.coeffs[self.order()].clone(), order);
        for k in (0..self.order()).rev() {
            acc = acc.mul_to(&q, order);
            acc.coeffs[0] += &self.coeffs[k];
        }
        Ok(acc)
    }

    /// Compositional inverse `r` with `self(r(u)) = u`, solved coefficient
    /// by coefficient: `r_n` enters `[u^n] self(r)` only through `q_1 r_n`.
    pub fn revert(&self) -> Result<Self> {
        let n = self.order();
        if !self.coeffs[0].is_zero() || n < 1 || self.coeffs[1].is_zero() {
            return Err(Error::ReversionSingular);
        }
        let q1 = self.coeffs[1].clone();
        let mut r = Self::zero(n);
        r.coeffs[1] = T::one() / &q1;
        for k in 2..=n {
            let partial = r.truncate(k);
            let lhs = self.truncate(k).compose(&partial)?;
            r.coeffs[k] = -(lhs.coeffs[k].clone() / &q1);
        }
        Ok(r)
    }

    /// Principal square root (constant term 1) of a series with constant term 1.
    pub fn sqrt(&self) -> Result<Self> {
        if !self.coeffs[0].approx_eq(&T::one(), 0.0) {
            return Err(Error::SqrtNormalization);
        }
        let two = T::from_i64(2);
        let mut s: Vec<T> = Vec::with_capacity(self.coeffs.len());
        s.push(T::one());
        for n in 1..=self.order() {
            let mut acc = self.coeffs[n].clone();
            for i in 1..n {
                acc -= &(s[i].clone() * &s[n - i]);
            }
            s.push(acc / &two);
        }
        Ok(Self { coeffs: s })
    }

    /// Evaluates the truncated polynomial at a complex point.
    pub fn eval_complex(&self, w: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c.to_f64())
    }

    /// Coefficientwise map into another scalar field.
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> TruncatedSeries<U> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

impl TruncatedSeries<Rational> {
    pub fn to_float(&self) -> TruncatedSeries<f64> {
        self.map(|c| c.to_f64())
    }
}

impl<T: Scalar> Add for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn add(self, rhs: Self) -> Self::Output {
        self.add_series(rhs)
    }
}

impl<T: Scalar> Sub for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn sub(self, rhs: Self) -> Self::Output {
        self.sub_series(rhs)
    }
}

impl<T: Scalar> Mul for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn mul(self, rhs: Self) -> Self::Output {
        self.mul_series(rhs)
    }
}

impl<T: Scalar> Neg for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn neg(self) -> Self::Output {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    order: usize,
    coeffs: Vec<String>,
}

impl<T: Scalar> Serialize for TruncatedSeries<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            order: self.order(),
            coeffs: self.coeffs.iter().map(T::to_repr).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for TruncatedSeries<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = SeriesRepr::deserialize(deserializer)?;
        if repr.coeffs.len() != repr.order + 1 {
            return Err(D::Error::custom(format!(
                "order {} needs {} coefficients, got {}",
                repr.order,
                repr.order + 1,
                repr.coeffs.len()
            )));
        }
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| T::parse_scalar(s))
            .collect::<Result<Vec<T>>>()
            .map_err(D::Error::custom)?;
        Ok(Self::new(coeffs))
    }
}

/// A series whose scalar field is chosen at runtime.
///
/// Arithmetic between different modes is refused rather than converted.
#[derive(Debug, Clone, PartialEq)]
pub enum AnySeries {
    Exact(TruncatedSeries<Rational>),
    Float(TruncatedSeries<f64>),
}

macro_rules! any_binop {
    ($name:ident, $method:ident) => {
        pub fn $name(&self, other: &AnySeries) -> Result<AnySeries> {
            match (self, other) {
                (AnySeries::Exact(a), AnySeries::Exact(b)) => Ok(AnySeries::Exact(a.$method(b))),
                (AnySeries::Float(a), AnySeries::Float(b)) => Ok(AnySeries::Float(a.$method(b))),
                _ => Err(Error::ModeMismatch {
                    left: self.mode(),
                    right: other.mode(),
                }),
            }
        }
    };
}

impl AnySeries {
    pub fn mode(&self) -> ScalarMode {
        match self {
            AnySeries::Exact(_) => ScalarMode::Exact,
            AnySeries::Float(_) => ScalarMode::Float,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            AnySeries::Exact(s) => s.order(),
            AnySeries::Float(s) => s.order(),
        }
    }

    any_binop!(try_add, add_series);
    any_binop!(try_sub, sub_series);
    any_binop!(try_mul, mul_series);

    pub fn try_compose(&self, inner: &AnySeries) -> Result<AnySeries> {
        match (self, inner) {
            (AnySeries::Exact(a), AnySeries::Exact(b)) => a.compose(b).map(AnySeries::Exact),
            (AnySeries::Float(a), AnySeries::Float(b)) => a.compose(b).map(AnySeries::Float),
            _ => Err(Error::ModeMismatch {
                left: self.mode(),
                right: inner.mode(),
            }),
        }
    }
}
