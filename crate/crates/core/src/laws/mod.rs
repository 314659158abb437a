//! Laws as truncated moment sequences.
//!
//! A law is represented by its moments `m_0 = 1, m_1, ..., m_N`; densities,
//! supports and Cauchy transforms are derived views.

mod closed_form;
mod named;

pub use closed_form::{density_grid, ClosedForm, DensityPoint};
pub use named::{
    atomic_moments, marchenko_pastur_moments, point_mass, semicircle_moments, symmetric_bernoulli,
    AtomicMeasure,
};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

/// Moments `m_0..m_N` of a (formal) law, with `m_0 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence<T> {
    moments: Vec<T>,
}

impl<T: Scalar> MomentSequence<T> {
    pub fn new(moments: Vec<T>) -> Result<Self> {
        match moments.first() {
            Some(m0) if m0.is_one() => Ok(Self { moments }),
            _ => Err(Error::Normalization),
        }
    }

    pub fn order(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn moments(&self) -> &[T] {
        &self.moments
    }

    /// `m_n`; panics above the order.
    pub fn get(&self, n: usize) -> &T {
        &self.moments[n]
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self {
            moments: self.moments[..=order.min(self.order())].to_vec(),
        }
    }

    /// Moment generating series `m(z) = Σ m_n z^n` of order N.
    pub fn generating_series(&self) -> TruncatedSeries<T> {
        TruncatedSeries::new(self.moments.clone())
    }

    pub fn from_generating_series(s: &TruncatedSeries<T>) -> Result<Self> {
        Self::new(s.coeffs().to_vec())
    }

    /// The Cauchy transform at infinity as a series in `w = 1/z`:
    /// `Ĝ(w) = Σ m_n w^(n+1)`, of order N+1.
    pub fn cauchy_series(&self) -> TruncatedSeries<T> {
        self.generating_series().mul_z_pow(1)
    }

    /// Inverse of [`cauchy_series`](Self::cauchy_series): requires zero
    /// constant term and leading coefficient 1.
    pub fn from_cauchy_series(g: &TruncatedSeries<T>) -> Result<Self> {
        if g.order() < 1 || !g.coeffs()[0].is_zero() {
            return Err(Error::Precondition(
                "a Cauchy series must vanish at w = 0 and have order >= 1".into(),
            ));
        }
        Self::new(g.coeffs()[1..].to_vec())
    }

    /// Moments of the dilated law `x -> c x`.
    pub fn dilate(&self, c: &T) -> Self {
        let mut scale = T::one();
        let moments = self
            .moments
            .iter()
            .map(|m| {
                let v = m.clone() * &scale;
                scale = scale.clone() * c;
                v
            })
            .collect();
        Self { moments }
    }

    pub fn mean(&self) -> Option<&T> {
        self.moments.get(1)
    }

    /// `m_2 - m_1^2`, if the order allows.
    pub fn variance(&self) -> Option<T> {
        if self.order() < 2 {
            return None;
        }
        Some(self.moments[2].clone() - &(self.moments[1].clone() * &self.moments[1]))
    }

    /// Smallest eigenvalue of the Hankel matrix `(m_{i+j})`, `0 <= i,j <= N/2`.
    pub fn hankel_min_eigenvalue(&self) -> f64 {
        let k = self.order() / 2 + 1;
        let h = DMatrix::from_fn(k, k, |i, j| self.moments[i + j].to_f64());
        SymmetricEigen::new(h)
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Positive semidefiniteness of the Hankel matrix, up to `tol`.
    pub fn is_hankel_psd(&self, tol: f64) -> bool {
        self.hankel_min_eigenvalue() >= -tol
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.moments.len() == other.moments.len()
            && self
                .moments
                .iter()
                .zip(&other.moments)
                .all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> MomentSequence<U> {
        MomentSequence {
            moments: self.moments.iter().map(f).collect(),
        }
    }
}

/// The pair (φ-law, ψ-law) of one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStateLaw<T> {
    phi: MomentSequence<T>,
    psi: MomentSequence<T>,
}

impl<T: Scalar> TwoStateLaw<T> {
    pub fn new(phi: MomentSequence<T>, psi: MomentSequence<T>) -> Result<Self> {
        if phi.order() != psi.order() {
            return Err(Error::OrderMismatch {
                left: phi.order(),
                right: psi.order(),
            });
        }
        Ok(Self { phi, psi })
    }

    /// Both states carry the same law.
    pub fn single_state(law: MomentSequence<T>) -> Self {
        Self {
            phi: law.clone(),
            psi: law,
        }
    }

    pub fn phi(&self) -> &MomentSequence<T> {
        &self.phi
    }

    pub fn psi(&self) -> &MomentSequence<T> {
        &self.psi
    }

    pub fn order(&self) -> usize {
        self.phi.order()
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self {
            phi: self.phi.truncate(order),
            psi: self.psi.truncate(order),
        }
    }

    pub fn dilate(&self, c: &T) -> Self {
        Self {
            phi: self.phi.dilate(c),
            psi: self.psi.dilate(c),
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.phi.approx_eq(&other.phi, tol) && self.psi.approx_eq(&other.psi, tol)
    }

    /// Centered in both states (`φ(X) = ψ(X) = 0`).
    pub fn is_centered(&self) -> bool {
        self.order() >= 1 && self.phi.get(1).is_zero() && self.psi.get(1).is_zero()
    }
}
