use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

use super::MomentSequence;

/// Semicircle law with mean 0 and variance `variance`.
///
/// The moments are read off the expansion at infinity of
/// `g(z) = (z - sqrt(z^2 - 4σ²)) / (2σ²)`, i.e. in `w = 1/z`
/// `ĝ(w) = (1 - sqrt(1 - 4σ² w²)) / (2σ² w)`.
pub fn semicircle_moments<T: Scalar>(variance: &T, order: usize) -> Result<MomentSequence<T>> {
    if !(*variance > T::zero()) {
        return Err(Error::InvalidParameter(
            "semicircle variance must be positive".into(),
        ));
    }
    let n = order + 2;
    let four_var = T::from_i64(4) * variance;
    let radicand = TruncatedSeries::polynomial(&[T::one(), T::zero(), -four_var], n);
    let numerator = &TruncatedSeries::one(n) - &radicand.sqrt()?;
    let two_var = T::from_i64(2) * variance;
    let g = numerator.div_z_pow(1)?.scale(&(T::one() / &two_var));
    MomentSequence::from_cauchy_series(&g)
}

/// Marchenko–Pastur (free Poisson) law with rate `lambda`, from
/// `g(z) = (z + (1-λ) - sqrt((z-1-λ)^2 - 4λ)) / (2z)`, which in `w = 1/z` reads
/// `ĝ(w) = (1 + (1-λ) w - sqrt(1 - 2(1+λ) w + (1-λ)² w²)) / 2`.
pub fn marchenko_pastur_moments<T: Scalar>(lambda: &T, order: usize) -> Result<MomentSequence<T>> {
    if !(*lambda > T::zero()) {
        return Err(Error::InvalidParameter(
            "Marchenko-Pastur rate must be positive".into(),
        ));
    }
    let n = order + 1;
    let one = T::one();
    let one_minus = one.clone() - lambda;
    let one_plus = one.clone() + lambda;
    let radicand = TruncatedSeries::polynomial(
        &[
            one.clone(),
            -(T::from_i64(2) * &one_plus),
            one_minus.clone() * &one_minus,
        ],
        n,
    );
    let linear = TruncatedSeries::polynomial(&[one, one_minus], n);
    let g = (&linear - &radicand.sqrt()?).scale(&T::from_ratio(1, 2));
    MomentSequence::from_cauchy_series(&g)
}

/// Finitely supported measure `Σ w_i δ_{x_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure<T> {
    atoms: Vec<(T, T)>,
}

impl<T: Scalar> AtomicMeasure<T> {
    /// `atoms` are `(weight, position)` pairs; weights must be nonnegative
    /// and sum to 1, positions distinct.
    pub fn new(atoms: Vec<(T, T)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParameter(
                "atomic measure needs at least one atom".into(),
            ));
        }
        if atoms.iter().any(|(w, _)| *w < T::zero()) {
            return Err(Error::InvalidParameter(
                "atom weights must be nonnegative".into(),
            ));
        }
        let total = atoms.iter().fold(T::zero(), |acc, (w, _)| acc + w);
        if !total.approx_eq(&T::one(), 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "atom weights sum to {}, not 1",
                total.to_repr()
            )));
        }
        for (i, (_, x)) in atoms.iter().enumerate() {
            if atoms[..i].iter().any(|(_, y)| y == x) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate atom position {}",
                    x.to_repr()
                )));
            }
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(T, T)] {
        &self.atoms
    }

    /// The measure translated by `t`.
    pub fn shift(&self, t: &T) -> Self {
        Self {
            atoms: self
                .atoms
                .iter()
                .map(|(w, x)| (w.clone(), x.clone() + t))
                .collect(),
        }
    }
}

/// `m_n = Σ w_i x_i^n`.
pub fn atomic_moments<T: Scalar>(measure: &AtomicMeasure<T>, order: usize) -> MomentSequence<T> {
    let mut moments = vec![T::zero(); order + 1];
    for (w, x) in &measure.atoms {
        let mut p = w.clone();
        for m in moments.iter_mut() {
            *m += &p;
            p = p * x;
        }
    }
    // weights sum to one exactly in exact mode; pin m0 in float mode
    moments[0] = T::one();
    MomentSequence { moments }
}

pub fn point_mass<T: Scalar>(at: &T, order: usize) -> MomentSequence<T> {
    let measure = AtomicMeasure {
        atoms: vec![(T::one(), at.clone())],
    };
    atomic_moments(&measure, order)
}

/// Bernoulli law `(δ_{-1} + δ_1) / 2`.
pub fn symmetric_bernoulli<T: Scalar>(order: usize) -> MomentSequence<T> {
    let half = T::from_ratio(1, 2);
    let measure = AtomicMeasure {
        atoms: vec![(half.clone(), -T::one()), (half, T::one())],
    };
    atomic_moments(&measure, order)
}
