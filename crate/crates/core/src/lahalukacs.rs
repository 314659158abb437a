//! Quadratic regression of `X - Y` on `S = X + Y` for identically distributed
//! c-free pairs, the transform it forces on the φ-law of `S`, and the two
//! explicit families (constant and linear conditional variance) that realize
//! it.

use num_complex::Complex64;

use crate::cumulants::{cumulants_to_moments, TwoStateCumulants};
use crate::error::{Error, Result};
use crate::freeprod::{CFreeFamily, State, WordSum};
use crate::laws::{ClosedForm, MomentSequence, TwoStateLaw};
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

/// `φ((X - Y)² Sⁿ) = c φ((4 + 2aS + bS²) Sⁿ)` for all `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionParams<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Scalar> RegressionParams<T> {
    /// Parameters with the only admissible `c = 1 / (2 + b)`.
    pub fn new(a: T, b: T) -> Result<Self> {
        let c = c_from_b(&b)?;
        Self::with_c(a, b, c)
    }

    pub fn with_c(a: T, b: T, c: T) -> Result<Self> {
        if !(b > -T::from_i64(2)) {
            return Err(Error::InvalidParameter(format!(
                "b = {} must exceed -2",
                b.to_repr()
            )));
        }
        Ok(Self { a, b, c })
    }
}

pub fn c_from_b<T: Scalar>(b: &T) -> Result<T> {
    let d = T::from_i64(2) + b;
    if d.is_zero() {
        return Err(Error::InvalidParameter("b = -2 leaves c undefined".into()));
    }
    Ok(T::one() / &d)
}

/// `M_S = ((2+b) - (2az + b) m_S) / ((2+b) - (4z² + 2az + b) m_S)`; the
/// denominator has constant term 2.
pub fn mmm_transform<T: Scalar>(
    m_s: &MomentSequence<T>,
    params: &RegressionParams<T>,
) -> Result<MomentSequence<T>> {
    if !(params.b > -T::from_i64(2)) {
        return Err(Error::InvalidParameter(format!(
            "b = {} must exceed -2",
            params.b.to_repr()
        )));
    }
    let (num, den) = mmm_parts(m_s, params);
    MomentSequence::from_generating_series(&num.mul_series(&den.reciprocal()?))
}

fn mmm_parts<T: Scalar>(
    m_s: &MomentSequence<T>,
    p: &RegressionParams<T>,
) -> (TruncatedSeries<T>, TruncatedSeries<T>) {
    let n = m_s.order();
    let m = m_s.generating_series();
    let two_plus_b = TruncatedSeries::constant(T::from_i64(2) + &p.b, n);
    let two_a = T::from_i64(2) * &p.a;
    let lin = TruncatedSeries::polynomial(&[p.b.clone(), two_a.clone()], n);
    let quad = TruncatedSeries::polynomial(&[p.b.clone(), two_a, T::from_i64(4)], n);
    (
        &two_plus_b - &lin.mul_series(&m),
        &two_plus_b - &quad.mul_series(&m),
    )
}

/// `φ((X - Y)² Sⁿ) - c φ((4 + 2aS + bS²) Sⁿ)` for `n = 0..=n_max`, on a
/// family of two identically distributed variables.
pub fn regression_residuals<T: Scalar>(
    family: &CFreeFamily<T>,
    params: &RegressionParams<T>,
    n_max: usize,
) -> Result<Vec<T>> {
    if family.len() != 2 || family.law(0) != family.law(1) {
        return Err(Error::Precondition(
            "regression needs two variables with the same law".into(),
        ));
    }
    if n_max + 2 > family.max_word_len() {
        return Err(Error::OrderExceeded {
            requested: n_max + 2,
            supported: family.max_word_len(),
        });
    }
    let x = WordSum::letter(0);
    let y = WordSum::letter(1);
    let s = x.add(&y);
    let diff_sq = x.sub(&y).pow(2);
    let quadratic = WordSum::scalar(T::from_i64(4))
        .add(&s.scale(&(T::from_i64(2) * &params.a)))
        .add(&s.mul(&s).scale(&params.b))
        .scale(&params.c);
    let mut eval = family.evaluator();
    let mut power = WordSum::one();
    let mut out = Vec::with_capacity(n_max + 1);
    for _ in 0..=n_max {
        let lhs = eval.wordsum_moment(&diff_sq.mul(&power), State::Phi)?;
        let rhs = eval.wordsum_moment(&quadratic.mul(&power), State::Phi)?;
        out.push(lhs - &rhs);
        power = power.mul(&s);
    }
    Ok(out)
}

/// The single residual at exponent `n`.
pub fn regression_residual<T: Scalar>(
    family: &CFreeFamily<T>,
    params: &RegressionParams<T>,
    n: usize,
) -> Result<T> {
    Ok(regression_residuals(family, params, n)?
        .pop()
        .expect("n_max + 1 residuals"))
}

/// `R_2 = 1` and every other two-state cumulant zero, over the ψ-law `ν`;
/// equivalently `M_X(z) = 1 / (1 - z² m_X(z))`.
pub fn constant_variance_phi_law<T: Scalar>(nu: &MomentSequence<T>) -> Result<TwoStateLaw<T>> {
    linear_variance_phi_law(nu, &T::zero())
}

/// `R_X(z) = z / (1 - az)`, i.e. `R_1 = 0` and `R_n = a^(n-2)` for `n >= 2`.
pub fn linear_variance_phi_law<T: Scalar>(nu: &MomentSequence<T>, a: &T) -> Result<TwoStateLaw<T>> {
    let n = nu.order();
    let mut r = vec![T::zero(); n];
    let mut p = T::one();
    for slot in r.iter_mut().skip(1) {
        *slot = p.clone();
        p = p * a;
    }
    let phi = cumulants_to_moments(&TwoStateCumulants::new(r), nu)?;
    TwoStateLaw::new(phi, nu.clone())
}

/// φ-moments of the constant variance law over a semicircle of variance
/// `σ²`, expanded from
/// `G(z) = ((σ² - 1/2) z - sqrt(z² - 4σ²)/2) / (1 + (σ² - 1) z²)`.
pub fn gaussian_limit_moments<T: Scalar>(variance: &T, order: usize) -> Result<MomentSequence<T>> {
    if !(*variance > T::zero()) {
        return Err(Error::InvalidParameter("variance must be positive".into()));
    }
    let n = order + 3;
    let half = T::from_ratio(1, 2);
    let root = TruncatedSeries::polynomial(&[T::one(), T::zero(), -(T::from_i64(4) * variance)], n)
        .sqrt()?;
    let shift = TruncatedSeries::constant(variance.clone() - &half, n);
    let num = (&shift - &root.scale(&half)).mul_z_pow(1).truncate(n);
    let den = TruncatedSeries::polynomial(&[variance.clone() - &T::one(), T::zero(), T::one()], n);
    MomentSequence::from_cauchy_series(&num.divide(&den)?.truncate(order + 1))
}

/// φ-moments of the linear variance law with `a = 1` over `MP(λ)`, expanded
/// from `G(z) = (1 + λ - z(1 - 2λ) - sqrt((z - 1 - λ)² - 4λ)) / (2(1 + (1 + λ) z - (1 - λ) z²))`.
pub fn mp_limit_moments<T: Scalar>(lambda: &T, order: usize) -> Result<MomentSequence<T>> {
    if !(*lambda > T::zero()) {
        return Err(Error::InvalidParameter("rate must be positive".into()));
    }
    let n = order + 3;
    let one = T::one();
    let one_plus = one.clone() + lambda;
    let one_minus = one.clone() - lambda;
    let two = T::from_i64(2);
    // (1 - (1+λ) w)² - 4λ w²
    let radicand = TruncatedSeries::polynomial(
        &[
            one.clone(),
            -(two.clone() * &one_plus),
            one_plus.clone() * &one_plus - &(T::from_i64(4) * lambda),
        ],
        n,
    );
    let lin = TruncatedSeries::polynomial(
        &[-(one.clone() - &(two.clone() * lambda)), one_plus.clone()],
        n,
    );
    let num = (&lin - &radicand.sqrt()?).mul_z_pow(1).truncate(n);
    let den = TruncatedSeries::polynomial(&[-one_minus, one_plus, one], n).scale(&two);
    MomentSequence::from_cauchy_series(&num.divide(&den)?.truncate(order + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    Gaussian,
    Mp,
}

/// Pointwise closed-form Cauchy transform of the constant (`Gaussian`,
/// parameter σ) or linear (`Mp`, parameter λ, `a = 1`) variance φ-law.
pub fn limit_closed_form(kind: LimitKind, param: f64, z: Complex64) -> Result<Complex64> {
    let form = match kind {
        LimitKind::Gaussian => ClosedForm::from_id("gaussian_limit", param)?,
        LimitKind::Mp => ClosedForm::from_id("mp_limit", param)?,
    };
    form.cauchy(z)
}
