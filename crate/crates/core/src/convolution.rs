//! Free convolution `⊞` and the c-convolution `⊛` of law pairs.
//!
//! The cumulant route adds cumulant sequences. The analytic route works with
//! Cauchy transforms expanded in `w = 1/z`: R-transforms are read off a
//! compositional inverse and the convolved transforms are recovered as fixed
//! points.

use crate::cumulants::{
    cumulants_to_moments, cumulants_via_series, free_cumulants, free_cumulants_to_moments,
};
use crate::error::{Error, Result};
use crate::laws::{MomentSequence, TwoStateLaw};
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

fn check_orders(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::OrderMismatch { left: a, right: b });
    }
    Ok(())
}

/// `ν₁ ⊞ ν₂` by free-cumulant additivity.
pub fn free_convolve<T: Scalar>(
    nu1: &MomentSequence<T>,
    nu2: &MomentSequence<T>,
) -> Result<MomentSequence<T>> {
    check_orders(nu1.order(), nu2.order())?;
    free_cumulants_to_moments(&free_cumulants(nu1).add(&free_cumulants(nu2))?)
}

/// `(μ₁, ν₁) ⊛ (μ₂, ν₂)`: the second component is `ν₁ ⊞ ν₂`, the first has
/// two-state cumulants `R(μ₁, ν₁) + R(μ₂, ν₂)` against it.
pub fn c_convolve<T: Scalar>(p1: &TwoStateLaw<T>, p2: &TwoStateLaw<T>) -> Result<TwoStateLaw<T>> {
    check_orders(p1.order(), p2.order())?;
    let nu = free_convolve(p1.psi(), p2.psi())?;
    let big_r = cumulants_via_series(p1).add(&cumulants_via_series(p2))?;
    let mu = cumulants_to_moments(&big_r, &nu)?;
    TwoStateLaw::new(mu, nu)
}

/// Free R-transform `r(u) = Σ r_n u^(n-1)` from `r(u) = (u - v(u)) / (u v(u))`,
/// where `v` inverts `ĝ(w) = Σ ν_n w^(n+1)`. Order `N - 1`.
pub fn r_transform<T: Scalar>(nu: &MomentSequence<T>) -> Result<TruncatedSeries<T>> {
    let v = inverse_cauchy(nu)?;
    let u = TruncatedSeries::identity(v.order());
    (&u - &v).divide(&(&u * &v))
}

/// Two-state R-transform `R(u) = (Ĝ(v) - v) / (v Ĝ(v))` with `v` as in
/// [`r_transform`]. Order `N - 1`.
pub fn big_r_transform<T: Scalar>(law: &TwoStateLaw<T>) -> Result<TruncatedSeries<T>> {
    let v = inverse_cauchy(law.psi())?;
    let big_g = law.phi().cauchy_series().compose(&v)?;
    (&big_g - &v).divide(&(&v * &big_g))
}

fn inverse_cauchy<T: Scalar>(nu: &MomentSequence<T>) -> Result<TruncatedSeries<T>> {
    match nu.variance() {
        Some(v) if !v.is_zero() => {}
        _ => {
            return Err(Error::AnalyticRouteUnavailable(
                "the ψ-law has zero variance (or order below 2); use the cumulant route".into(),
            ))
        }
    }
    nu.cauchy_series().revert()
}

/// `w / (1 - w f(inner))`, truncated to the order of `inner`.
fn resolvent<T: Scalar>(
    f: &TruncatedSeries<T>,
    inner: &TruncatedSeries<T>,
) -> Result<TruncatedSeries<T>> {
    let order = inner.order();
    let den = &TruncatedSeries::one(order) - &f.compose(inner)?.mul_z_pow(1).truncate(order);
    Ok(den.reciprocal()?.mul_z_pow(1).truncate(order))
}

/// Same output as [`c_convolve`], computed from the transforms: solve
/// `ĝ = w / (1 - w (r₁ + r₂)(ĝ))` order by order, then
/// `Ĝ = w / (1 - w (R₁ + R₂)(ĝ))`.
pub fn c_convolve_analytic<T: Scalar>(
    p1: &TwoStateLaw<T>,
    p2: &TwoStateLaw<T>,
) -> Result<TwoStateLaw<T>> {
    check_orders(p1.order(), p2.order())?;
    let n = p1.order();
    if n < 2 {
        return Err(Error::AnalyticRouteUnavailable(
            "the analytic route needs order >= 2".into(),
        ));
    }
    let r = &r_transform(p1.psi())? + &r_transform(p2.psi())?;
    let big_r = &big_r_transform(p1)? + &big_r_transform(p2)?;
    let mut g = TruncatedSeries::identity(n + 1);
    for _ in 0..=n {
        g = resolvent(&r, &g)?;
    }
    let big_g = resolvent(&big_r, &g)?;
    TwoStateLaw::new(
        MomentSequence::from_cauchy_series(&big_g)?,
        MomentSequence::from_cauchy_series(&g)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::{point_mass, semicircle_moments, symmetric_bernoulli};
    use crate::scalar::{rat, Rational};

    fn ms(v: &[Rational]) -> MomentSequence<Rational> {
        MomentSequence::new(v.to_vec()).unwrap()
    }

    fn sc(v: i64, order: usize) -> MomentSequence<Rational> {
        semicircle_moments(&rat(v, 1), order).unwrap()
    }

    #[test]
    fn semicircles_add_variances() {
        assert_eq!(free_convolve(&sc(1, 6), &sc(1, 6)).unwrap(), sc(2, 6));
    }

    #[test]
    fn point_mass_at_zero_is_neutral() {
        let nu = ms(&[rat(1, 1), rat(2, 3), rat(-1, 1), rat(5, 1), rat(1, 7)]);
        assert_eq!(free_convolve(&nu, &point_mass(&rat(0, 1), 4)).unwrap(), nu);
        let p = TwoStateLaw::new(
            ms(&[rat(1, 1), rat(1, 2), rat(3, 1), rat(0, 1), rat(2, 1)]),
            nu,
        )
        .unwrap();
        let delta = TwoStateLaw::single_state(point_mass(&rat(0, 1), 4));
        assert_eq!(c_convolve(&p, &delta).unwrap(), p);
    }

    #[test]
    fn bernoulli_square_is_arcsine() {
        let b = symmetric_bernoulli::<Rational>(6);
        let expect = ms(&[
            rat(1, 1),
            rat(0, 1),
            rat(2, 1),
            rat(0, 1),
            rat(6, 1),
            rat(0, 1),
            rat(20, 1),
        ]);
        let got = free_convolve(&b, &b).unwrap();
        assert_eq!(got, expect);
        // the arcsine law on [-2, 2]: central binomial coefficients
        assert_eq!(
            free_cumulants(&got).values()[..6],
            [
                rat(0, 1),
                rat(2, 1),
                rat(0, 1),
                rat(-2, 1),
                rat(0, 1),
                rat(4, 1)
            ]
        );
    }

    #[test]
    fn c_convolution_of_semicircle_pairs() {
        let p = TwoStateLaw::single_state(sc(1, 8));
        let expect = TwoStateLaw::single_state(sc(2, 8));
        assert_eq!(c_convolve(&p, &p).unwrap(), expect);
        assert_eq!(c_convolve_analytic(&p, &p).unwrap(), expect);
    }

    #[test]
    fn constant_variance_pair_satisfies_the_quadratic_relation() {
        let r = crate::cumulants::TwoStateCumulants::new(
            (1..=10)
                .map(|n| if n == 2 { rat(1, 1) } else { rat(0, 1) })
                .collect(),
        );
        let law =
            TwoStateLaw::new(cumulants_to_moments(&r, &sc(1, 10)).unwrap(), sc(1, 10)).unwrap();
        let s = c_convolve(&law, &law).unwrap();
        assert_eq!(s.psi(), &sc(2, 10));
        let m = s.psi().generating_series();
        let den = &TruncatedSeries::one(10) - &m.mul_z_pow(2).truncate(10).scale(&rat(2, 1));
        let product = s.phi().generating_series().mul_series(&den);
        assert_eq!(product, TruncatedSeries::one(10));
    }

    #[test]
    fn semicircle_r_transform_is_linear() {
        let r = r_transform(&semicircle_moments(&rat(7, 3), 9).unwrap()).unwrap();
        assert_eq!(r.order(), 8);
        let mut expect = vec![rat(0, 1); 9];
        expect[1] = rat(7, 3);
        assert_eq!(r.coeffs(), &expect[..]);
    }

    #[test]
    fn transforms_match_cumulants() {
        let phi = ms(&[
            rat(1, 1),
            rat(1, 2),
            rat(2, 1),
            rat(-1, 3),
            rat(5, 1),
            rat(1, 1),
        ]);
        let psi = ms(&[
            rat(1, 1),
            rat(-1, 1),
            rat(3, 1),
            rat(2, 1),
            rat(4, 1),
            rat(-2, 1),
        ]);
        let law = TwoStateLaw::new(phi, psi.clone()).unwrap();
        assert_eq!(
            r_transform(&psi).unwrap().coeffs(),
            free_cumulants(&psi).values()
        );
        assert_eq!(
            big_r_transform(&law).unwrap().coeffs(),
            cumulants_via_series(&law).values()
        );
    }

    #[test]
    fn zero_variance_refuses_the_analytic_route() {
        let p = TwoStateLaw::single_state(point_mass(&rat(1, 1), 4));
        assert!(matches!(
            c_convolve_analytic(&p, &p),
            Err(Error::AnalyticRouteUnavailable(_))
        ));
        assert!(c_convolve(&p, &p).is_ok());
    }
}
