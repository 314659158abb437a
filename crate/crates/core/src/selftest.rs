//! A fixed exact-arithmetic invariant suite for checking a build. Each
//! property can be run with one coefficient deliberately corrupted to confirm
//! that the check notices.

use std::fmt;

use serde::Serialize;

use crate::clt::{
    check_condition_a, check_condition_a_cumulants, forms_agree, free_sum_moments, lemma6_residual,
    pattern_sum_moments, FamilySource, FreeOracle, Moment, SequenceSpec,
};
use crate::convolution::{c_convolve, c_convolve_analytic, free_convolve};
use crate::cumulants::{
    cumulants_to_moments, cumulants_via_series, free_cumulants, free_cumulants_to_moments,
    moments_to_cumulants,
};
use crate::error::{Error, Result};
use crate::freeprod::{duplicate_pair, CFreeFamily};
use crate::lahalukacs::{
    constant_variance_phi_law, gaussian_limit_moments, mmm_transform, regression_residuals,
    RegressionParams,
};
use crate::laws::{atomic_moments, semicircle_moments, AtomicMeasure, MomentSequence, TwoStateLaw};
use crate::scalar::{rat, Rational};
use crate::series::TruncatedSeries;

type Check = fn(bool) -> std::result::Result<(), String>;

const PROPERTIES: &[(&str, Check)] = &[
    ("series_reciprocal", series_reciprocal),
    ("series_reversion", series_reversion),
    ("moment_cumulant_roundtrip", moment_cumulant_roundtrip),
    ("cumulant_routes_agree", cumulant_routes_agree),
    ("free_cumulant_roundtrip", free_cumulant_roundtrip),
    ("convolution_routes_agree", convolution_routes_agree),
    ("semicircle_additivity", semicircle_additivity),
    ("semicircle_fixed_point", semicircle_fixed_point),
    ("gaussian_limit_expansion", gaussian_limit_expansion),
    ("constant_variance_regression", constant_variance_regression),
    ("mmm_matches_c_convolution", mmm_matches_c_convolution),
    ("condition_a_free_family", condition_a_free_family),
    ("pattern_sums_match_cumulants", pattern_sums_match_cumulants),
    ("lemma6_constant_variance", lemma6_constant_variance),
];

/// Names of all properties, in report order.
pub fn property_names() -> Vec<&'static str> {
    PROPERTIES.iter().map(|(n, _)| *n).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub properties: Vec<PropertyResult>,
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.properties {
            match &p.detail {
                None => writeln!(f, "{} {}", if p.passed { "PASS" } else { "FAIL" }, p.name)?,
                Some(d) => writeln!(f, "FAIL {} ({d})", p.name)?,
            }
        }
        Ok(())
    }
}

/// Runs every property; `fault` names one to run with a corrupted coefficient.
pub fn selftest(fault: Option<&str>) -> Result<SelftestReport> {
    if let Some(name) = fault {
        if !PROPERTIES.iter().any(|(n, _)| *n == name) {
            return Err(Error::InvalidParameter(format!(
                "unknown property `{name}`"
            )));
        }
    }
    let properties: Vec<PropertyResult> = PROPERTIES
        .iter()
        .map(|(name, check)| {
            let outcome = check(fault == Some(*name));
            PropertyResult {
                name,
                passed: outcome.is_ok(),
                detail: outcome.err(),
            }
        })
        .collect();
    Ok(SelftestReport {
        passed: properties.iter().all(|p| p.passed),
        properties,
    })
}

const ORDER: usize = 10;

fn atomic(atoms: &[(i64, i64, i64, i64)], order: usize) -> MomentSequence<Rational> {
    let atoms = atoms
        .iter()
        .map(|&(p, q, x, y)| (rat(p, q), rat(x, y)))
        .collect();
    atomic_moments(
        &AtomicMeasure::new(atoms).expect("fixed atoms are valid"),
        order,
    )
}

fn sample_law() -> TwoStateLaw<Rational> {
    TwoStateLaw::new(
        atomic(&[(1, 3, -1, 1), (2, 3, 2, 1)], ORDER),
        atomic(&[(1, 2, -1, 1), (1, 4, 1, 1), (1, 4, 3, 1)], ORDER),
    )
    .expect("orders match")
}

fn centered_law(order: usize) -> TwoStateLaw<Rational> {
    TwoStateLaw::new(
        atomic(&[(3, 4, -1, 1), (1, 4, 3, 1)], order),
        atomic(&[(2, 3, -1, 1), (1, 3, 2, 1)], order),
    )
    .expect("orders match")
}

fn sc(v: i64, order: usize) -> MomentSequence<Rational> {
    semicircle_moments(&rat(v, 1), order).expect("positive variance")
}

fn corrupt(v: &mut [Rational], on: bool) {
    if on {
        if let Some(last) = v.last_mut() {
            *last += &rat(1, 1);
        }
    }
}

fn corrupt_law(m: &MomentSequence<Rational>, on: bool) -> MomentSequence<Rational> {
    let mut v = m.moments().to_vec();
    corrupt(&mut v, on);
    MomentSequence::new(v).expect("m0 untouched")
}

fn compare(lhs: &[Rational], rhs: &[Rational]) -> std::result::Result<(), String> {
    if lhs.len() != rhs.len() {
        return Err(format!("lengths {} and {} differ", lhs.len(), rhs.len()));
    }
    match lhs.iter().zip(rhs).position(|(a, b)| a != b) {
        None => Ok(()),
        Some(k) => Err(format!("coefficient {k}: {} != {}", lhs[k], rhs[k])),
    }
}

fn compare_laws(
    lhs: &TwoStateLaw<Rational>,
    rhs: &TwoStateLaw<Rational>,
) -> std::result::Result<(), String> {
    compare(lhs.phi().moments(), rhs.phi().moments()).map_err(|e| format!("φ-moments, {e}"))?;
    compare(lhs.psi().moments(), rhs.psi().moments()).map_err(|e| format!("ψ-moments, {e}"))
}

fn err(e: Error) -> String {
    e.to_string()
}

fn series_reciprocal(fault: bool) -> std::result::Result<(), String> {
    let a = TruncatedSeries::new(vec![
        rat(1, 1),
        rat(2, 1),
        rat(0, 1),
        rat(-1, 3),
        rat(5, 2),
        rat(1, 7),
    ]);
    let mut inv = a.reciprocal().map_err(err)?.coeffs().to_vec();
    corrupt(&mut inv, fault);
    compare(
        a.mul_series(&TruncatedSeries::new(inv)).coeffs(),
        TruncatedSeries::one(5).coeffs(),
    )
}

fn series_reversion(fault: bool) -> std::result::Result<(), String> {
    let f = TruncatedSeries::new(vec![
        rat(0, 1),
        rat(2, 1),
        rat(-1, 1),
        rat(1, 3),
        rat(0, 1),
        rat(4, 1),
        rat(-2, 5),
    ]);
    let mut g = f.revert().map_err(err)?.coeffs().to_vec();
    corrupt(&mut g, fault);
    compare(
        f.compose(&TruncatedSeries::new(g)).map_err(err)?.coeffs(),
        TruncatedSeries::identity(6).coeffs(),
    )
}

fn moment_cumulant_roundtrip(fault: bool) -> std::result::Result<(), String> {
    let law = sample_law();
    let r = moments_to_cumulants(&law);
    let back = cumulants_to_moments(&r, law.psi()).map_err(err)?;
    compare(corrupt_law(&back, fault).moments(), law.phi().moments())
}

fn cumulant_routes_agree(fault: bool) -> std::result::Result<(), String> {
    let law = sample_law();
    let mut a = moments_to_cumulants(&law).values().to_vec();
    corrupt(&mut a, fault);
    compare(&a, cumulants_via_series(&law).values())
}

fn free_cumulant_roundtrip(fault: bool) -> std::result::Result<(), String> {
    let psi = sample_law().psi().clone();
    let back = free_cumulants_to_moments(&free_cumulants(&psi)).map_err(err)?;
    compare(corrupt_law(&back, fault).moments(), psi.moments())
}

fn convolution_routes_agree(fault: bool) -> std::result::Result<(), String> {
    let p = sample_law();
    let q = centered_law(ORDER);
    let a = c_convolve(&p, &q).map_err(err)?;
    let b = c_convolve_analytic(&p, &q).map_err(err)?;
    let a = TwoStateLaw::new(corrupt_law(a.phi(), fault), a.psi().clone()).map_err(err)?;
    compare_laws(&a, &b)
}

fn semicircle_additivity(fault: bool) -> std::result::Result<(), String> {
    let s = free_convolve(&sc(1, 16), &sc(2, 16)).map_err(err)?;
    compare(corrupt_law(&s, fault).moments(), sc(3, 16).moments())
}

fn semicircle_fixed_point(fault: bool) -> std::result::Result<(), String> {
    let law = constant_variance_phi_law(&sc(1, 14)).map_err(err)?;
    compare(corrupt_law(law.phi(), fault).moments(), sc(1, 14).moments())
}

fn gaussian_limit_expansion(fault: bool) -> std::result::Result<(), String> {
    let law = constant_variance_phi_law(&sc(2, 14)).map_err(err)?;
    compare(
        corrupt_law(law.phi(), fault).moments(),
        gaussian_limit_moments(&rat(2, 1), 14)
            .map_err(err)?
            .moments(),
    )
}

fn constant_variance_regression(fault: bool) -> std::result::Result<(), String> {
    let law = constant_variance_phi_law(&sc(2, 10)).map_err(err)?;
    let law = TwoStateLaw::new(corrupt_law(law.phi(), fault), law.psi().clone()).map_err(err)?;
    let params = RegressionParams::new(rat(0, 1), rat(0, 1)).map_err(err)?;
    let residuals = regression_residuals(&duplicate_pair(&law), &params, 8).map_err(err)?;
    compare(&residuals, &vec![rat(0, 1); 9])
}

fn mmm_matches_c_convolution(fault: bool) -> std::result::Result<(), String> {
    let law =
        constant_variance_phi_law(&atomic(&[(1, 2, -1, 1), (1, 2, 1, 1)], 12)).map_err(err)?;
    let sum = c_convolve(&law, &law).map_err(err)?;
    let params = RegressionParams::new(rat(0, 1), rat(0, 1)).map_err(err)?;
    let m = mmm_transform(sum.psi(), &params).map_err(err)?;
    compare(corrupt_law(&m, fault).moments(), sum.phi().moments())
}

fn condition_a_free_family(fault: bool) -> std::result::Result<(), String> {
    let law = centered_law(6);
    let mut phi = law.phi().moments().to_vec();
    if fault {
        // a nonzero mean breaks the singleton conditions
        phi[1] += &rat(1, 1);
    }
    let law =
        TwoStateLaw::new(MomentSequence::new(phi).map_err(err)?, law.psi().clone()).map_err(err)?;
    let family = CFreeFamily::identical(&law, 3).map_err(err)?;
    let moment = check_condition_a(&mut FamilySource::new(&family), 5).map_err(err)?;
    let cumulant = check_condition_a_cumulants(&mut FamilySource::new(&family), 5).map_err(err)?;
    if !forms_agree(&moment, &cumulant) {
        return Err("moment and cumulant forms disagree".into());
    }
    match moment.violations.first() {
        None => Ok(()),
        Some(v) => Err(format!(
            "{} violated at {}",
            v.condition.as_str(),
            v.display
        )),
    }
}

fn pattern_sums_match_cumulants(fault: bool) -> std::result::Result<(), String> {
    let law = centered_law(6);
    let oracle = FreeOracle::new(&law, 6).map_err(err)?;
    let spec = SequenceSpec::identical(&law).map_err(err)?;
    let a = pattern_sum_moments(&oracle, 7, 6).map_err(err)?;
    let a = TwoStateLaw::new(corrupt_law(a.phi(), fault), a.psi().clone()).map_err(err)?;
    compare_laws(&a, &free_sum_moments(&spec, 7, 6).map_err(err)?)
}

fn lemma6_constant_variance(fault: bool) -> std::result::Result<(), String> {
    let law = constant_variance_phi_law(&atomic(&[(1, 2, -1, 1), (1, 2, 1, 1)], 8)).map_err(err)?;
    let law = TwoStateLaw::new(corrupt_law(law.phi(), fault), law.psi().clone()).map_err(err)?;
    for n in [1, 4] {
        for m in [2, 4, 6] {
            let r = lemma6_residual(&law, n, m).map_err(err)?;
            if r != Moment::Exact(rat(0, 1)) {
                return Err(format!("n={n}, m={m}: residual {r:?}"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_build_passes() {
        let r = selftest(None).unwrap();
        assert!(r.passed, "{r}");
        assert_eq!(r.properties.len(), PROPERTIES.len());
    }

    #[test]
    fn each_fault_is_caught_by_its_property() {
        for name in property_names() {
            let r = selftest(Some(name)).unwrap();
            let failed: Vec<_> = r
                .properties
                .iter()
                .filter(|p| !p.passed)
                .map(|p| p.name)
                .collect();
            assert_eq!(failed, vec![name]);
        }
    }

    #[test]
    fn reports_are_deterministic() {
        assert_eq!(
            selftest(None).unwrap().to_string(),
            selftest(None).unwrap().to_string()
        );
        assert!(selftest(Some("no_such_property")).is_err());
    }
}
