use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Laws with a closed-form Cauchy transform, evaluated pointwise in floats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// φ-law of the constant conditional variance case over a semicircle
    /// ψ-law of standard deviation `sigma`.
    GaussianLimit {
        sigma: f64,
    },
    /// φ-law of the linear conditional variance case (`a = 1`) over a
    /// Marchenko–Pastur ψ-law of rate `lambda`.
    MpLimit {
        lambda: f64,
    },
    Semicircle {
        variance: f64,
    },
    Mp {
        lambda: f64,
    },
}

/// `sqrt((z - a)(z - b))` on the branch that behaves like `z` at infinity,
/// with its cut on the segment `[a, b]`.
fn sqrt_two_cut(z: Complex64, a: f64, b: f64) -> Complex64 {
    (z - a).sqrt() * (z - b).sqrt()
}

// Each transform below is a closed form `(A - root) / D` multiplied through
// by `A + root`; since `A² - root² = c D` this leaves `c / (A + root)`, which
// has no cancellation at large |z| and no removable singularities.

fn semicircle_g(variance: f64, z: Complex64) -> Complex64 {
    let two_sigma = 2.0 * variance.sqrt();
    2.0 / (z + sqrt_two_cut(z, -two_sigma, two_sigma))
}

fn mp_radical(lambda: f64, z: Complex64) -> Complex64 {
    let r = lambda.sqrt();
    sqrt_two_cut(z, (1.0 - r) * (1.0 - r), (1.0 + r) * (1.0 + r))
}

fn mp_g(lambda: f64, z: Complex64) -> Complex64 {
    2.0 / (z + (1.0 - lambda) + mp_radical(lambda, z))
}

// ((σ² - 1/2) z - root/2) / (1 + (σ² - 1) z²)
fn gaussian_limit_g(sigma: f64, z: Complex64) -> Complex64 {
    let s2 = sigma * sigma;
    s2 / ((s2 - 0.5) * z + 0.5 * sqrt_two_cut(z, -2.0 * sigma, 2.0 * sigma))
}

// (1 + λ - z(1 - 2λ) - root) / (2(1 + (1 + λ) z - (1 - λ) z²))
fn mp_limit_g(lambda: f64, z: Complex64) -> Complex64 {
    2.0 * lambda / (1.0 + lambda - z * (1.0 - 2.0 * lambda) + mp_radical(lambda, z))
}

impl ClosedForm {
    /// Parses a CLI/JSON identifier with its single parameter.
    pub fn from_id(id: &str, param: f64) -> Result<Self> {
        if !(param > 0.0) || !param.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "parameter {param} must be positive"
            )));
        }
        match id {
            "gaussian_limit" => Ok(ClosedForm::GaussianLimit { sigma: param }),
            "mp_limit" => Ok(ClosedForm::MpLimit { lambda: param }),
            "semicircle" => Ok(ClosedForm::Semicircle { variance: param }),
            "mp" => Ok(ClosedForm::Mp { lambda: param }),
            other => Err(Error::InvalidParameter(format!(
                "unknown closed form `{other}` (expected gaussian_limit, mp_limit, semicircle, mp)"
            ))),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            ClosedForm::GaussianLimit { .. } => "gaussian_limit",
            ClosedForm::MpLimit { .. } => "mp_limit",
            ClosedForm::Semicircle { .. } => "semicircle",
            ClosedForm::Mp { .. } => "mp",
        }
    }

    /// The Cauchy transform at `z` (`Im z > 0`), checked to satisfy
    /// `Im G(z) <= 0`.
    pub fn cauchy(&self, z: Complex64) -> Result<Complex64> {
        if !(z.im > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Cauchy transforms are evaluated on Im z > 0, got {z}"
            )));
        }
        let g = match *self {
            ClosedForm::Semicircle { variance } => semicircle_g(variance, z),
            ClosedForm::Mp { lambda } => mp_g(lambda, z),
            ClosedForm::GaussianLimit { sigma } => gaussian_limit_g(sigma, z),
            ClosedForm::MpLimit { lambda } => mp_limit_g(lambda, z),
        };
        if g.im > 1e-12 * g.norm().max(1.0) {
            return Err(Error::Branch(format!(
                "{} at z = {z} gave Im G = {} > 0",
                self.id(),
                g.im
            )));
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityPoint {
    pub x: f64,
    pub re_g: f64,
    pub im_g: f64,
    pub density: f64,
}

/// Stieltjes inversion at fixed height: `ρ̂(x) = -Im G(x + iε) / π`.
pub fn density_grid(form: &ClosedForm, grid: &[f64], eps: f64) -> Result<Vec<DensityPoint>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    grid.iter()
        .map(|&x| {
            let g = form.cauchy(Complex64::new(x, eps))?;
            Ok(DensityPoint {
                x,
                re_g: g.re,
                im_g: g.im,
                density: -g.im / std::f64::consts::PI,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn semicircle_density_at_center_and_outside() {
        let sc = ClosedForm::Semicircle { variance: 1.0 };
        let pts = density_grid(&sc, &[0.0, 3.0], 1e-6).unwrap();
        assert!((pts[0].density - 1.0 / PI).abs() < 1e-3);
        assert!(pts[1].density.abs() < 1e-3);
    }

    #[test]
    fn gaussian_limit_unit_sigma_is_semicircle() {
        let pts = density_grid(&ClosedForm::GaussianLimit { sigma: 1.0 }, &[0.0], 1e-6).unwrap();
        assert!((pts[0].density - 1.0 / PI).abs() < 1e-3);
        let z = Complex64::new(0.0, 2.0);
        let g = ClosedForm::GaussianLimit { sigma: 1.0 }.cauchy(z).unwrap();
        let expect = Complex64::new(0.0, 1.0 - 2f64.sqrt());
        assert!((g - expect).norm() < 1e-12);
    }

    #[test]
    fn normalization_at_infinity() {
        for sigma in [0.5, 1.0, 1.5, 3.0] {
            let z = Complex64::new(0.0, 1e6);
            let g = ClosedForm::GaussianLimit { sigma }.cauchy(z).unwrap();
            assert!(((z * g) - 1.0).norm() < 1e-6, "sigma={sigma}");
        }
    }

    #[test]
    fn density_integrates_to_one() {
        // Riemann sum of the smoothed density over a wide window.
        for form in [
            ClosedForm::Semicircle { variance: 2.0 },
            ClosedForm::Mp { lambda: 2.0 },
            ClosedForm::GaussianLimit { sigma: 1.5 },
            ClosedForm::MpLimit { lambda: 2.0 },
        ] {
            let h = 1e-3;
            let grid: Vec<f64> = (0..40_000).map(|i| -20.0 + h * i as f64).collect();
            let mass: f64 = density_grid(&form, &grid, 1e-2)
                .unwrap()
                .iter()
                .map(|p| p.density * h)
                .sum();
            assert!((mass - 1.0).abs() < 2e-3, "{form:?}: {mass}");
        }
    }

    #[test]
    fn agrees_with_unreduced_forms() {
        // G_X = 1 / (z - G_ν) for the constant variance case, and
        // (1 - g) / (z - (1 + z) g) for the linear one
        for z in [
            Complex64::new(0.3, 0.2),
            Complex64::new(-2.0, 1.0),
            Complex64::new(5.0, 0.01),
        ] {
            for v in [0.5f64, 1.0, 2.0] {
                let g = ClosedForm::GaussianLimit { sigma: v.sqrt() }
                    .cauchy(z)
                    .unwrap();
                let nu = ClosedForm::Semicircle { variance: v }.cauchy(z).unwrap();
                assert!((g - 1.0 / (z - nu)).norm() < 1e-12);
                let g = ClosedForm::MpLimit { lambda: v }.cauchy(z).unwrap();
                let nu = ClosedForm::Mp { lambda: v }.cauchy(z).unwrap();
                assert!((g - (1.0 - nu) / (z - (1.0 + z) * nu)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn removable_singularity_is_handled() {
        // σ = √2: denominator 1 + z² vanishes at z = i, numerator too.
        let f = ClosedForm::GaussianLimit { sigma: 2f64.sqrt() };
        let at = f.cauchy(Complex64::new(0.0, 1.0)).unwrap();
        let near = f.cauchy(Complex64::new(1e-5, 1.0)).unwrap();
        assert!((at - near).norm() < 1e-4);
    }

    #[test]
    fn rejects_lower_half_plane_and_unknown_ids() {
        assert!(ClosedForm::Mp { lambda: 1.0 }
            .cauchy(Complex64::new(1.0, 0.0))
            .is_err());
        assert!(ClosedForm::from_id("cauchy", 1.0).is_err());
        assert!(ClosedForm::from_id("mp", -1.0).is_err());
        assert_eq!(
            ClosedForm::from_id("mp_limit", 2.0).unwrap(),
            ClosedForm::MpLimit { lambda: 2.0 }
        );
    }
}
