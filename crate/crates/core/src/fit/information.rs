use nalgebra::{Cholesky, Matrix4};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::bdge::BdgeParams;
use crate::error::{Error, Result};
use crate::fit::{observed_loglik, BivariateDataset, FitResult};
use crate::numeric::numerical_hessian;

/// Relative finite-difference step.
const REL_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Information {
    /// Negative Hessian of the observed log-likelihood in
    /// `(alpha1, alpha2, alpha3, p)` order.
    pub matrix: [[f64; 4]; 4],
    pub positive_definite: bool,
}

impl Information {
    fn as_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.matrix[i][j])
    }

    /// Inverse of the information, if positive definite.
    pub fn covariance(&self) -> Option<[[f64; 4]; 4]> {
        let inv = Cholesky::new(self.as_matrix())?.inverse();
        Some(std::array::from_fn(|i| std::array::from_fn(|j| inv[(i, j)])))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

/// Observed information by central differences of the observed
/// log-likelihood with steps `1e-4 * |theta_i|`, symmetrized.
pub fn observed_information(data: &BivariateDataset, params: &BdgeParams) -> Result<Information> {
    let theta = params.to_array();
    if theta[..3].iter().any(|&a| a <= 0.0) {
        return Err(Error::Domain("observed information needs every shape > 0".into()));
    }
    let steps: Vec<f64> = theta
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let h = REL_STEP * t.abs().max(1e-2);
            if i < 3 {
                h.min(0.5 * t)
            } else {
                h.min(0.5 * t.min(1.0 - t))
            }
        })
        .collect();
    let f = |v: &[f64]| match BdgeParams::new(v[0], v[1], v[2], v[3]) {
        Ok(q) => observed_loglik(data, &q),
        Err(_) => f64::NEG_INFINITY,
    };
    let h = numerical_hessian(f, &theta, &steps);
    let neg = Matrix4::from_fn(|i, j| -h[(i, j)]);
    let matrix = std::array::from_fn(|i| std::array::from_fn(|j| neg[(i, j)]));
    let positive_definite = neg.iter().all(|v| v.is_finite()) && Cholesky::new(neg).is_some();
    Ok(Information { matrix, positive_definite })
}

fn z_quantile(level: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&level) {
        return Err(Error::Domain(format!("level must lie in [0, 1), got {level}")));
    }
    Ok(if level == 0.0 { 0.0 } else { Normal::standard().inverse_cdf(0.5 * (1.0 + level)) })
}

/// Wald intervals for any smooth log-likelihood, using a central-difference
/// Hessian with the given absolute steps.
pub fn wald_ci_for<F>(loglik: F, theta: &[f64], steps: &[f64], level: f64) -> Result<Vec<Interval>>
where
    F: Fn(&[f64]) -> f64,
{
    let z = z_quantile(level)?;
    if steps.iter().any(|&h| h.is_nan() || h <= 0.0) {
        return Err(Error::InformationNotPositiveDefinite);
    }
    let neg = -numerical_hessian(loglik, theta, steps);
    let cov = match neg.iter().all(|v| v.is_finite()) {
        true => neg.cholesky().ok_or(Error::InformationNotPositiveDefinite)?.inverse(),
        false => return Err(Error::InformationNotPositiveDefinite),
    };
    if (0..theta.len()).any(|i| !(cov[(i, i)].is_finite() && cov[(i, i)] > 0.0)) {
        return Err(Error::InformationNotPositiveDefinite);
    }
    Ok(theta
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let se = cov[(i, i)].sqrt();
            Interval { lo: t - z * se, hi: t + z * se }
        })
        .collect())
}

/// `theta_i +/- z_{(1+level)/2} sqrt((I^-1)_ii)`.
pub fn wald_ci(fit: &FitResult, level: f64) -> Result<[Interval; 4]> {
    let z = z_quantile(level)?;
    let info = fit.information.as_ref().ok_or(Error::InformationNotPositiveDefinite)?;
    if !info.positive_definite {
        return Err(Error::InformationNotPositiveDefinite);
    }
    let cov = info.covariance().ok_or(Error::InformationNotPositiveDefinite)?;
    let theta = fit.params.to_array();
    Ok(std::array::from_fn(|i| {
        let se = cov[i][i].sqrt();
        Interval { lo: theta[i] - z * se, hi: theta[i] + z * se }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wald_for_gaussian_mean() {
        // loglik of 25 unit-variance points has curvature -25
        let f = |v: &[f64]| -12.5 * (v[0] - 1.0).powi(2);
        let ci = wald_ci_for(f, &[1.0], &[1e-3], 0.95).unwrap();
        assert!((ci[0].half_width() - 1.959963984540054 / 5.0).abs() < 1e-6);
    }

    #[test]
    fn wald_rejects_convex_or_zero_step() {
        assert!(wald_ci_for(|v: &[f64]| v[0] * v[0], &[1.0], &[1e-3], 0.95).is_err());
        assert!(wald_ci_for(|v: &[f64]| -v[0] * v[0], &[0.0], &[0.0], 0.95).is_err());
        assert!(wald_ci_for(|v: &[f64]| -v[0] * v[0], &[0.0], &[1e-3], 1.0).is_err());
    }
}
