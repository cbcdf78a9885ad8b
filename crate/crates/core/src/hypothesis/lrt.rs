//! Likelihood ratio tests of sub-models nested in the unconstrained BDGE.

use serde::Serialize;

use super::chi2::chi2_sf;
use crate::bdge::BdgeParams;
use crate::dge::{profile_alpha, profile_p, WeightedCounts};
use crate::error::Result;
use crate::fit::{em_fit, em_fit_constrained, observed_loglik, BivariateDataset, Constraint, FitConfig, FitResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TestKind {
    /// `alpha1 = alpha2 = alpha3`.
    EqualAll,
    /// `alpha1 = alpha2 = alpha`, `alpha3 = 1 - alpha`: geometric marginals.
    Geometric,
    /// `alpha3 = 0`, on the boundary of the parameter space.
    Independence,
    /// `alpha1 = alpha2`.
    EqualAlpha12,
}

impl TestKind {
    pub fn null_distribution(self) -> NullDistribution {
        match self {
            TestKind::EqualAll | TestKind::Geometric => NullDistribution::ChiSquared { df: 2 },
            TestKind::EqualAlpha12 => NullDistribution::ChiSquared { df: 1 },
            TestKind::Independence => NullDistribution::HalfHalfMixtureChi2_1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NullDistribution {
    ChiSquared {
        df: u32,
    },
    /// Equal mixture of a point mass at zero and a one-degree chi-square.
    HalfHalfMixtureChi2_1,
}

impl NullDistribution {
    pub fn p_value(self, stat: f64) -> f64 {
        match self {
            NullDistribution::ChiSquared { df } => chi2_sf(stat, df),
            NullDistribution::HalfHalfMixtureChi2_1 => {
                if stat <= 0.0 {
                    1.0
                } else {
                    0.5 * chi2_sf(stat, 1)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullFit {
    pub params: BdgeParams,
    pub loglik: f64,
    pub converged: bool,
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LrtResult {
    pub test: TestKind,
    /// `2 (alt_loglik - null loglik)`, clamped at zero.
    pub stat: f64,
    pub raw_stat: f64,
    pub null_kind: NullDistribution,
    pub p_value: f64,
    pub null_fit: NullFit,
    pub alt_loglik: f64,
    pub alt_params: BdgeParams,
    pub warnings: Vec<String>,
}

/// The independence null: the two columns are separate DGE samples sharing
/// `p`, fitted by profile likelihood without EM.
pub fn independence_null_fit(data: &BivariateDataset, cfg: &FitConfig) -> Result<NullFit> {
    let c1 = WeightedCounts::from_values(data.column1());
    let c2 = WeightedCounts::from_values(data.column2());
    let tol = cfg.inner_opt_tol;
    let outer = profile_p(|p| profile_alpha(&c1, p, tol).value + profile_alpha(&c2, p, tol).value, tol);
    let a1 = profile_alpha(&c1, outer.x, tol);
    let a2 = profile_alpha(&c2, outer.x, tol);
    let params = BdgeParams::new(a1.x, a2.x, 0.0, outer.x)?;
    Ok(NullFit {
        params,
        loglik: observed_loglik(data, &params),
        converged: true,
        boundary: outer.at_boundary || a1.at_boundary || a2.at_boundary,
    })
}

fn null_fit(data: &BivariateDataset, cfg: &FitConfig, test: TestKind) -> Result<NullFit> {
    let constraint = match test {
        TestKind::Independence => return independence_null_fit(data, cfg),
        TestKind::EqualAll => Constraint::EqualAll,
        TestKind::Geometric => Constraint::GeometricMarginals,
        TestKind::EqualAlpha12 => Constraint::EqualAlpha12,
    };
    let f = em_fit_constrained(data, cfg, constraint, None)?;
    Ok(NullFit { params: f.params, loglik: f.loglik, converged: f.converged, boundary: f.boundary })
}

/// Runs `test`. When `alternative` is `None` the unconstrained fit is
/// computed with `cfg`. If the alternative falls below the null, EM is
/// restarted from the null estimates and the better alternative is kept.
pub fn likelihood_ratio_test(
    data: &BivariateDataset,
    cfg: &FitConfig,
    test: TestKind,
    alternative: Option<&FitResult>,
) -> Result<LrtResult> {
    let mut warnings = Vec::new();
    let null = null_fit(data, cfg, test)?;
    if !null.converged {
        warnings.push("null fit did not converge".to_string());
    }
    if null.boundary {
        warnings.push("null fit reached the search boundary".to_string());
    }
    let mut alt = match alternative {
        Some(f) => f.clone(),
        None => em_fit(data, cfg, None)?,
    };
    if !alt.converged {
        warnings.push("unconstrained fit did not converge".to_string());
    }
    if alt.loglik < null.loglik - 1e-8 {
        let restart = em_fit(data, cfg, Some(null.params))?;
        warnings.push(format!(
            "unconstrained loglik {:.6} below null {:.6}; restarted from null (now {:.6})",
            alt.loglik, null.loglik, restart.loglik
        ));
        if restart.loglik > alt.loglik {
            alt = restart;
        }
    }
    let raw_stat = 2.0 * (alt.loglik - null.loglik);
    if raw_stat < -1e-8 {
        warnings.push(format!("negative statistic {raw_stat:.3e} clamped to zero"));
    }
    let stat = raw_stat.max(0.0);
    let null_kind = test.null_distribution();
    Ok(LrtResult {
        test,
        stat,
        raw_stat,
        null_kind,
        p_value: null_kind.p_value(stat),
        null_fit: null,
        alt_loglik: alt.loglik,
        alt_params: alt.params,
        warnings,
    })
}

pub fn lrt_equal_all_alphas(data: &BivariateDataset, cfg: &FitConfig) -> Result<LrtResult> {
    likelihood_ratio_test(data, cfg, TestKind::EqualAll, None)
}

pub fn lrt_geometric_marginals(data: &BivariateDataset, cfg: &FitConfig) -> Result<LrtResult> {
    likelihood_ratio_test(data, cfg, TestKind::Geometric, None)
}

pub fn lrt_independence(data: &BivariateDataset, cfg: &FitConfig) -> Result<LrtResult> {
    likelihood_ratio_test(data, cfg, TestKind::Independence, None)
}

pub fn lrt_equal_alpha12(data: &BivariateDataset, cfg: &FitConfig) -> Result<LrtResult> {
    likelihood_ratio_test(data, cfg, TestKind::EqualAlpha12, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixture_atom_at_zero() {
        let d = NullDistribution::HalfHalfMixtureChi2_1;
        assert_eq!(d.p_value(0.0), 1.0);
        assert!((d.p_value(2.7055) - 0.05).abs() < 1e-4);
    }

    #[test]
    fn chi2_p_values() {
        let d = NullDistribution::ChiSquared { df: 2 };
        assert!((d.p_value(3.0) - (-1.5f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn independence_null_has_no_common_component() {
        let data = BivariateDataset::from_pairs([(0, 1), (2, 1), (1, 3), (0, 0), (4, 2), (1, 1)]).unwrap();
        let f = independence_null_fit(&data, &FitConfig::default()).unwrap();
        assert_eq!(f.params.alpha3(), 0.0);
        let c1 = crate::dge::fit(&data.column1()).unwrap();
        let c2 = crate::dge::fit(&data.column2()).unwrap();
        // sharing p can only lose likelihood relative to separate fits
        assert!(f.loglik <= c1.loglik + c2.loglik + 1e-6);
    }
}
