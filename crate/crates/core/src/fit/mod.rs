//! Maximum likelihood estimation of [`BdgeParams`].
//!
//! The EM treats the component maxima `(u1, u2, u3)` behind each observed
//! pair as missing. Given the latents the complete log-likelihood separates
//! into `g1(alpha1, p) + g2(alpha2, p) + g3(alpha3, p)`, each log-concave in
//! its shape, so the M-step is a profile search over `p` with three
//! independent 1-D shape searches inside.

mod dataset;
mod em;
mod estep;
mod grid;
mod information;
mod loglik;
mod mstep;

pub use dataset::BivariateDataset;
pub use em::{em_fit, em_fit_constrained, initial_estimates, InitialEstimates, StopReason};
pub use estep::{e_step_posterior, e_step_predict, e_step_predict_overall_max, LatentTriple};
pub use grid::{grid_search_mle, GridSearchResult};
pub use information::{observed_information, wald_ci, wald_ci_for, Information, Interval};
pub use loglik::{complete_loglik, observed_loglik};
pub use mstep::{m_step, m_step_profile, Constraint, LatentCounts, MStepResult};

use serde::Serialize;

use crate::bdge::BdgeParams;

/// How the E-step fills in the latent maxima.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum EStepKind {
    /// Each latent triple is replaced by its most probable value given the
    /// observation (maximum likelihood prediction).
    #[default]
    Prediction,
    /// Prediction, but on the diagonal the argmax runs over every triple whose
    /// overall maximum equals the observed value, including triples that
    /// cannot produce the observation.
    PredictionOverallMax,
    /// Each latent triple is weighted by its exact conditional probability
    /// given the observation over the finite feasible set.
    Posterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitConfig {
    /// Stop when consecutive observed log-likelihoods differ by less than this.
    pub loglik_tol: f64,
    pub max_iter: usize,
    /// Bracket width for the 1-D searches, in transformed coordinates.
    pub inner_opt_tol: f64,
    pub e_step: EStepKind,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { loglik_tol: 1e-4, max_iter: 500, inner_opt_tol: 1e-8, e_step: EStepKind::Prediction }
    }
}

impl FitConfig {
    pub fn with_e_step(mut self, e_step: EStepKind) -> Self {
        self.e_step = e_step;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub params: BdgeParams,
    /// Observed log-likelihood at `params`.
    pub loglik: f64,
    /// Observed log-likelihood of the start followed by every iterate.
    pub loglik_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    /// Some shape ended on the search box in the final M-step.
    pub boundary: bool,
    /// Negative Hessian of the observed log-likelihood; absent for
    /// constrained fits or when `params` is not interior.
    pub information: Option<Information>,
    /// 95% Wald intervals; absent when the information is not positive definite.
    pub ci95: Option<[Interval; 4]>,
}
