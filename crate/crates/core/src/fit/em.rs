use serde::Serialize;

use crate::bdge::BdgeParams;
use crate::dge::{self, DgeFit};
use crate::error::{Error, Result};
use crate::fit::estep::{e_step_posterior, e_step_predict, e_step_predict_overall_max};
use crate::fit::information::{observed_information, wald_ci};
use crate::fit::mstep::{m_step, Constraint, LatentCounts};
use crate::fit::{observed_loglik, BivariateDataset, EStepKind, FitConfig, FitResult};

/// Smallest shape used when the moment-style solve goes non-positive.
const SHAPE_FLOOR: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitialEstimates {
    pub params: BdgeParams,
    pub column1: DgeFit,
    pub column2: DgeFit,
    pub max_column: DgeFit,
    /// A shape from the linear solve was non-positive and had to be reset.
    pub adjusted: bool,
}

/// Start values from three univariate fits.
///
/// The columns estimate `a1 + a3` and `a2 + a3`, their maxima estimate
/// `a1 + a2 + a3`; solving these gives the shapes, and `p` is the mean of the
/// three fitted bases. A non-positive shape is set to 0.01 and the others are
/// re-derived so that the two marginal sums are kept where possible.
pub fn initial_estimates(data: &BivariateDataset) -> Result<InitialEstimates> {
    let fits = [data.column1(), data.column2(), data.max_column()]
        .iter()
        .map(|col| dge::fit(col))
        .collect::<Result<Vec<_>>>()?;
    for (name, f) in ["x1", "x2", "max(x1, x2)"].iter().zip(&fits) {
        if !f.converged {
            return Err(Error::NonConvergent(format!("univariate fit of {name}")));
        }
    }
    let (s1, s2, sm) = (fits[0].params.alpha(), fits[1].params.alpha(), fits[2].params.alpha());
    let mut a1 = sm - s2;
    let mut a2 = sm - s1;
    let mut a3 = s1 + s2 - sm;
    let mut adjusted = false;
    if a3 < 0.0 {
        adjusted = true;
        a3 = SHAPE_FLOOR;
        a1 = (s1 - a3).max(SHAPE_FLOOR);
        a2 = (s2 - a3).max(SHAPE_FLOOR);
    }
    if a1 <= 0.0 {
        adjusted = true;
        a1 = SHAPE_FLOOR;
        a3 = (s1 - a1).max(SHAPE_FLOOR);
        a2 = (s2 - a3).max(SHAPE_FLOOR);
    }
    if a2 <= 0.0 {
        adjusted = true;
        a2 = SHAPE_FLOOR;
        a3 = (s2 - a2).max(SHAPE_FLOOR);
        a1 = (s1 - a3).max(SHAPE_FLOOR);
    }
    let p = (fits[0].params.p() + fits[1].params.p() + fits[2].params.p()) / 3.0;
    Ok(InitialEstimates {
        params: BdgeParams::new(a1, a2, a3, p)?,
        column1: fits[0],
        column2: fits[1],
        max_column: fits[2],
        adjusted,
    })
}

/// Map a start point onto the constraint set.
pub(crate) fn project(params: &BdgeParams, constraint: Constraint) -> BdgeParams {
    let [a1, a2, a3, p] = params.to_array();
    let v = match constraint {
        Constraint::Unconstrained => [a1, a2, a3, p],
        Constraint::EqualAll => {
            let a = (a1 + a2 + a3) / 3.0;
            [a, a, a, p]
        }
        Constraint::EqualAlpha12 => {
            let a = 0.5 * (a1 + a2);
            [a, a, a3, p]
        }
        Constraint::GeometricMarginals => {
            let m = 0.5 * (a1 + a2);
            let a = (m / (m + a3)).clamp(0.05, 0.95);
            [a, a, 1.0 - a, p]
        }
    };
    BdgeParams::from_array(v).expect("projection keeps validity")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StopReason {
    /// Consecutive observed log-likelihoods within tolerance.
    Converged,
    /// Observed log-likelihood fell three times in a row.
    Decreasing,
    MaxIter,
}

fn expected_counts(data: &BivariateDataset, params: &BdgeParams, kind: EStepKind) -> LatentCounts {
    let mut counts = LatentCounts::default();
    for (pt, mult) in data.distinct() {
        let m = mult as f64;
        match kind {
            EStepKind::Prediction => counts.add(e_step_predict(pt, params), m),
            EStepKind::PredictionOverallMax => counts.add(e_step_predict_overall_max(pt, params), m),
            EStepKind::Posterior => {
                for (t, w) in e_step_posterior(pt, params) {
                    counts.add(t, m * w);
                }
            }
        }
    }
    counts
}

/// EM under a shape constraint, returning the best iterate visited (the
/// prediction E-step does not guarantee ascent). The start defaults to the projected
/// [`initial_estimates`]. No information matrix is attached.
pub fn em_fit_constrained(
    data: &BivariateDataset,
    cfg: &FitConfig,
    constraint: Constraint,
    start: Option<BdgeParams>,
) -> Result<FitResult> {
    let start = match start {
        Some(s) => s,
        None => initial_estimates(data)?.params,
    };
    let mut theta = project(&start, constraint);
    let mut ll = observed_loglik(data, &theta);
    let mut trace = vec![ll];
    let mut best = (theta, ll);
    let mut decreases = 0;
    let mut stop = StopReason::MaxIter;
    let mut boundary = false;
    let mut iterations = 0;

    for it in 1..=cfg.max_iter {
        let counts = expected_counts(data, &theta, cfg.e_step);
        let m = m_step(&counts, constraint, cfg)?;
        let next_ll = observed_loglik(data, &m.params);
        trace.push(next_ll);
        iterations = it;
        boundary = m.boundary;
        if next_ll > best.1 {
            best = (m.params, next_ll);
        }
        decreases = if next_ll < ll { decreases + 1 } else { 0 };
        let delta = if next_ll.is_finite() && ll.is_finite() { (next_ll - ll).abs() } else { f64::INFINITY };
        theta = m.params;
        ll = next_ll;
        if delta < cfg.loglik_tol {
            stop = StopReason::Converged;
            break;
        }
        if decreases >= 3 {
            stop = StopReason::Decreasing;
            break;
        }
    }
    if best.1 > ll {
        (theta, ll) = best;
    }
    Ok(FitResult {
        params: theta,
        loglik: ll,
        loglik_trace: trace,
        iterations,
        converged: stop == StopReason::Converged,
        stop_reason: stop,
        boundary,
        information: None,
        ci95: None,
    })
}

/// Unconstrained EM with observed information and 95% Wald intervals.
pub fn em_fit(data: &BivariateDataset, cfg: &FitConfig, start: Option<BdgeParams>) -> Result<FitResult> {
    let mut fit = em_fit_constrained(data, cfg, Constraint::Unconstrained, start)?;
    if let Ok(info) = observed_information(data, &fit.params) {
        fit.information = Some(info);
        fit.ci95 = wald_ci(&fit, 0.95).ok();
    }
    Ok(fit)
}
