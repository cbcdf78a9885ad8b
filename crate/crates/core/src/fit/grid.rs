use serde::Serialize;

use crate::bdge::{ln_joint_pmf, BdgeParams};
use crate::fit::BivariateDataset;

/// Points per axis at every stage.
const POINTS: usize = 21;
/// Stop once every axis step is below this.
const TARGET_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSearchResult {
    pub params: BdgeParams,
    pub loglik: f64,
    pub stages: usize,
    pub alpha_step: f64,
    pub p_step: f64,
}

fn axis(center: f64, half: f64, lo: f64, hi: f64) -> Vec<f64> {
    let a = (center - half).max(lo);
    let b = (center + half).min(hi);
    let step = (b - a) / (POINTS - 1) as f64;
    (0..POINTS).map(|i| a + step * i as f64).collect()
}

/// Coarse-to-fine 4-D grid maximization of the observed log-likelihood.
///
/// The first stage covers the full box; each later stage shrinks the window
/// around the incumbent tenfold, keeping 21 points per axis, until every
/// step is below `1e-3` or `max_stages` is reached. Evaluates the joint PMF
/// directly and shares no code with the EM.
pub fn grid_search_mle(
    data: &BivariateDataset,
    alpha_range: (f64, f64),
    p_range: (f64, f64),
    max_stages: usize,
) -> GridSearchResult {
    let distinct = data.distinct();
    let ll = |v: [f64; 4]| -> f64 {
        match BdgeParams::from_array(v) {
            Ok(q) => distinct.iter().map(|(pt, c)| *c as f64 * ln_joint_pmf(*pt, &q)).sum(),
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let mut half_a = 0.5 * (alpha_range.1 - alpha_range.0);
    let mut half_p = 0.5 * (p_range.1 - p_range.0);
    let mut center = [
        0.5 * (alpha_range.0 + alpha_range.1),
        0.5 * (alpha_range.0 + alpha_range.1),
        0.5 * (alpha_range.0 + alpha_range.1),
        0.5 * (p_range.0 + p_range.1),
    ];
    let mut best = (center, f64::NEG_INFINITY);
    let mut stages = 0;
    let (mut step_a, mut step_p) = (f64::INFINITY, f64::INFINITY);
    while stages < max_stages {
        stages += 1;
        let ax: Vec<Vec<f64>> = (0..3).map(|i| axis(center[i], half_a, alpha_range.0, alpha_range.1)).collect();
        let ap = axis(center[3], half_p, p_range.0, p_range.1);
        step_a = (0..3).map(|i| ax[i][1] - ax[i][0]).fold(0.0, f64::max);
        step_p = ap[1] - ap[0];
        for &a1 in &ax[0] {
            for &a2 in &ax[1] {
                for &a3 in &ax[2] {
                    for &p in &ap {
                        let v = [a1, a2, a3, p];
                        let l = ll(v);
                        if l > best.1 {
                            best = (v, l);
                        }
                    }
                }
            }
        }
        center = best.0;
        if step_a < TARGET_STEP && step_p < TARGET_STEP {
            break;
        }
        half_a /= 10.0;
        half_p /= 10.0;
    }
    GridSearchResult {
        params: BdgeParams::from_array(best.0).expect("grid points are valid"),
        loglik: best.1,
        stages,
        alpha_step: step_a,
        p_step: step_p,
    }
}
