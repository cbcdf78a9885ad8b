//! Trivariate-reduction bivariate Poisson: `X1 = Y1 + Y3`, `X2 = Y2 + Y3`
//! with independent `Yi ~ Poisson(lambda_i)`.

use serde::Serialize;
use statrs::function::factorial::ln_factorial;

use crate::bdge::BivariatePoint;
use crate::error::{Error, Result};
use crate::fit::BivariateDataset;
use crate::optim::golden_section_max;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BvPoissonParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

impl BvPoissonParams {
    pub fn new(lambda1: f64, lambda2: f64, lambda3: f64) -> Result<Self> {
        for (name, l) in [("lambda1", lambda1), ("lambda2", lambda2), ("lambda3", lambda3)] {
            if !(l.is_finite() && l >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be >= 0, got {l}")));
            }
        }
        Ok(Self { lambda1, lambda2, lambda3 })
    }
}

fn ln_poisson(k: u32, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    k as f64 * lambda.ln() - lambda - ln_factorial(k as u64)
}

/// `sum_{k <= min(i, j)} Pois(i - k; l1) Pois(j - k; l2) Pois(k; l3)`.
pub fn bvpois_pmf(pt: BivariatePoint, params: &BvPoissonParams) -> f64 {
    let (i, j) = (pt.x1, pt.x2);
    (0..=i.min(j))
        .map(|k| {
            (ln_poisson(i - k, params.lambda1) + ln_poisson(j - k, params.lambda2) + ln_poisson(k, params.lambda3))
                .exp()
        })
        .sum()
}

pub fn bvpois_loglik(data: &BivariateDataset, params: &BvPoissonParams) -> f64 {
    data.distinct().iter().map(|(pt, c)| *c as f64 * bvpois_pmf(*pt, params).ln()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BvPoissonFit {
    pub params: BvPoissonParams,
    pub loglik: f64,
    /// `lambda3` ended at zero.
    pub boundary: bool,
}

const POINTS: usize = 21;

/// Maximum likelihood by a staged 3-D grid followed by coordinate-wise
/// golden-section polishing.
pub fn bvpois_fit(data: &BivariateDataset) -> Result<BvPoissonFit> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let distinct = data.distinct();
    let ll = |v: [f64; 3]| -> f64 {
        if v.iter().any(|&l| l < 0.0) {
            return f64::NEG_INFINITY;
        }
        let q = BvPoissonParams { lambda1: v[0], lambda2: v[1], lambda3: v[2] };
        distinct.iter().map(|(pt, c)| *c as f64 * bvpois_pmf(*pt, &q).ln()).sum()
    };
    let n = data.len() as f64;
    let m1 = data.pairs().iter().map(|p| p.x1 as f64).sum::<f64>() / n;
    let m2 = data.pairs().iter().map(|p| p.x2 as f64).sum::<f64>() / n;
    let upper = 2.0 * m1.max(m2) + 1.0;

    let mut center = [0.5 * upper; 3];
    let mut half = 0.5 * upper;
    let mut best = (center, f64::NEG_INFINITY);
    let mut step = f64::INFINITY;
    while step > 1e-6 {
        let axis = |c: f64| -> Vec<f64> {
            let a = (c - half).max(0.0);
            let b = (c + half).min(upper);
            let s = (b - a) / (POINTS - 1) as f64;
            (0..POINTS).map(|i| a + s * i as f64).collect()
        };
        let axes = center.map(axis);
        step = axes.iter().map(|a| a[1] - a[0]).fold(0.0, f64::max);
        for &l1 in &axes[0] {
            for &l2 in &axes[1] {
                for &l3 in &axes[2] {
                    let v = [l1, l2, l3];
                    let w = ll(v);
                    if w > best.1 {
                        best = (v, w);
                    }
                }
            }
        }
        center = best.0;
        half /= 10.0;
    }
    // coordinate polishing inside one final grid step
    let mut v = best.0;
    for _ in 0..50 {
        let before = ll(v);
        for i in 0..3 {
            let lo = (v[i] - step).max(0.0);
            let hi = v[i] + step;
            let m = golden_section_max(
                |x| {
                    let mut w = v;
                    w[i] = x;
                    ll(w)
                },
                lo,
                hi,
                1e-12,
            );
            if m.value >= ll(v) {
                v[i] = m.x;
            }
        }
        if ll(v) - before < 1e-13 {
            break;
        }
    }
    let params = BvPoissonParams::new(v[0], v[1], v[2])?;
    Ok(BvPoissonFit { params, loglik: ll(v), boundary: v[2] <= 1e-9 })
}
