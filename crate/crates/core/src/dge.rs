//! Univariate discrete generalized exponential law `DGE(alpha, p)`.
//!
//! `P(X <= x) = (1 - p^(x+1))^alpha` on `{0, 1, 2, ...}`. With `alpha = 1`
//! this is the geometric law with success probability `1 - p`.

use rand::distr::Open01;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{self, BinomialSeries};
use crate::optim::{golden_section_max, scan_then_golden_max, Maximum};

/// Shape `alpha > 0` and base `p` in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DgeParams {
    alpha: f64,
    p: f64,
}

impl DgeParams {
    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!("p must lie in (0, 1), got {p}")));
        }
        Ok(Self { alpha, p })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Rate of the underlying continuous law, `-ln p`.
    pub fn lambda(&self) -> f64 {
        -self.p.ln()
    }

    fn ln_p(&self) -> f64 {
        self.p.ln()
    }

    pub fn pmf(&self, x: i64) -> f64 {
        pmf(x, self)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        cdf(x, self)
    }

    /// `P(X > x)` for integer `x`.
    pub fn sf(&self, x: i64) -> f64 {
        numeric::sf(self.ln_p(), self.alpha, x)
    }
}

/// Truncation control for infinite sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailTolerance {
    eps: f64,
    max_support: u64,
}

impl TailTolerance {
    pub fn new(eps: f64, max_support: u64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
        }
        if max_support < 1 {
            return Err(Error::InvalidParameter("max_support must be >= 1".into()));
        }
        Ok(Self { eps, max_support })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn max_support(&self) -> u64 {
        self.max_support
    }
}

impl Default for TailTolerance {
    fn default() -> Self {
        Self { eps: 1e-12, max_support: 1_000_000 }
    }
}

/// `P(X = x)`; zero off the support.
pub fn pmf(x: i64, params: &DgeParams) -> f64 {
    numeric::pmf(params.ln_p(), params.alpha, x)
}

/// `P(X <= x)` with floor semantics for non-integer `x`.
pub fn cdf(x: f64, params: &DgeParams) -> f64 {
    if x < 0.0 || x.is_nan() {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    numeric::cdf(params.ln_p(), params.alpha, x.floor() as i64)
}

/// Probability generating function `E[z^X]` for `|z| < 1`.
///
/// Evaluates the binomial series `sum_j (-1)^(j+1) C(alpha, j) (1 - p^j) / (1 - z p^j)`
/// rearranged as `1 - (1 - z) sum_j (-1)^(j+1) C(alpha, j) p^j / (1 - z p^j)`,
/// using `sum_j (-1)^(j+1) C(alpha, j) = 1`. The rearranged terms decay like `p^j`;
/// past `j > alpha` they keep one sign, so the tail is bounded by `|term| / (1 - p)`.
pub fn pgf(z: f64, params: &DgeParams, tol: &TailTolerance) -> Result<f64> {
    if z.is_nan() || z.abs() >= 1.0 {
        return Err(Error::Domain(format!("pgf needs |z| < 1, got {z}")));
    }
    let (alpha, p) = (params.alpha, params.p);
    let mut acc = 0.0;
    let mut pj = 1.0;
    for (j, coef) in BinomialSeries::new(alpha).skip(1) {
        pj *= p;
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * coef * pj / (1.0 - z * pj);
        acc += term;
        if (j as f64 > alpha && term.abs() < tol.eps * (1.0 - p)) || j >= tol.max_support {
            break;
        }
    }
    Ok(1.0 - (1.0 - z) * acc)
}

/// Mean and variance by direct summation, truncated once the survival
/// weighted by `(x + 1)^2` drops below `eps`.
pub fn moments(params: &DgeParams, tol: &TailTolerance) -> (f64, f64) {
    let (mut m1, mut m2) = (0.0, 0.0);
    let mut x = 0i64;
    loop {
        let f = params.pmf(x);
        let xf = x as f64;
        m1 += xf * f;
        m2 += xf * xf * f;
        if (xf + 1.0).powi(2) * params.sf(x) < tol.eps || x as u64 >= tol.max_support {
            break;
        }
        x += 1;
    }
    (m1, (m2 - m1 * m1).max(0.0))
}

/// Quantile of the continuous `GE(alpha, lambda)` law: `-ln(1 - u^(1/alpha)) / lambda`.
/// A zero shape is the degenerate component at `-inf`.
pub(crate) fn ge_quantile(u: f64, alpha: f64, lambda: f64) -> f64 {
    if alpha == 0.0 {
        return f64::NEG_INFINITY;
    }
    -(-(u.ln() / alpha).exp_m1()).ln() / lambda
}

/// One draw as the integer part of a `GE(alpha, -ln p)` variate.
pub fn sample<R: Rng + ?Sized>(params: &DgeParams, rng: &mut R) -> u32 {
    let u: f64 = rng.sample(Open01);
    let y = ge_quantile(u, params.alpha, params.lambda());
    y.floor().min(u32::MAX as f64) as u32
}

/// `P(X1 < X2)` for independent `X1 ~ DGE(alpha1, p)`, `X2 ~ DGE(alpha2, p)`.
pub fn prob_strict_less(alpha1: f64, alpha2: f64, p: f64, tol: &TailTolerance) -> Result<f64> {
    DgeParams::new(alpha1, p)?;
    DgeParams::new(alpha2, p)?;
    Ok(strict_less_sum(alpha1, alpha2, p, tol))
}

/// `sum_j P(X2 = j + 1) P(X1 <= j)` with `X1 ~ DGE(a1, p)`, `X2 ~ DGE(a2, p)`.
pub(crate) fn strict_less_sum(a1: f64, a2: f64, p: f64, tol: &TailTolerance) -> f64 {
    let ln_p = p.ln();
    let mut acc = 0.0;
    let mut j = 0i64;
    loop {
        acc += numeric::pmf(ln_p, a2, j + 1) * numeric::cdf(ln_p, a1, j);
        if numeric::sf(ln_p, a2, j + 1) < tol.eps || j as u64 >= tol.max_support {
            break;
        }
        j += 1;
    }
    acc
}

/// Density of the fractional part `U = Y - [Y]` given `[Y] = j`, `Y ~ GE(alpha, -ln p)`.
pub fn frac_part_conditional_pdf(u: f64, j: u32, params: &DgeParams) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("u must lie in (0, 1), got {u}")));
    }
    let (alpha, p) = (params.alpha, params.p);
    let lambda = params.lambda();
    let t = j as f64 + u;
    let pt = p.powf(t);
    let num = alpha * lambda * (1.0 - pt).powf(alpha - 1.0) * pt;
    Ok(num / params.pmf(j as i64))
}

/// `sum_i ln P(X = x_i)`; `-inf` when any point has (numerically) zero mass.
pub fn loglik(data: &[u32], params: &DgeParams) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let ln_p = params.ln_p();
    Ok(data.iter().map(|&x| numeric::ln_pmf(ln_p, params.alpha, x as i64)).sum())
}

/// Non-negative weights indexed by value; the sufficient statistic of a DGE
/// log-likelihood. Integer counts for observed columns, fractional weights for
/// posterior-weighted latent columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedCounts {
    weights: Vec<f64>,
}

impl WeightedCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_values<I: IntoIterator<Item = u32>>(values: I) -> Self {
        let mut c = Self::new();
        for v in values {
            c.add(v, 1.0);
        }
        c
    }

    pub fn add(&mut self, value: u32, weight: f64) {
        let i = value as usize;
        if self.weights.len() <= i {
            self.weights.resize(i + 1, 0.0);
        }
        self.weights[i] += weight;
    }

    pub fn merge(&mut self, other: &WeightedCounts) {
        for (v, w) in other.iter() {
            self.add(v, w);
        }
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Number of distinct values carrying positive weight.
    pub fn support_size(&self) -> usize {
        self.weights.iter().filter(|&&w| w > 0.0).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.weights.iter().enumerate().filter(|(_, &w)| w > 0.0).map(|(v, &w)| (v as u32, w))
    }

    /// `sum_u w_u ln f_DGE(u; alpha, p)`; `alpha = 0` is the point mass at zero.
    pub fn loglik(&self, alpha: f64, p: f64) -> f64 {
        let ln_p = p.ln();
        self.iter().map(|(v, w)| w * numeric::ln_pmf(ln_p, alpha, v as i64)).sum()
    }
}

/// Search box for shapes, on the log scale.
pub const ALPHA_MIN: f64 = 1e-4;
pub const ALPHA_MAX: f64 = 1e4;
/// Search box for the base, on the logit scale.
pub const P_MIN: f64 = 1e-6;
pub const P_MAX: f64 = 1.0 - 1e-6;

pub(crate) fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

pub(crate) fn expit(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// Maximizer over `alpha` of `counts.loglik(alpha, p)` for fixed `p`.
/// The objective is log-concave in `alpha`, hence unimodal in `ln alpha`.
pub fn profile_alpha(counts: &WeightedCounts, p: f64, tol: f64) -> Maximum {
    let m = golden_section_max(|t| counts.loglik(t.exp(), p), ALPHA_MIN.ln(), ALPHA_MAX.ln(), tol);
    Maximum { x: m.x.exp(), ..m }
}

/// Profile search over `p` (logit scale, scanned then refined) of an objective
/// that is itself maximized over shapes for each `p`.
pub(crate) fn profile_p<F>(mut objective: F, tol: f64) -> Maximum
where
    F: FnMut(f64) -> f64,
{
    let m = scan_then_golden_max(|t| objective(expit(t)), logit(P_MIN), logit(P_MAX), 57, tol);
    Maximum { x: expit(m.x), ..m }
}

/// Two-parameter maximum likelihood fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DgeFit {
    pub params: DgeParams,
    pub loglik: f64,
    /// False for degenerate data (a single support value) or when the
    /// optimum sits on the search box.
    pub converged: bool,
}

/// Maximum likelihood estimates of `(alpha, p)` by profile likelihood.
pub fn fit(data: &[u32]) -> Result<DgeFit> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    fit_counts(&WeightedCounts::from_values(data.iter().copied()), 1e-8)
}

pub(crate) fn fit_counts(counts: &WeightedCounts, tol: f64) -> Result<DgeFit> {
    if counts.total() <= 0.0 {
        return Err(Error::EmptyData);
    }
    let mut alpha_boundary = false;
    let outer = profile_p(|p| profile_alpha(counts, p, tol).value, tol);
    let inner = profile_alpha(counts, outer.x, tol);
    alpha_boundary |= inner.at_boundary;
    let params = DgeParams::new(inner.x, outer.x)?;
    Ok(DgeFit {
        params,
        loglik: counts.loglik(inner.x, outer.x),
        converged: counts.support_size() > 1 && !outer.at_boundary && !alpha_boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dp(a: f64, p: f64) -> DgeParams {
        DgeParams::new(a, p).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(DgeParams::new(0.0, 0.5).is_err());
        assert!(DgeParams::new(1.0, 1.0).is_err());
        assert!(DgeParams::new(1.0, 0.0).is_err());
        assert!(TailTolerance::new(0.0, 10).is_err());
        assert!(TailTolerance::new(1e-3, 0).is_err());
    }

    #[test]
    fn pmf_examples() {
        assert!((dp(3.0, 0.5).pmf(0) - 0.125).abs() < 1e-15);
        // 0.75^2 - 0.5^2
        assert!((dp(2.0, 0.5).pmf(1) - 0.3125).abs() < 1e-15);
        assert!((dp(1.0, 0.5).pmf(2) - 0.125).abs() < 1e-15);
        assert_eq!(dp(1.0, 0.5).pmf(-1), 0.0);
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(dp(1.3, 0.4).cdf(-0.5), 0.0);
        assert!((dp(1.0, 0.5).cdf(2.0) - 0.875).abs() < 1e-15);
        let q = dp(2.0, 0.3);
        assert_eq!(q.cdf(2.7), q.cdf(2.0));
    }

    #[test]
    fn pgf_examples() {
        let tol = TailTolerance::default();
        assert!((pgf(0.0, &dp(2.0, 0.5), &tol).unwrap() - 0.25).abs() < 1e-14);
        assert!((pgf(0.5, &dp(1.0, 0.5), &tol).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        assert!(pgf(1.0, &dp(1.0, 0.5), &tol).is_err());
        assert!(pgf(-1.2, &dp(1.0, 0.5), &tol).is_err());
    }

    #[test]
    fn geometric_moments() {
        let tol = TailTolerance::default();
        let (m, v) = moments(&dp(1.0, 0.5), &tol);
        assert!((m - 1.0).abs() < 1e-10 && (v - 2.0).abs() < 1e-9);
        let (m, v) = moments(&dp(1.0, 0.25), &tol);
        assert!((m - 1.0 / 3.0).abs() < 1e-10 && (v - 4.0 / 9.0).abs() < 1e-10);
    }

    #[test]
    fn strict_less_geometric_closed_form() {
        let v = prob_strict_less(1.0, 1.0, 0.5, &TailTolerance::default()).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn frac_part_density() {
        let q = dp(1.0, 0.5);
        // limit u -> 0 of lambda p^u / (1 - p)
        let v = frac_part_conditional_pdf(1e-12, 0, &q).unwrap();
        assert!((v - 2.0 * 2f64.ln()).abs() < 1e-9);
        assert!(frac_part_conditional_pdf(0.0, 0, &q).is_err());
        assert!(frac_part_conditional_pdf(1.0, 0, &q).is_err());
    }

    #[test]
    fn loglik_examples() {
        assert!((loglik(&[0], &dp(1.0, 0.5)).unwrap() - 0.5f64.ln()).abs() < 1e-15);
        let v = loglik(&[0, 0], &dp(2.0, 0.5)).unwrap();
        // pmf(0) = 0.5^2
        assert!((v - 2.0 * 0.25f64.ln()).abs() < 1e-14);
        assert_eq!(loglik(&[], &dp(2.0, 0.5)), Err(Error::EmptyData));
    }

    #[test]
    fn fit_flags_degenerate_data() {
        let f = fit(&[2, 2, 2, 2]).unwrap();
        assert!(!f.converged);
        assert!(fit(&[]).is_err());
    }

    #[test]
    fn fit_recovers_simulated_params() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let truth = dp(2.5, 0.4);
        let data: Vec<u32> = (0..20_000).map(|_| sample(&truth, &mut rng)).collect();
        let f = fit(&data).unwrap();
        assert!(f.converged);
        assert!((f.params.alpha() - 2.5).abs() < 0.15, "{:?}", f.params);
        assert!((f.params.p() - 0.4).abs() < 0.02, "{:?}", f.params);
    }

    #[test]
    fn sampling_is_deterministic() {
        let q = dp(2.0, 0.5);
        let a: Vec<u32> = {
            let mut r = ChaCha8Rng::seed_from_u64(5);
            (0..100).map(|_| sample(&q, &mut r)).collect()
        };
        let b: Vec<u32> = {
            let mut r = ChaCha8Rng::seed_from_u64(5);
            (0..100).map(|_| sample(&q, &mut r)).collect()
        };
        assert_eq!(a, b);
    }
}
