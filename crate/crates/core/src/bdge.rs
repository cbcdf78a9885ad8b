//! Bivariate law `(X1, X2) = (max(U1, U3), max(U2, U3))` with independent
//! `Ui ~ DGE(alpha_i, p)`.
//!
//! Marginals are `DGE(alpha1 + alpha3, p)` and `DGE(alpha2 + alpha3, p)`;
//! `max(X1, X2) ~ DGE(alpha1 + alpha2 + alpha3, p)`. A zero `alpha3` gives
//! independent coordinates.

use rand::distr::Open01;
use rand::Rng;
use serde::Serialize;

use crate::dge::{self, ge_quantile, DgeParams, TailTolerance};
use crate::error::{Error, Result};
use crate::numeric;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BdgeParams {
    alpha1: f64,
    alpha2: f64,
    alpha3: f64,
    p: f64,
}

impl BdgeParams {
    pub fn new(alpha1: f64, alpha2: f64, alpha3: f64, p: f64) -> Result<Self> {
        for (name, a) in [("alpha1", alpha1), ("alpha2", alpha2), ("alpha3", alpha3)] {
            if !(a.is_finite() && a >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be >= 0, got {a}")));
            }
        }
        if !(alpha1 + alpha3 > 0.0 && alpha2 + alpha3 > 0.0) {
            return Err(Error::InvalidParameter("alpha1 + alpha3 and alpha2 + alpha3 must be positive".into()));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!("p must lie in (0, 1), got {p}")));
        }
        Ok(Self { alpha1, alpha2, alpha3, p })
    }

    /// Bivariate geometric member: both marginals are geometric with base `p`.
    pub fn bivariate_geometric(alpha: f64, p: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        Self::new(1.0 - alpha, 1.0 - alpha, alpha, p)
    }

    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }
    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }
    pub fn alpha3(&self) -> f64 {
        self.alpha3
    }
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.alpha1, self.alpha2, self.alpha3, self.p]
    }

    pub fn from_array(v: [f64; 4]) -> Result<Self> {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn alpha_sum(&self) -> f64 {
        self.alpha1 + self.alpha2 + self.alpha3
    }

    pub fn marginal1(&self) -> DgeParams {
        DgeParams::new(self.alpha1 + self.alpha3, self.p).expect("validated at construction")
    }

    pub fn marginal2(&self) -> DgeParams {
        DgeParams::new(self.alpha2 + self.alpha3, self.p).expect("validated at construction")
    }

    /// Coordinates swapped: the law of `(X2, X1)`.
    pub fn swapped(&self) -> Self {
        Self { alpha1: self.alpha2, alpha2: self.alpha1, ..*self }
    }

    fn ln_p(&self) -> f64 {
        self.p.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BivariatePoint {
    pub x1: u32,
    pub x2: u32,
}

impl BivariatePoint {
    pub fn new(x1: u32, x2: u32) -> Self {
        Self { x1, x2 }
    }
}

/// Joint CDF on signed integer arguments; zero when either is negative.
pub fn joint_cdf_at(x1: i64, x2: i64, params: &BdgeParams) -> f64 {
    if x1 < 0 || x2 < 0 {
        return 0.0;
    }
    let ln_p = params.ln_p();
    let z = x1.min(x2);
    (numeric::ln_cdf(ln_p, params.alpha1, x1)
        + numeric::ln_cdf(ln_p, params.alpha2, x2)
        + numeric::ln_cdf(ln_p, params.alpha3, z))
    .exp()
}

/// `(1 - p^(x1+1))^a1 (1 - p^(x2+1))^a2 (1 - p^(z+1))^a3`, `z = min(x1, x2)`.
pub fn joint_cdf(pt: BivariatePoint, params: &BdgeParams) -> f64 {
    joint_cdf_at(pt.x1 as i64, pt.x2 as i64, params)
}

/// Joint PMF from the closed-form case split.
pub fn joint_pmf(pt: BivariatePoint, params: &BdgeParams) -> f64 {
    let ln_p = params.ln_p();
    let (a1, a2, a3) = (params.alpha1, params.alpha2, params.alpha3);
    let (x1, x2) = (pt.x1 as i64, pt.x2 as i64);
    if x1 < x2 {
        numeric::pmf(ln_p, a1 + a3, x1) * numeric::pmf(ln_p, a2, x2)
    } else if x2 < x1 {
        numeric::pmf(ln_p, a1, x1) * numeric::pmf(ln_p, a2 + a3, x2)
    } else {
        diagonal_pmf(ln_p, a1, a2, a3, x1)
    }
}

/// `(1 - p^(x+1))^a2 f(x; a1 + a3) - (1 - p^x)^(a2 + a3) f(x; a1)`.
fn diagonal_pmf(ln_p: f64, a1: f64, a2: f64, a3: f64, x: i64) -> f64 {
    let p1 = numeric::cdf(ln_p, a2, x);
    let p2 = numeric::cdf(ln_p, a2 + a3, x - 1);
    let v = p1 * numeric::pmf(ln_p, a1 + a3, x) - p2 * numeric::pmf(ln_p, a1, x);
    v.max(0.0)
}

/// Joint PMF by inclusion-exclusion of the joint CDF over the unit rectangle.
/// Slower than [`joint_pmf`]; kept as an independent route.
pub fn joint_pmf_by_rectangle(pt: BivariatePoint, params: &BdgeParams) -> f64 {
    let (x1, x2) = (pt.x1 as i64, pt.x2 as i64);
    joint_cdf_at(x1, x2, params) - joint_cdf_at(x1 - 1, x2, params) - joint_cdf_at(x1, x2 - 1, params)
        + joint_cdf_at(x1 - 1, x2 - 1, params)
}

/// `ln` of [`joint_pmf`], `-inf` for numerically zero mass.
pub fn ln_joint_pmf(pt: BivariatePoint, params: &BdgeParams) -> f64 {
    let ln_p = params.ln_p();
    let (a1, a2, a3) = (params.alpha1, params.alpha2, params.alpha3);
    let (x1, x2) = (pt.x1 as i64, pt.x2 as i64);
    if x1 < x2 {
        numeric::ln_pmf(ln_p, a1 + a3, x1) + numeric::ln_pmf(ln_p, a2, x2)
    } else if x2 < x1 {
        numeric::ln_pmf(ln_p, a1, x1) + numeric::ln_pmf(ln_p, a2 + a3, x2)
    } else {
        let v = diagonal_pmf(ln_p, a1, a2, a3, x1);
        if v < numeric::PROB_FLOOR {
            f64::NEG_INFINITY
        } else {
            v.ln()
        }
    }
}

/// `P(X1 > x1, X2 > x2) = 1 - F1(x1) - F2(x2) + F(x1, x2)`.
pub fn joint_sf(pt: BivariatePoint, params: &BdgeParams) -> f64 {
    let f1 = params.marginal1().cdf(pt.x1 as f64);
    let f2 = params.marginal2().cdf(pt.x2 as f64);
    (1.0 - f1 - f2 + joint_cdf(pt, params)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionalKind {
    /// `P(X1 = x1 | X2 = x2)`
    PmfGivenEq,
    /// `P(X1 <= x1 | X2 <= x2)`
    CdfGivenLe,
    /// `P(X1 <= x1 | X2 = x2)`
    CdfGivenEq,
}

/// Conditional law of `X1` given an event on `X2`, by the case split on the
/// position of `x1` relative to `x2`.
pub fn conditional(kind: ConditionalKind, x1: i64, x2: i64, params: &BdgeParams) -> Result<f64> {
    let ln_p = params.ln_p();
    let (a1, a2, a3) = (params.alpha1, params.alpha2, params.alpha3);
    let c = |a: f64, k: i64| numeric::cdf(ln_p, a, k);
    let f = |a: f64, k: i64| numeric::pmf(ln_p, a, k);
    match kind {
        ConditionalKind::CdfGivenLe => {
            if x2 < 0 || c(a2 + a3, x2) <= 0.0 {
                return Err(Error::Domain(format!("P(X2 <= {x2}) is zero")));
            }
            if x1 < 0 {
                return Ok(0.0);
            }
            Ok(if x1 < x2 {
                (numeric::ln_cdf(ln_p, a1 + a3, x1) - numeric::ln_cdf(ln_p, a3, x2)).exp()
            } else {
                c(a1, x1)
            })
        }
        ConditionalKind::PmfGivenEq | ConditionalKind::CdfGivenEq => {
            let denom = if x2 < 0 { 0.0 } else { f(a2 + a3, x2) };
            if denom <= 0.0 {
                return Err(Error::Domain(format!("P(X2 = {x2}) is zero")));
            }
            if x1 < 0 {
                return Ok(0.0);
            }
            let num = if kind == ConditionalKind::PmfGivenEq {
                joint_pmf(BivariatePoint::new(x1 as u32, x2 as u32), params)
            } else if x1 < x2 {
                c(a1 + a3, x1) * f(a2, x2)
            } else if x2 < x1 {
                return Ok(c(a1, x1));
            } else {
                // diagonal mass plus P(X1 < x, X2 = x), avoiding F(x, x) - F(x, x - 1)
                joint_pmf(BivariatePoint::new(x1 as u32, x1 as u32), params) + c(a1 + a3, x1 - 1) * f(a2, x1)
            };
            Ok((num / denom).clamp(0.0, 1.0))
        }
    }
}

/// Draw `U_i ~ GE(alpha_i, -ln p)` by inversion and return the integer parts
/// of `(max(U1, U3), max(U2, U3))`. A zero shape removes that component.
pub fn sample<R: Rng + ?Sized>(params: &BdgeParams, rng: &mut R) -> BivariatePoint {
    let lambda = -params.ln_p();
    let mut draw = |a: f64| {
        let u: f64 = rng.sample(Open01);
        ge_quantile(u, a, lambda)
    };
    let u1 = draw(params.alpha1);
    let u2 = draw(params.alpha2);
    let u3 = draw(params.alpha3);
    let to_int = |y: f64| y.floor().clamp(0.0, u32::MAX as f64) as u32;
    BivariatePoint::new(to_int(u1.max(u3)), to_int(u2.max(u3)))
}

/// Smallest `n` with `P(max(X1, X2) > n) < eps`, capped by `max_support`.
pub(crate) fn support_horizon(params: &BdgeParams, tol: &TailTolerance) -> i64 {
    let ln_p = params.ln_p();
    let s = params.alpha_sum();
    let mut n = 0i64;
    while numeric::sf(ln_p, s, n) >= tol.eps() && (n as u64) < tol.max_support() {
        n += 1;
    }
    n
}

/// Pearson correlation from truncated double sums of the joint PMF.
pub fn correlation(params: &BdgeParams, tol: &TailTolerance) -> f64 {
    let n = support_horizon(params, tol) as u32;
    let (mut m1, mut m2, mut s11, mut s22, mut s12) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..=n {
        for j in 0..=n {
            let f = joint_pmf(BivariatePoint::new(i, j), params);
            let (x, y) = (i as f64, j as f64);
            m1 += x * f;
            m2 += y * f;
            s11 += x * x * f;
            s22 += y * y * f;
            s12 += x * y * f;
        }
    }
    let cov = s12 - m1 * m2;
    let v1 = s11 - m1 * m1;
    let v2 = s22 - m2 * m2;
    cov / (v1 * v2).sqrt()
}

/// `P(X1 < X2)`.
pub fn prob_strict_less_bdge(params: &BdgeParams, tol: &TailTolerance) -> f64 {
    dge::strict_less_sum(params.alpha1 + params.alpha3, params.alpha2, params.p, tol)
}

/// Law of `max(X1, X2)`.
pub fn max_marginal(params: &BdgeParams) -> DgeParams {
    DgeParams::new(params.alpha_sum(), params.p).expect("validated at construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(a1: f64, a2: f64, a3: f64, p: f64) -> BdgeParams {
        BdgeParams::new(a1, a2, a3, p).unwrap()
    }

    #[test]
    fn constructor_invariants() {
        assert!(BdgeParams::new(0.0, 1.0, 0.0, 0.5).is_err());
        assert!(BdgeParams::new(1.0, 1.0, -0.1, 0.5).is_err());
        assert!(BdgeParams::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(BdgeParams::new(0.0, 0.0, 1.0, 0.5).is_ok());
        assert!(BdgeParams::bivariate_geometric(1.0, 0.5).is_err());
    }

    #[test]
    fn cdf_at_origin() {
        let v = joint_cdf(BivariatePoint::new(0, 0), &bp(1.0, 1.0, 1.0, 0.5));
        assert!((v - 0.125).abs() < 1e-15);
    }

    #[test]
    fn pmf_at_origin_equals_cdf() {
        let q = bp(1.3, 0.4, 2.2, 0.35);
        let v = joint_pmf(BivariatePoint::new(0, 0), &q);
        assert!((v - (1.0f64 - 0.35).powf(1.3 + 0.4 + 2.2)).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_rectangle_at_1_2() {
        let q = bp(1.0, 1.0, 1.0, 0.5);
        let pt = BivariatePoint::new(1, 2);
        assert!((joint_pmf(pt, &q) - joint_pmf_by_rectangle(pt, &q)).abs() < 1e-14);
    }

    #[test]
    fn cdf_given_le_below_branch() {
        let q = bp(1.2, 0.7, 0.9, 0.4);
        let v = conditional(ConditionalKind::CdfGivenLe, 5, 2, &q).unwrap();
        assert!((v - (1.0 - 0.4f64.powi(6)).powf(1.2)).abs() < 1e-14);
    }

    #[test]
    fn conditional_pmf_sums_to_one() {
        let q = bp(1.0, 2.0, 0.5, 0.4);
        let total: f64 = (0..200).map(|x1| conditional(ConditionalKind::PmfGivenEq, x1, 3, &q).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn conditional_cdf_independent_case() {
        let q = bp(1.7, 0.6, 0.0, 0.45);
        for x2 in 0..6 {
            for x1 in 0..8 {
                let v = conditional(ConditionalKind::CdfGivenEq, x1, x2, &q).unwrap();
                let want = q.marginal1().cdf(x1 as f64);
                assert!((v - want).abs() < 1e-13, "{x1},{x2}");
            }
        }
    }

    #[test]
    fn conditional_rejects_null_events() {
        let q = bp(1.0, 1.0, 1.0, 0.5);
        assert!(conditional(ConditionalKind::PmfGivenEq, 0, -1, &q).is_err());
        assert!(conditional(ConditionalKind::CdfGivenLe, 0, -1, &q).is_err());
    }

    #[test]
    fn max_marginal_sums_shapes() {
        let m = max_marginal(&bp(1.0, 1.0, 1.0, 0.5));
        assert_eq!((m.alpha(), m.p()), (3.0, 0.5));
        let m = max_marginal(&bp(1.2836, 3.7705, 1.0358, 0.3410));
        assert!((m.alpha() - 6.0899).abs() < 1e-12);
    }

    #[test]
    fn independence_has_zero_correlation() {
        let r = correlation(&bp(1.5, 0.8, 0.0, 0.5), &TailTolerance::default());
        assert!(r.abs() < 1e-10, "{r}");
    }

    #[test]
    fn strong_common_shock_correlation() {
        let r = correlation(&bp(1.0, 1.0, 50.0, 0.5), &TailTolerance::default());
        assert!(r > 0.9 && r < 1.0, "{r}");
    }

    #[test]
    fn strict_less_reduces_to_univariate() {
        let tol = TailTolerance::default();
        for p in [0.2, 0.5, 0.8] {
            let a = prob_strict_less_bdge(&bp(1.0, 1.0, 0.0, p), &tol);
            let b = dge::prob_strict_less(1.0, 1.0, p, &tol).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }
}
