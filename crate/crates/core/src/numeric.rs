//! Numerically stable building blocks shared by the univariate and
//! bivariate laws.

use nalgebra::DMatrix;

/// Probabilities below this are treated as zero.
pub(crate) const PROB_FLOOR: f64 = 1e-300;

/// `ln(1 - p^k)` for `k >= 0`; `-inf` at `k = 0`.
#[inline]
pub(crate) fn ln_one_minus_pow(ln_p: f64, k: i64) -> f64 {
    if k <= 0 {
        return f64::NEG_INFINITY;
    }
    (-(k as f64 * ln_p).exp()).ln_1p()
}

/// `alpha * ln(1 - p^(k+1))`, the log of the DGE CDF at integer `k >= 0`.
/// An exponent of zero gives the point mass at 0 (log CDF 0 everywhere).
#[inline]
pub(crate) fn ln_cdf(ln_p: f64, alpha: f64, k: i64) -> f64 {
    if k < 0 {
        return f64::NEG_INFINITY;
    }
    if alpha == 0.0 {
        return 0.0;
    }
    alpha * ln_one_minus_pow(ln_p, k + 1)
}

#[inline]
pub(crate) fn cdf(ln_p: f64, alpha: f64, k: i64) -> f64 {
    if k < 0 {
        0.0
    } else {
        ln_cdf(ln_p, alpha, k).exp()
    }
}

/// Upper tail `P(X > k)` without cancellation.
#[inline]
pub(crate) fn sf(ln_p: f64, alpha: f64, k: i64) -> f64 {
    if k < 0 {
        1.0
    } else {
        -ln_cdf(ln_p, alpha, k).exp_m1()
    }
}

/// Log PMF `ln[(1 - p^(k+1))^a - (1 - p^k)^a]`.
#[inline]
pub(crate) fn ln_pmf(ln_p: f64, alpha: f64, k: i64) -> f64 {
    if k < 0 {
        return f64::NEG_INFINITY;
    }
    let upper = ln_cdf(ln_p, alpha, k);
    if k == 0 {
        return upper;
    }
    let lower = ln_cdf(ln_p, alpha, k - 1);
    let diff = -(lower - upper).exp_m1();
    if diff <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let v = upper + diff.ln();
    if v < PROB_FLOOR.ln() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

#[inline]
pub(crate) fn pmf(ln_p: f64, alpha: f64, k: i64) -> f64 {
    ln_pmf(ln_p, alpha, k).exp()
}

/// Generalized binomial coefficients `C(a, j)` for `j = 0, 1, ...`.
pub(crate) struct BinomialSeries {
    a: f64,
    j: u64,
    coef: f64,
}

impl BinomialSeries {
    pub(crate) fn new(a: f64) -> Self {
        Self { a, j: 0, coef: 1.0 }
    }
}

impl Iterator for BinomialSeries {
    type Item = (u64, f64);

    fn next(&mut self) -> Option<Self::Item> {
        let out = (self.j, self.coef);
        self.coef *= (self.a - self.j as f64) / (self.j + 1) as f64;
        self.j += 1;
        Some(out)
    }
}

/// Central finite-difference Hessian of `f` at `x`.
///
/// `steps[i]` is the absolute step for coordinate `i`. The result is
/// symmetrized.
pub fn numerical_hessian<F>(f: F, x: &[f64], steps: &[f64]) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let n = x.len();
    assert_eq!(n, steps.len(), "one step per coordinate");
    let mut h = DMatrix::zeros(n, n);
    let mut pt = x.to_vec();
    let f0 = f(x);
    let eval = |pt: &mut Vec<f64>, moves: &[(usize, f64)]| {
        for &(i, d) in moves {
            pt[i] += d;
        }
        let v = f(pt);
        for &(i, d) in moves {
            pt[i] -= d;
        }
        v
    };
    for i in 0..n {
        let hi = steps[i];
        let fp = eval(&mut pt, &[(i, hi)]);
        let fm = eval(&mut pt, &[(i, -hi)]);
        h[(i, i)] = (fp - 2.0 * f0 + fm) / (hi * hi);
        for j in (i + 1)..n {
            let hj = steps[j];
            let fpp = eval(&mut pt, &[(i, hi), (j, hj)]);
            let fpm = eval(&mut pt, &[(i, hi), (j, -hj)]);
            let fmp = eval(&mut pt, &[(i, -hi), (j, hj)]);
            let fmm = eval(&mut pt, &[(i, -hi), (j, -hj)]);
            let v = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}
