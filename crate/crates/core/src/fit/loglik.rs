use crate::bdge::BdgeParams;
use crate::fit::{BivariateDataset, LatentTriple};
use crate::numeric;

fn ln_pos(v: f64) -> f64 {
    if v < numeric::PROB_FLOOR {
        f64::NEG_INFINITY
    } else {
        v.ln()
    }
}

/// Observed-data log-likelihood as the five partition sums: over `I1` the
/// DGE(a1+a3) and DGE(a2) terms, over `I2` the DGE(a1) and DGE(a2+a3) terms,
/// and over `I0` the diagonal term
/// `ln[(1-p^(x+1))^a2 f(x; a1+a3) - (1-p^x)^(a2+a3) f(x; a1)]`.
pub fn observed_loglik(data: &BivariateDataset, params: &BdgeParams) -> f64 {
    let ln_p = params.p().ln();
    let (a1, a2, a3) = (params.alpha1(), params.alpha2(), params.alpha3());
    let pairs = data.pairs();
    let mut ll = 0.0;
    for &i in data.i1() {
        let pt = pairs[i];
        ll += numeric::ln_pmf(ln_p, a1 + a3, pt.x1 as i64);
        ll += numeric::ln_pmf(ln_p, a2, pt.x2 as i64);
    }
    for &i in data.i2() {
        let pt = pairs[i];
        ll += numeric::ln_pmf(ln_p, a1, pt.x1 as i64);
        ll += numeric::ln_pmf(ln_p, a2 + a3, pt.x2 as i64);
    }
    for &i in data.i0() {
        let x = pairs[i].x1 as i64;
        let upper = numeric::cdf(ln_p, a2, x) * numeric::pmf(ln_p, a1 + a3, x);
        let lower = numeric::cdf(ln_p, a2 + a3, x - 1) * numeric::pmf(ln_p, a1, x);
        ll += ln_pos(upper - lower);
    }
    ll
}

/// `g1(alpha1, p) + g2(alpha2, p) + g3(alpha3, p)` for known latent maxima.
pub fn complete_loglik(latents: &[LatentTriple], params: &BdgeParams) -> f64 {
    let ln_p = params.p().ln();
    latents
        .iter()
        .map(|t| {
            numeric::ln_pmf(ln_p, params.alpha1(), t.u1 as i64)
                + numeric::ln_pmf(ln_p, params.alpha2(), t.u2 as i64)
                + numeric::ln_pmf(ln_p, params.alpha3(), t.u3 as i64)
        })
        .sum()
}
