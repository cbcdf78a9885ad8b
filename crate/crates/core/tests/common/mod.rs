#![allow(dead_code)]

use ::bdge::bdge::{self, joint_pmf};
use ::bdge::fit::BivariateDataset;
use ::bdge::hypothesis::chi2_sf;
use ::bdge::{BdgeParams, BivariatePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn simulate(params: &BdgeParams, n: usize, seed: u64) -> BivariateDataset {
    let mut r = rng(seed);
    BivariateDataset::new((0..n).map(|_| bdge::sample(params, &mut r)).collect()).unwrap()
}

/// Parameters with shapes in `[0.2, 5)` and `p` in `[0.1, 0.9)`.
pub fn random_params(r: &mut ChaCha8Rng) -> BdgeParams {
    BdgeParams::new(
        r.random_range(0.2..5.0),
        r.random_range(0.2..5.0),
        r.random_range(0.2..5.0),
        r.random_range(0.1..0.9),
    )
    .unwrap()
}

/// Kolmogorov distance between the empirical CDF of integer draws and `cdf`.
pub fn ks_distance<F: Fn(u32) -> f64>(draws: &[u32], cdf: F) -> f64 {
    let mut sorted = draws.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    let top = *sorted.last().unwrap();
    for x in 0..=top {
        while i < sorted.len() && sorted[i] <= x {
            i += 1;
        }
        d = d.max((i as f64 / n - cdf(x)).abs());
    }
    d
}

/// Asymptotic 1% critical value; conservative for discrete laws.
pub fn ks_critical_01(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}

/// Pearson p-value of counts against probabilities over cells with expected
/// count at least 5; the remaining cells are pooled into one.
pub fn pooled_gof(counts: &[(u64, f64)], n: u64) -> f64 {
    let nf = n as f64;
    let (mut chi2, mut cells) = (0.0, 0usize);
    let (mut rest_o, mut rest_e) = (0.0, 0.0);
    for &(o, p) in counts {
        let e = nf * p;
        if e >= 5.0 {
            chi2 += (o as f64 - e).powi(2) / e;
            cells += 1;
        } else {
            rest_o += o as f64;
            rest_e += e;
        }
    }
    let seen: f64 = counts.iter().map(|c| c.0 as f64).sum::<f64>();
    rest_o += nf - seen;
    rest_e += nf - counts.iter().map(|c| nf * c.1).sum::<f64>();
    if rest_e > 0.0 {
        chi2 += (rest_o - rest_e).powi(2) / rest_e;
        cells += 1;
    }
    chi2_sf(chi2, (cells - 1) as u32)
}

/// Sampler-vs-PMF chi-square p-value for the bivariate law.
pub fn bdge_sampler_gof(params: &BdgeParams, draws: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let k = 30usize;
    let mut table = vec![0u64; k * k];
    for _ in 0..draws {
        let pt = bdge::sample(params, &mut r);
        if (pt.x1 as usize) < k && (pt.x2 as usize) < k {
            table[pt.x1 as usize * k + pt.x2 as usize] += 1;
        }
    }
    let cells: Vec<(u64, f64)> = (0..k * k)
        .map(|c| (table[c], joint_pmf(BivariatePoint::new((c / k) as u32, (c % k) as u32), params)))
        .collect();
    pooled_gof(&cells, draws as u64)
}
