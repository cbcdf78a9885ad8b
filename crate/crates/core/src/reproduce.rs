//! End-to-end analysis of the football fixture: univariate fits, the BDGE
//! EM fit and grid oracle, expected-frequency tables, likelihood ratio tests
//! and the bivariate Poisson comparison, each checked against the published
//! figures.

use serde::Serialize;

use crate::bdge::{joint_pmf, BdgeParams, BivariatePoint};
use crate::dge::{self, DgeParams};
use crate::error::Result;
use crate::fit::{
    em_fit, grid_search_mle, initial_estimates, observed_loglik, BivariateDataset, FitConfig, FitResult,
    GridSearchResult, InitialEstimates,
};
use crate::hypothesis::{
    bvpois_fit, bvpois_loglik, bvpois_pmf, chi_square_gof, chi_square_gof_1d, likelihood_ratio_test, BvPoissonFit,
    BvPoissonParams, GofResult, LrtResult, TailPolicy, TestKind,
};

pub const PUBLISHED_BDGE_TABLE: [[f64; 4]; 4] =
    [[1.28, 2.60, 1.43, 0.57], [1.32, 5.46, 2.50, 0.99], [0.58, 1.79, 2.47, 0.52], [0.21, 0.66, 0.43, 0.78]];
pub const PUBLISHED_EQUAL_A12_TABLE: [[f64; 4]; 4] =
    [[1.33, 1.99, 0.92, 0.33], [1.99, 6.06, 2.23, 0.79], [0.92, 2.22, 2.52, 0.44], [0.33, 0.79, 0.44, 0.73]];
pub const PUBLISHED_BVPOIS_TABLE: [[f64; 4]; 4] =
    [[2.48, 2.42, 1.18, 0.38], [2.01, 3.36, 2.32, 0.98], [0.81, 1.92, 1.89, 1.05], [0.22, 0.67, 0.87, 0.64]];
pub const PUBLISHED_BDGE_PARAMS: [f64; 4] = [1.2836, 3.7705, 1.0358, 0.3410];
/// Published estimates under `alpha1 = alpha2`.
pub const PUBLISHED_EQUAL_A12_PARAMS: [f64; 4] = [3.3025, 3.3025, 1.1423, 0.3175];
pub const PUBLISHED_BVPOIS_PARAMS: [f64; 3] = [0.8089, 0.9737, 0.5643];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Target {
    Within {
        expected: f64,
        tol: f64,
    },
    /// Relative: `|observed / expected - 1| <= tol`.
    WithinRel {
        expected: f64,
        tol: f64,
    },
    Above(f64),
    Below(f64),
    Between(f64, f64),
}

impl Target {
    pub fn holds(&self, x: f64) -> bool {
        match *self {
            Target::Within { expected, tol } => (x - expected).abs() <= tol,
            Target::WithinRel { expected, tol } => (x / expected - 1.0).abs() <= tol,
            Target::Above(b) => x > b,
            Target::Below(b) => x < b,
            Target::Between(lo, hi) => x > lo && x < hi,
        }
    }
}

/// Plain decimal for ordinary magnitudes, scientific otherwise.
pub fn format_number(v: f64) -> String {
    if v != 0.0 && v.is_finite() && !(1e-3..1e6).contains(&v.abs()) {
        format!("{v:.4e}")
    } else {
        format!("{v}")
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = format_number;
        match *self {
            Target::Within { expected, tol } => write!(f, "{} +/- {}", n(expected), n(tol)),
            Target::WithinRel { expected, tol } => write!(f, "{} +/- {}%", n(expected), tol * 100.0),
            Target::Above(b) => write!(f, "> {}", n(b)),
            Target::Below(b) => write!(f, "< {}", n(b)),
            Target::Between(lo, hi) => write!(f, "in ({}, {})", n(lo), n(hi)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub criterion: u32,
    pub name: String,
    pub observed: f64,
    pub target: Target,
    pub pass: bool,
    /// Reported but not counted towards success.
    pub informational: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReproduceConfig {
    pub fit: FitConfig,
    /// Degrees of freedom for the bivariate chi-square.
    pub gof_df: u32,
    pub tail: TailPolicy,
    pub run_grid: bool,
}

impl Default for ReproduceConfig {
    fn default() -> Self {
        Self { fit: FitConfig::default(), gof_df: 14, tail: TailPolicy::Truncate, run_grid: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnivariateRow {
    pub label: &'static str,
    pub params: DgeParams,
    pub loglik: f64,
    pub gof: GofResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseStudy {
    pub n: usize,
    pub observed: Vec<Vec<u64>>,
    pub univariate: Vec<UnivariateRow>,
    pub initial: InitialEstimates,
    pub em: FitResult,
    pub grid: Option<GridSearchResult>,
    pub gof_bdge: GofResult,
    pub gof_equal_a12: GofResult,
    pub gof_bvpois: GofResult,
    pub lrt_equal_a12: LrtResult,
    pub lrt_geometric: LrtResult,
    pub lrt_equal_all: LrtResult,
    pub lrt_independence: LrtResult,
    pub bvpois: BvPoissonFit,
    pub checks: Vec<Check>,
}

impl CaseStudy {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass || c.informational)
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, criterion: u32, name: impl Into<String>, observed: f64, target: Target) {
        self.add(criterion, name, observed, target, false);
    }

    fn info(&mut self, criterion: u32, name: impl Into<String>, observed: f64, target: Target) {
        self.add(criterion, name, observed, target, true);
    }

    fn add(&mut self, criterion: u32, name: impl Into<String>, observed: f64, target: Target, informational: bool) {
        let pass = observed.is_finite() && target.holds(observed);
        self.0.push(Check { criterion, name: name.into(), observed, target, pass, informational });
    }
}

fn within(expected: f64, tol: f64) -> Target {
    Target::Within { expected, tol }
}

fn max_cell_deviation(a: &[Vec<f64>], b: &[[f64; 4]; 4]) -> f64 {
    a.iter().zip(b).flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).abs())).fold(0.0, f64::max)
}

fn bivariate_gof<F: Fn(u32, u32) -> f64>(
    observed: &[Vec<u64>],
    n: u64,
    pmf: F,
    cfg: &ReproduceConfig,
) -> Result<GofResult> {
    chi_square_gof(observed, pmf, n, cfg.gof_df, cfg.tail)
}

/// Runs the complete analysis on `data` (normally the bundled fixture).
pub fn run_case_study(data: &BivariateDataset, cfg: &ReproduceConfig) -> Result<CaseStudy> {
    let n = data.len() as u64;
    let mut checks = Checks(Vec::new());

    // univariate fits, scores grouped as 0, 1, 2, 3+
    let columns = [("x1", data.column1()), ("x2", data.column2()), ("max", data.max_column())];
    let published = [(4.6681, 0.2617, 0.2689), (8.4382, 0.2311, 0.9619), (12.2939, 0.2283, 0.7857)];
    let mut univariate = Vec::new();
    for ((label, col), (a, p, pv)) in columns.into_iter().zip(published) {
        let f = dge::fit(&col)?;
        let mut counts = vec![0u64; 4];
        for &v in &col {
            counts[(v as usize).min(3)] += 1;
        }
        let q = f.params;
        let gof = chi_square_gof_1d(&counts, |x| q.pmf(x as i64), n, 3, TailPolicy::AbsorbTail { horizon: 400 })?;
        checks.push(1, format!("{label} alpha"), q.alpha(), within(a, 0.01));
        checks.push(1, format!("{label} p"), q.p(), within(p, 0.01));
        checks.info(1, format!("{label} chi-square p-value (4 cells, 3 df)"), gof.p_value, within(pv, 0.02));
        univariate.push(UnivariateRow { label, params: q, loglik: f.loglik, gof });
    }

    let initial = initial_estimates(data)?;
    for (name, v, e) in [
        ("alpha1", initial.params.alpha1(), 3.8557),
        ("alpha2", initial.params.alpha2(), 7.6258),
        ("alpha3", initial.params.alpha3(), 0.8124),
        ("p", initial.params.p(), 0.2404),
    ] {
        checks.push(2, format!("initial {name}"), v, within(e, 0.01));
    }

    let names = ["alpha1", "alpha2", "alpha3", "p"];
    let grid = if cfg.run_grid {
        let g = grid_search_mle(data, (0.1, 10.0), (0.01, 0.99), 12);
        checks.push(3, "grid loglik", g.loglik, within(-51.0538, 0.01));
        for ((name, v), e) in names.iter().zip(g.params.to_array()).zip([1.2827, 3.7783, 1.0401, 0.3428]) {
            checks.push(3, format!("grid {name}"), v, within(e, 0.05));
        }
        Some(g)
    } else {
        None
    };

    let em = em_fit(data, &cfg.fit, Some(initial.params))?;
    checks.push(4, "em converged", if em.converged { 1.0 } else { 0.0 }, within(1.0, 0.0));
    checks.push(4, "em loglik", em.loglik, within(-51.0549, 0.01));
    for ((name, v), e) in names.iter().zip(em.params.to_array()).zip([1.2836, 3.7705, 1.0358, 0.3410]) {
        checks.push(4, format!("em {name}"), v, within(e, 0.05));
    }

    let observed = data.contingency(4, 4);
    let em_params = em.params;
    let gof_bdge = bivariate_gof(&observed, n, |i, j| joint_pmf(BivariatePoint::new(i, j), &em_params), cfg)?;

    let lrt_equal_a12 = likelihood_ratio_test(data, &cfg.fit, TestKind::EqualAlpha12, Some(&em))?;
    let null_params = lrt_equal_a12.null_fit.params;
    let gof_equal_a12 = bivariate_gof(&observed, n, |i, j| joint_pmf(BivariatePoint::new(i, j), &null_params), cfg)?;

    let bvpois = bvpois_fit(data)?;
    let bp = bvpois.params;
    let gof_bvpois = bivariate_gof(&observed, n, |i, j| bvpois_pmf(BivariatePoint::new(i, j), &bp), cfg)?;

    for (label, gof, table, chi2, p_target) in [
        ("bdge", &gof_bdge, &PUBLISHED_BDGE_TABLE, 15.8524, Target::Above(0.30)),
        ("equal-a12", &gof_equal_a12, &PUBLISHED_EQUAL_A12_TABLE, 18.1072, within(0.20, 0.02)),
        ("bvpois", &gof_bvpois, &PUBLISHED_BVPOIS_TABLE, 21.8381, within(0.08, 0.02)),
    ] {
        checks.push(
            5,
            format!("{label} expected table max cell deviation"),
            max_cell_deviation(&gof.expected, table),
            Target::Below(0.05),
        );
        checks.push(5, format!("{label} chi-square"), gof.chi2, within(chi2, 0.5));
        checks.push(5, format!("{label} chi-square p-value"), gof.p_value, p_target);
        let published: Vec<Vec<f64>> = table.iter().map(|r| r.to_vec()).collect();
        checks.info(
            5,
            format!("{label} chi-square from published expected table"),
            pearson(&observed, &published),
            within(chi2, 0.5),
        );
    }
    // consistency of the published tables with the published estimates
    let table_of = |pmf: &dyn Fn(u32, u32) -> f64| -> Vec<Vec<f64>> {
        (0..4).map(|i| (0..4).map(|j| n as f64 * pmf(i, j)).collect()).collect()
    };
    let pub_bdge = BdgeParams::from_array(PUBLISHED_BDGE_PARAMS)?;
    let pub_null = BdgeParams::from_array(PUBLISHED_EQUAL_A12_PARAMS)?;
    let [l1, l2, l3] = PUBLISHED_BVPOIS_PARAMS;
    let pub_bp = BvPoissonParams::new(l1, l2, l3)?;
    for (label, rebuilt, table) in [
        ("bdge", table_of(&|i, j| joint_pmf(BivariatePoint::new(i, j), &pub_bdge)), &PUBLISHED_BDGE_TABLE),
        ("equal-a12", table_of(&|i, j| joint_pmf(BivariatePoint::new(i, j), &pub_null)), &PUBLISHED_EQUAL_A12_TABLE),
        ("bvpois", table_of(&|i, j| bvpois_pmf(BivariatePoint::new(i, j), &pub_bp)), &PUBLISHED_BVPOIS_TABLE),
    ] {
        checks.info(
            5,
            format!("{label} table rebuilt from published estimates"),
            max_cell_deviation(&rebuilt, table),
            Target::Below(0.05),
        );
    }
    checks.info(
        4,
        "loglik of fixture at published estimates",
        observed_loglik(data, &pub_bdge),
        within(-51.0549, 0.01),
    );
    checks.info(8, "bvpois loglik of fixture at published rates", bvpois_loglik(data, &pub_bp), within(-53.3251, 0.01));

    checks.push(6, "equal-a12 null loglik", lrt_equal_a12.null_fit.loglik, within(-51.9978, 0.01));
    checks.push(6, "equal-a12 statistic", lrt_equal_a12.stat, within(1.888, 0.05));
    checks.push(6, "equal-a12 p-value", lrt_equal_a12.p_value, Target::Between(0.15, 0.18));

    let lrt_geometric = likelihood_ratio_test(data, &cfg.fit, TestKind::Geometric, Some(&em))?;
    let g = lrt_geometric.null_fit.params;
    checks.push(7, "geometric null alpha", g.alpha1(), within(0.5334, 0.01));
    checks.push(7, "geometric null p", g.p(), within(0.2879, 0.01));
    checks.push(7, "geometric null loglik", lrt_geometric.null_fit.loglik, within(-93.3893, 0.01));
    checks.push(7, "geometric p-value", lrt_geometric.p_value, Target::Below(0.001));

    for ((name, v), e) in
        ["lambda1", "lambda2", "lambda3"].iter().zip([bp.lambda1, bp.lambda2, bp.lambda3]).zip([0.8089, 0.9737, 0.5643])
    {
        checks.push(8, format!("bvpois {name}"), v, within(e, 0.01));
    }
    checks.push(8, "bvpois loglik", bvpois.loglik, within(-53.3251, 0.01));

    let half_widths = [0.7519, 1.7518, 0.5471, 0.0547];
    for (k, (name, e)) in names.iter().zip(half_widths).enumerate() {
        let hw = em.ci95.as_ref().map_or(f64::NAN, |ci| ci[k].half_width());
        checks.info(9, format!("ci95 {name} half-width"), hw, Target::WithinRel { expected: e, tol: 0.2 });
    }

    let lrt_equal_all = likelihood_ratio_test(data, &cfg.fit, TestKind::EqualAll, Some(&em))?;
    let lrt_independence = likelihood_ratio_test(data, &cfg.fit, TestKind::Independence, Some(&em))?;

    Ok(CaseStudy {
        n: data.len(),
        observed,
        univariate,
        initial,
        em,
        grid,
        gof_bdge,
        gof_equal_a12,
        gof_bvpois,
        lrt_equal_a12,
        lrt_geometric,
        lrt_equal_all,
        lrt_independence,
        bvpois,
        checks: checks.0,
    })
}

fn pearson(observed: &[Vec<u64>], expected: &[Vec<f64>]) -> f64 {
    observed
        .iter()
        .flatten()
        .zip(expected.iter().flatten())
        .filter(|(_, &e)| e > 0.0)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum()
}
