use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use bdge::bdge::{correlation, sample as sample_bdge};
use bdge::dge::{self, moments};
use bdge::fit::{em_fit, wald_ci, wald_ci_for, Interval};
use bdge::hypothesis::{
    bvpois_fit, bvpois_loglik, likelihood_ratio_test, BvPoissonParams, LrtResult, NullDistribution, TestKind,
};
use bdge::io::{football_fixture, load_dataset};
use bdge::reproduce::{run_case_study, ReproduceConfig};
use bdge::{BdgeParams, BivariateDataset, DgeParams, EStepKind, FitConfig, TailTolerance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::report::{num, object, sig8, RunReport};

/// Outcome of a command that ran to completion. `ok` is false when the
/// report is partial (non-convergence) or a reproduction check failed.
pub struct Outcome {
    pub report: RunReport,
    pub ok: bool,
}

#[derive(Debug, Clone, Copy)]
pub enum Model {
    Bdge,
    Dge1,
    Dge2,
    DgeMax,
    BvPois,
}

#[derive(Debug, Clone, Copy)]
pub struct FitSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub e_step: EStepKind,
}

impl FitSettings {
    fn config(&self) -> FitConfig {
        FitConfig { loglik_tol: self.tol, max_iter: self.max_iter, ..FitConfig::default() }.with_e_step(self.e_step)
    }

    fn echo(&self, report: &mut RunReport) {
        report.input("tol", num(self.tol));
        report.input("max_iter", self.max_iter as u64);
        report.input("seed", self.seed);
        report.input("e_step", format!("{:?}", self.e_step));
    }
}

fn load(path: &Path) -> Result<BivariateDataset> {
    match load_dataset(path) {
        Ok(d) => Ok(d),
        Err(e @ bdge::Error::Io(_)) => Err(e.into()),
        Err(e) => Err(anyhow::Error::new(e).context(format!("reading {}", path.display()))),
    }
}

fn bdge_params(q: &BdgeParams) -> Value {
    object([("alpha1", num(q.alpha1())), ("alpha2", num(q.alpha2())), ("alpha3", num(q.alpha3())), ("p", num(q.p()))])
}

fn intervals(names: &[&str], cis: &[Interval], level: f64) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("level".into(), num(level));
    for (name, ci) in names.iter().zip(cis) {
        m.insert(name.to_string(), object([("lo", num(ci.lo)), ("hi", num(ci.hi))]));
    }
    Value::Object(m)
}

/// Finite-difference steps that keep every evaluation inside the domain.
fn steps(theta: &[f64], upper: &[f64]) -> Vec<f64> {
    theta.iter().zip(upper).map(|(&t, &u)| (1e-4 * t.abs().max(1e-2)).min(0.5 * t).min(0.5 * (u - t))).collect()
}

pub fn fit(data_path: &Path, model: Model, settings: FitSettings, ci_level: f64) -> Result<Outcome> {
    ensure!(ci_level > 0.0 && ci_level < 1.0, "--ci-level must lie in (0, 1), got {ci_level}");
    let data = load(data_path)?;
    let mut report = RunReport::new("fit");
    report.input("data", data_path.display().to_string());
    report.input("model", format!("{model:?}").to_lowercase());
    report.input("ci_level", num(ci_level));
    settings.echo(&mut report);
    report.result("n", data.len() as u64);

    let ok = match model {
        Model::Bdge => {
            let f = em_fit(&data, &settings.config(), None)?;
            report.result("estimates", bdge_params(&f.params));
            report.result("loglik", num(f.loglik));
            report.result("iterations", f.iterations as u64);
            report.result("trace_length", f.loglik_trace.len() as u64);
            report.result("converged", f.converged);
            report.result("stop_reason", format!("{:?}", f.stop_reason));
            report.result("boundary", f.boundary);
            report.result("correlation", num(correlation(&f.params, &TailTolerance::default())));
            match wald_ci(&f, ci_level) {
                Ok(ci) => report.result("ci", intervals(&["alpha1", "alpha2", "alpha3", "p"], &ci, ci_level)),
                Err(e) => report.warn(format!("no Wald intervals: {e}")),
            }
            if !f.converged {
                report.warn(format!("EM stopped without converging ({:?})", f.stop_reason));
            }
            f.converged
        }
        Model::Dge1 | Model::Dge2 | Model::DgeMax => {
            let column = match model {
                Model::Dge1 => data.column1(),
                Model::Dge2 => data.column2(),
                _ => data.max_column(),
            };
            let f = dge::fit(&column)?;
            let q = f.params;
            let (mean, var) = moments(&q, &TailTolerance::default());
            report.result("estimates", object([("alpha", num(q.alpha())), ("p", num(q.p()))]));
            report.result("loglik", num(f.loglik));
            report.result("converged", f.converged);
            report.result("mean", num(mean));
            report.result("variance", num(var));
            let ll = |v: &[f64]| match DgeParams::new(v[0], v[1]) {
                Ok(q) => dge::loglik(&column, &q).unwrap_or(f64::NEG_INFINITY),
                Err(_) => f64::NEG_INFINITY,
            };
            let theta = [q.alpha(), q.p()];
            match wald_ci_for(ll, &theta, &steps(&theta, &[f64::INFINITY, 1.0]), ci_level) {
                Ok(ci) => report.result("ci", intervals(&["alpha", "p"], &ci, ci_level)),
                Err(e) => report.warn(format!("no Wald intervals: {e}")),
            }
            if !f.converged {
                report.warn("optimum on the search box or degenerate data");
            }
            f.converged
        }
        Model::BvPois => {
            let f = bvpois_fit(&data)?;
            let BvPoissonParams { lambda1, lambda2, lambda3 } = f.params;
            report.result(
                "estimates",
                object([("lambda1", num(lambda1)), ("lambda2", num(lambda2)), ("lambda3", num(lambda3))]),
            );
            report.result("loglik", num(f.loglik));
            report.result("boundary", f.boundary);
            let ll = |v: &[f64]| match BvPoissonParams::new(v[0], v[1], v[2]) {
                Ok(q) => bvpois_loglik(&data, &q),
                Err(_) => f64::NEG_INFINITY,
            };
            let theta = [lambda1, lambda2, lambda3];
            match wald_ci_for(ll, &theta, &steps(&theta, &[f64::INFINITY; 3]), ci_level) {
                Ok(ci) => report.result("ci", intervals(&["lambda1", "lambda2", "lambda3"], &ci, ci_level)),
                Err(e) => report.warn(format!("no Wald intervals: {e}")),
            }
            true
        }
    };
    Ok(Outcome { report, ok })
}

fn null_label(kind: NullDistribution) -> String {
    match kind {
        NullDistribution::ChiSquared { df } => format!("chi2({df})"),
        NullDistribution::HalfHalfMixtureChi2_1 => "0.5*delta0 + 0.5*chi2(1)".into(),
    }
}

fn lrt_value(r: &LrtResult) -> Value {
    object([
        ("statistic", num(r.stat)),
        ("raw_statistic", num(r.raw_stat)),
        ("null_distribution", null_label(r.null_kind).into()),
        ("p_value", num(r.p_value)),
        (
            "null_fit",
            object([
                ("estimates", bdge_params(&r.null_fit.params)),
                ("loglik", num(r.null_fit.loglik)),
                ("converged", r.null_fit.converged.into()),
                ("boundary", r.null_fit.boundary.into()),
            ]),
        ),
        ("alternative", object([("estimates", bdge_params(&r.alt_params)), ("loglik", num(r.alt_loglik))])),
    ])
}

pub fn test(data_path: &Path, test: TestKind, settings: FitSettings) -> Result<Outcome> {
    let data = load(data_path)?;
    let mut report = RunReport::new("test");
    report.input("data", data_path.display().to_string());
    report.input("test", format!("{test:?}"));
    settings.echo(&mut report);
    let r = likelihood_ratio_test(&data, &settings.config(), test, None)?;
    report.result("n", data.len() as u64);
    report.result("test", lrt_value(&r));
    for w in &r.warnings {
        report.warn(w.clone());
    }
    let ok = r.null_fit.converged;
    if !ok {
        report.warn("null fit did not converge");
    }
    Ok(Outcome { report, ok })
}

fn table(rows: &[Vec<f64>]) -> Value {
    Value::Array(rows.iter().map(|r| Value::Array(r.iter().map(|&v| num(v)).collect())).collect())
}

pub fn reproduce(section: u32, data_path: Option<&PathBuf>, settings: FitSettings, gof_df: u32) -> Result<Outcome> {
    let start = Instant::now();
    let data = match data_path {
        Some(p) => load(p)?,
        None => football_fixture(),
    };
    let mut report = RunReport::new("reproduce");
    report.input("section", section);
    report.input("data", data_path.map_or("bundled fixture".into(), |p| p.display().to_string()));
    report.input("gof_df", gof_df);
    settings.echo(&mut report);

    let cfg = ReproduceConfig { fit: settings.config(), gof_df, ..ReproduceConfig::default() };
    let s = run_case_study(&data, &cfg)?;
    report.result("n", s.n as u64);
    report.result("observed", Value::Array(s.observed.iter().map(|r| r.clone().into()).collect()));
    let mut uni = serde_json::Map::new();
    for row in &s.univariate {
        uni.insert(
            row.label.to_string(),
            object([
                ("alpha", num(row.params.alpha())),
                ("p", num(row.params.p())),
                ("loglik", num(row.loglik)),
                ("chi2", num(row.gof.chi2)),
                ("df", row.gof.df.into()),
                ("p_value", num(row.gof.p_value)),
            ]),
        );
    }
    report.result("univariate", Value::Object(uni));
    report.result(
        "initial",
        object([("estimates", bdge_params(&s.initial.params)), ("adjusted", s.initial.adjusted.into())]),
    );
    if let Some(g) = &s.grid {
        report.result("grid", object([("estimates", bdge_params(&g.params)), ("loglik", num(g.loglik))]));
    }
    let mut em = vec![
        ("estimates", bdge_params(&s.em.params)),
        ("loglik", num(s.em.loglik)),
        ("iterations", (s.em.iterations as u64).into()),
        ("converged", s.em.converged.into()),
    ];
    if let Some(ci) = &s.em.ci95 {
        em.push(("ci", intervals(&["alpha1", "alpha2", "alpha3", "p"], ci, 0.95)));
    }
    report.result("em", object(em));
    report.result(
        "bvpois",
        object([
            ("lambda1", num(s.bvpois.params.lambda1)),
            ("lambda2", num(s.bvpois.params.lambda2)),
            ("lambda3", num(s.bvpois.params.lambda3)),
            ("loglik", num(s.bvpois.loglik)),
        ]),
    );
    let gof = |g: &bdge::hypothesis::GofResult| {
        object([
            ("expected", table(&g.expected)),
            ("chi2", num(g.chi2)),
            ("df", g.df.into()),
            ("p_value", num(g.p_value)),
        ])
    };
    report.result(
        "expected",
        object([("bdge", gof(&s.gof_bdge)), ("equal_a12", gof(&s.gof_equal_a12)), ("bvpois", gof(&s.gof_bvpois))]),
    );
    report.result(
        "tests",
        object([
            ("equal_a12", lrt_value(&s.lrt_equal_a12)),
            ("geometric", lrt_value(&s.lrt_geometric)),
            ("equal_all", lrt_value(&s.lrt_equal_all)),
            ("independence", lrt_value(&s.lrt_independence)),
        ]),
    );
    let lines: Vec<Value> = s
        .checks
        .iter()
        .map(|c| {
            let status = match (c.pass, c.informational) {
                (true, _) => "PASS",
                (false, true) => "INFO",
                (false, false) => "FAIL",
            };
            format!("{status} criterion {}: {} = {} (want {})", c.criterion, c.name, sig8(c.observed), c.target).into()
        })
        .collect();
    report.result("checks", Value::Array(lines));
    let failed = s.checks.iter().filter(|c| !c.pass && !c.informational).count();
    report.result("failed_checks", failed as u64);
    for w in s
        .lrt_equal_a12
        .warnings
        .iter()
        .chain(&s.lrt_geometric.warnings)
        .chain(&s.lrt_equal_all.warnings)
        .chain(&s.lrt_independence.warnings)
    {
        report.warn(w.clone());
    }
    report.result("timing", object([("elapsed_seconds", num(start.elapsed().as_secs_f64()))]));
    Ok(Outcome { report, ok: s.all_pass() })
}

#[derive(Debug, Clone, Copy)]
pub enum SampleModel {
    Bdge,
    Dge,
}

pub fn sample(model: SampleModel, params: &[f64], n: usize, seed: u64, out: &Path) -> Result<Outcome> {
    ensure!(n > 0, "--n must be positive");
    let mut report = RunReport::new("sample");
    report.input("model", format!("{model:?}").to_lowercase());
    report.input("params", Value::Array(params.iter().map(|&v| num(v)).collect()));
    report.input("n", n as u64);
    report.input("seed", seed);
    report.input("out", out.display().to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let file = File::create(out).with_context(|| format!("cannot create {}", out.display()))?;
    let mut w = BufWriter::new(file);
    match model {
        SampleModel::Bdge => {
            let [a1, a2, a3, p] = params else { bail!("bdge needs --params alpha1,alpha2,alpha3,p") };
            let q = BdgeParams::new(*a1, *a2, *a3, *p)?;
            writeln!(w, "x1,x2")?;
            let (mut s1, mut s2, mut s11, mut s22, mut s12) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for _ in 0..n {
                let pt = sample_bdge(&q, &mut rng);
                writeln!(w, "{},{}", pt.x1, pt.x2)?;
                let (x, y) = (pt.x1 as f64, pt.x2 as f64);
                s1 += x;
                s2 += y;
                s11 += x * x;
                s22 += y * y;
                s12 += x * y;
            }
            let nf = n as f64;
            let (m1, m2) = (s1 / nf, s2 / nf);
            let (v1, v2, c) = (s11 / nf - m1 * m1, s22 / nf - m2 * m2, s12 / nf - m1 * m2);
            let rho = correlation(&q, &TailTolerance::default());
            report.result("mean1", num(m1));
            report.result("mean2", num(m2));
            report.result("correlation", num(c / (v1 * v2).sqrt()));
            report.result("model_correlation", num(rho));
            report.result("correlation_se", num((1.0 - rho * rho) / nf.sqrt()));
            let (e1, _) = moments(&q.marginal1(), &TailTolerance::default());
            let (e2, _) = moments(&q.marginal2(), &TailTolerance::default());
            report.result("model_mean1", num(e1));
            report.result("model_mean2", num(e2));
        }
        SampleModel::Dge => {
            let [a, p] = params else { bail!("dge needs --params alpha,p") };
            let q = DgeParams::new(*a, *p)?;
            writeln!(w, "x")?;
            let (mut s, mut ss) = (0.0, 0.0);
            for _ in 0..n {
                let x = dge::sample(&q, &mut rng);
                writeln!(w, "{x}")?;
                s += x as f64;
                ss += (x as f64).powi(2);
            }
            let nf = n as f64;
            let (mean, var) = moments(&q, &TailTolerance::default());
            report.result("mean", num(s / nf));
            report.result("variance", num(ss / nf - (s / nf).powi(2)));
            report.result("model_mean", num(mean));
            report.result("model_variance", num(var));
        }
    }
    w.flush()?;
    report.result("rows_written", n as u64);
    Ok(Outcome { report, ok: true })
}
