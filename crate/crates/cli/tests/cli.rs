use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bdge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bdge")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn fixture() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/firontina_juventus.csv").display().to_string()
}

/// Value of `key = value` in a text report.
fn field(report: &str, key: &str) -> f64 {
    let prefix = format!("{key} = ");
    let line = report.lines().find(|l| l.starts_with(&prefix)).unwrap_or_else(|| panic!("no {key} in\n{report}"));
    line[prefix.len()..].parse().unwrap()
}

#[test]
fn fit_univariate_column() {
    let o = bdge(&["fit", "--data", &fixture(), "--model", "dge1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = stdout(&o);
    assert!((field(&r, "results.estimates.alpha") - 4.6681).abs() < 0.01);
    assert!((field(&r, "results.estimates.p") - 0.2617).abs() < 0.01);
    assert_eq!(field(&r, "results.n"), 26.0);
}

#[test]
fn fit_bdge_reports_trace_and_intervals() {
    let o = bdge(&["fit", "--data", &fixture(), "--e-step", "posterior", "--ci-level", "0.9"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = stdout(&o);
    assert!(r.contains("results.converged = true"));
    assert!(field(&r, "results.trace_length") >= 2.0);
    assert!(field(&r, "results.ci.p.lo") < field(&r, "results.estimates.p"));
    assert_eq!(field(&r, "inputs.ci_level"), 0.9);
}

#[test]
fn non_convergence_exits_nonzero_with_partial_report() {
    let o = bdge(&["fit", "--data", &fixture(), "--e-step", "posterior", "--max-iter", "1", "--tol", "1e-12"]);
    assert_eq!(o.status.code(), Some(1));
    let r = stdout(&o);
    assert!(r.contains("results.converged = false"));
    assert!(r.contains("results.estimates.alpha1"));
}

#[test]
fn fit_bvpois() {
    let o = bdge(&["fit", "--data", &fixture(), "--model", "bvpois"]);
    assert!(o.status.success());
    let r = stdout(&o);
    let (l1, l3) = (field(&r, "results.estimates.lambda1"), field(&r, "results.estimates.lambda3"));
    // the fitted marginal mean equals the sample mean
    assert!((l1 + l3 - 30.0 / 26.0).abs() < 1e-4);
}

#[test]
fn tests_report_statistic_and_p_value() {
    let o = bdge(&["test", "--data", &fixture(), "--test", "geometric"]);
    assert!(o.status.success());
    assert!(field(&stdout(&o), "results.test.p_value") < 0.001);

    let o = bdge(&["test", "--data", &fixture(), "--test", "equal-a12"]);
    let r = stdout(&o);
    assert!(r.contains("results.test.null_distribution = \"chi2(1)\""));
    let p = field(&r, "results.test.p_value");
    assert!(p > 0.0 && p < 1.0);
}

#[test]
fn independence_on_axis_data_has_unit_p_value() {
    let path = scratch("axes.csv");
    std::fs::write(&path, "0,0\n0,1\n1,0\n0,2\n2,0\n0,1\n1,0\n0,0\n").unwrap();
    let o = bdge(&["test", "--data", path.to_str().unwrap(), "--test", "independence", "--e-step", "posterior"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = stdout(&o);
    if field(&r, "results.test.statistic") == 0.0 {
        assert_eq!(field(&r, "results.test.p_value"), 1.0);
    }
}

#[test]
fn json_matches_text() {
    let text = stdout(&bdge(&["fit", "--data", &fixture(), "--model", "dge2"]));
    let json = stdout(&bdge(&["--json", "fit", "--data", &fixture(), "--model", "dge2"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let alpha = v["results"]["estimates"]["alpha"].as_f64().unwrap();
    assert!((alpha - field(&text, "results.estimates.alpha")).abs() < 1e-6 * alpha);
    assert_eq!(v["command"], "fit");
}

#[test]
fn sample_zero_rows_is_a_usage_error() {
    let out = scratch("zero.csv");
    let o = bdge(&["sample", "--model", "bdge", "--params", "1,1,1,0.5", "--n", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--n"));
}

#[test]
fn sample_rejects_bad_params() {
    let out = scratch("bad.csv");
    let o = bdge(&["sample", "--model", "bdge", "--params", "1,1,0.5", "--n", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = bdge(&["sample", "--model", "dge", "--params", "-1,0.5", "--n", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn same_seed_same_file() {
    let (a, b, c) = (scratch("a.csv"), scratch("b.csv"), scratch("c.csv"));
    for (path, seed) in [(&a, "11"), (&b, "11"), (&c, "12")] {
        let o = bdge(&[
            "sample",
            "--model",
            "bdge",
            "--params",
            "1,2,0.5,0.4",
            "--n",
            "500",
            "--seed",
            seed,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    let read = |p: &PathBuf| std::fs::read(p).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn sample_round_trips_through_fit() {
    let path = scratch("round.csv");
    let o = bdge(&[
        "sample",
        "--model",
        "bdge",
        "--params",
        "1,1.5,0.8,0.5",
        "--n",
        "300",
        "--seed",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let written = std::fs::read_to_string(&path).unwrap();
    let mut rows: Vec<(u32, u32)> = written
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    let data = bdge::io::load_dataset(&path).unwrap();
    let mut loaded: Vec<(u32, u32)> = data.pairs().iter().map(|p| (p.x1, p.x2)).collect();
    rows.sort_unstable();
    loaded.sort_unstable();
    assert_eq!(rows, loaded);
    assert_eq!(loaded.len(), 300);
    let o = bdge(&["fit", "--data", path.to_str().unwrap(), "--model", "dge1"]);
    assert_eq!(field(&stdout(&o), "results.n"), 300.0);
}

#[test]
fn sampled_correlation_matches_model() {
    let path = scratch("corr.csv");
    let o = bdge(&[
        "sample",
        "--model",
        "bdge",
        "--params",
        "1,1,1,0.5",
        "--n",
        "100000",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let r = stdout(&o);
    let (emp, model, se) =
        (field(&r, "results.correlation"), field(&r, "results.model_correlation"), field(&r, "results.correlation_se"));
    assert!((emp - model).abs() <= 3.0 * se, "{emp} vs {model} (se {se})");
}

#[test]
fn negative_entry_names_the_line() {
    let path = scratch("neg.csv");
    std::fs::write(&path, "x1,x2\n0,1\n1,-2\n").unwrap();
    let o = bdge(&["fit", "--data", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn header_only_is_a_usage_error() {
    let path = scratch("header.csv");
    std::fs::write(&path, "x1,x2\n").unwrap();
    let o = bdge(&["fit", "--data", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty"));
}

#[test]
fn missing_data_file_is_explicit() {
    let o = bdge(&["reproduce", "--section", "5", "--data", "/definitely/not/here.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/definitely/not/here.csv"));
}

#[test]
fn only_section_five_is_known() {
    assert_eq!(bdge(&["reproduce", "--section", "4"]).status.code(), Some(2));
}

#[test]
fn reproduce_is_deterministic_and_reports_every_check() {
    let strip = |o: &Output| stdout(o).lines().filter(|l| !l.contains(".timing.")).collect::<Vec<_>>().join("\n");
    let a = bdge(&["reproduce"]);
    let b = bdge(&["reproduce", "--section", "5"]);
    assert_eq!(strip(&a), strip(&b));
    let r = stdout(&a);
    for c in 1..=9 {
        assert!(r.contains(&format!("criterion {c}:")), "criterion {c} missing");
    }
    let failed = field(&r, "results.failed_checks");
    // exit status follows the checks
    assert_eq!(a.status.success(), failed == 0.0);
    assert!(field(&r, "results.timing.elapsed_seconds") < 60.0);
}
