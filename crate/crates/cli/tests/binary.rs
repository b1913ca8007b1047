use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use num_complex::Complex64;
use ratlin_cli::RunReport;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn ratlin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ratlin")).args(args).current_dir(root()).output().expect("binary runs")
}

fn run_report(config: &str, extra: &[&str]) -> (i32, RunReport) {
    let mut args = vec!["--config", config];
    args.extend_from_slice(extra);
    let out = ratlin(&args);
    let report = RunReport::from_json(std::str::from_utf8(&out.stdout).unwrap()).expect("stdout is a report");
    (out.status.code().unwrap(), report)
}

fn finite_values(r: &RunReport) -> Vec<Complex64> {
    r.eigenpairs.iter().filter(|p| p.classification == "eigenvalue").map(|p| p.value).collect()
}

/// Largest distance under a greedy nearest-neighbour pairing.
fn match_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut left = b.to_vec();
    let mut gap: f64 = 0.0;
    for x in a {
        let (k, d) = left.iter().map(|y| (x - y).norm()).enumerate().min_by(|p, q| p.1.total_cmp(&q.1)).unwrap();
        gap = gap.max(d);
        left.swap_remove(k);
    }
    gap
}

#[test]
fn row_pencil_is_a_linearization_with_pole_and_zero() {
    let (code, r) = run_report("configs/row_pencil.json", &[]);
    assert_eq!(code, 0);
    assert!(r.passed);
    let lin = r.linearization.as_ref().unwrap();
    assert!(lin.is_linearization);
    assert_eq!(lin.field, "Q");
    let s = r.structure.as_ref().unwrap();
    assert_eq!(s.poles.len(), 1);
    assert_eq!(s.poles[0].point, "-2");
    assert_eq!(s.zeros.len(), 1);
    assert_eq!(s.zeros[0].point, "2");
}

#[test]
fn nlep_recovers_the_planted_eigenvalue() {
    let (code, r) = run_report("configs/toy_nlep.json", &[]);
    assert_eq!(code, 0);
    assert!(!r.eigenpairs.is_empty());
    for p in &r.eigenpairs {
        assert!(p.value.norm() <= 1.0);
        assert!(p.residual.unwrap() <= 1e-8);
        assert!(p.residual_nonlinear.unwrap() <= 1e-8);
    }
    assert!(r.eigenpairs.iter().any(|p| (p.value - 0.5).norm() < 1e-10));
    assert!(r.approximation[0].max_rel_error <= 1e-13);
}

#[test]
fn output_is_reproducible() {
    for cfg in ["configs/toy_nlep.json", "configs/toy_rep.json", "configs/row_pencil.json"] {
        let a = ratlin(&["--config", cfg]);
        let b = ratlin(&["--config", cfg]);
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{cfg}");
    }
}

#[test]
fn csv_has_one_row_per_eigenpair() {
    let (_, r) = run_report("configs/toy_rep.json", &[]);
    let out = ratlin(&["--config", "configs/toy_rep.json", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re,im,residual,classification"));
    assert_eq!(lines.count(), r.eigenpairs.len());
}

#[test]
fn trimmed_and_full_pencils_agree() {
    let (_, full) = run_report("configs/toy_nlep.json", &["--pencil", "full"]);
    let (_, trimmed) = run_report("configs/toy_nlep.json", &["--pencil", "trimmed"]);
    let gap = match_gap(&finite_values(&full), &finite_values(&trimmed));
    assert!(gap < 1e-8, "{gap}");
    assert!(trimmed.pencil.unwrap().dim < full.pencil.unwrap().dim);
}

#[test]
fn full_pencil_with_a_rank_one_term_is_not_a_linearization() {
    let (code, r) = run_report("configs/toy_rep.json", &["--pencil", "full"]);
    assert_eq!(code, 1);
    assert!(!r.passed);
    assert!(r.checks.iter().any(|c| c.name == "exact_linearization" && !c.passed));
    assert!(r.eigenpairs.iter().any(|p| p.classification == "pole"));

    let (code, r) = run_report("configs/toy_rep.json", &[]);
    assert_eq!(code, 0);
    assert!(r.minimality.unwrap().certified_minimal);
}

#[test]
fn plot_and_timings_are_opt_in() {
    let dir = std::env::temp_dir().join(format!("ratlin-plot-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let plot = dir.join("plot.csv");
    let out = dir.join("report.json");
    let status = ratlin(&[
        "--config",
        "configs/toy_nlep.json",
        "--plot",
        plot.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.stdout.is_empty());
    let report = RunReport::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report.timings_ms.is_none());
    let rows = std::fs::read_to_string(&plot).unwrap();
    assert_eq!(rows.lines().count(), 101);

    let (_, timed) = run_report("configs/toy_nlep.json", &["--timings"]);
    assert!(timed.timings_ms.unwrap().contains_key("eigensolve"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn input_errors_exit_with_two() {
    let out = ratlin(&["--config", "configs/missing.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let out = ratlin(&["--config", "configs/row_pencil.json", "--mode", "solve_nlep"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}
