use std::path::Path;
use std::process::Command;

use branchsim::config::{preset, ExperimentConfig, RawConfig};
use branchsim::runner::{cmd_bootstrap, cmd_check, cmd_compare, cmd_estimate, cmd_naive};
use branchsim::Error;

fn config(text: &str, out: &Path) -> ExperimentConfig {
    let mut raw = RawConfig::parse(text).unwrap();
    raw.set("out", out.display().to_string());
    ExperimentConfig::from_raw(&raw).unwrap()
}

fn data_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

const EXAMPLE1: &str = "\
model.q.type = uniform
model.q.a = 0
model.q.b = 1
model.n.type = poisson
model.n.mean = 3
model.c.type = uniform
model.c.a = 0
model.c.b = 0.2
";

#[test]
fn bootstrap_outputs_are_byte_identical_across_runs() {
    let text = format!("{EXAMPLE1}k = 6\nm = 500\nseed = 77\nreps = 2\n");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let sa = cmd_bootstrap(&config(&text, a.path())).unwrap();
    let sb = cmd_bootstrap(&config(&text, b.path())).unwrap();
    assert_eq!(sa.counts, sb.counts);
    assert_eq!(sa.counts.vector_draws, 2 * 6 * 500);
    for name in ["pool_rep0.csv", "pool_rep1.csv", "ecdf_rep0.csv", "ecdf_rep1.csv", "summary.txt"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
    assert_ne!(
        std::fs::read(a.path().join("pool_rep0.csv")).unwrap(),
        std::fs::read(a.path().join("pool_rep1.csv")).unwrap()
    );
}

#[test]
fn level_zero_pool_of_constant_q() {
    let dir = tempfile::tempdir().unwrap();
    let text = "model.q.type = constant\nmodel.q.value = 2\nmodel.n.type = constant\nmodel.n.value = 1\n\
                model.c.type = constant\nmodel.c.value = 1\nk = 0\nm = 3\nseed = 1\n";
    let summary = cmd_bootstrap(&config(text, dir.path())).unwrap();
    assert_eq!(data_lines(&dir.path().join("pool.csv")), vec!["2.0000000000000000e0"; 3]);
    assert_eq!(data_lines(&dir.path().join("ecdf.csv")), vec!["x,cdf", "2.0000000000000000e0,1.0000000000000000e0"]);
    assert_eq!(summary.counts.vector_draws, 0);
    assert_eq!(summary.counts.q_draws, 3);
    let head = std::fs::read_to_string(dir.path().join("pool.csv")).unwrap();
    assert!(head.starts_with("# model_hash="));
    assert!(head.contains("seed=1 k=0 m=3"));
}

#[test]
fn naive_without_offspring_returns_q() {
    let dir = tempfile::tempdir().unwrap();
    let text = "model.q.type = uniform\nmodel.q.a = 0\nmodel.q.b = 1\nmodel.n.type = constant\nmodel.n.value = 0\n\
                model.c.type = constant\nmodel.c.value = 1\nk = 5\nreps = 50\nseed = 3\n";
    let summary = cmd_naive(&config(text, dir.path())).unwrap();
    assert_eq!(summary.entry("nodes_visited"), Some("50"));
    let values: Vec<f64> = data_lines(&dir.path().join("samples.csv")).iter().map(|l| l.parse().unwrap()).collect();
    assert_eq!(values.len(), 50);
    assert!(values.iter().all(|&x| (0.0..1.0).contains(&x)));
}

#[test]
fn naive_refuses_runs_over_budget() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{EXAMPLE1}k = 12\nreps = 1000\nseed = 1\nglobal_budget = 1e6\n");
    let err = cmd_naive(&config(&text, dir.path())).unwrap_err();
    assert!(matches!(err, Error::BudgetExceeded { .. }), "{err}");
    assert!(!dir.path().join("samples.csv").exists());

    let text = format!("{EXAMPLE1}k = 4\nreps = 100\nseed = 1\nglobal_budget = 20000\n");
    let summary = cmd_naive(&config(&text, dir.path())).unwrap();
    assert!(summary.warnings.iter().any(|w| w.contains("global budget")));
}

#[test]
fn compare_on_deterministic_model_has_zero_distance() {
    let dir = tempfile::tempdir().unwrap();
    let text = "model.q.type = constant\nmodel.q.value = 1\nmodel.n.type = constant\nmodel.n.value = 2\n\
                model.c.type = constant\nmodel.c.value = 0.25\nk = 4\nseed = 5\ncompare.m = 10, 100\n\
                reference.reps = 20\nbound.alpha = 1.5\nbound.h_alpha = 3\n";
    let summary = cmd_compare(&config(text, dir.path())).unwrap();
    let rows = data_lines(&dir.path().join("distances.csv"));
    assert_eq!(rows[0], "m,d1,bound");
    assert_eq!(rows.len(), 3);
    for row in &rows[1..] {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[1].parse::<f64>().unwrap(), 0.0);
        assert!(fields[2].parse::<f64>().unwrap() > 0.0);
    }
    assert_eq!(summary.entry("d1.m100"), Some("0.0000000000000000e0"));
    assert!(dir.path().join("ecdf_reference.csv").exists());
    assert!(dir.path().join("ecdf_m10.csv").exists());
}

#[test]
fn estimate_reports_oracle_and_guarantee_label() {
    let dir = tempfile::tempdir().unwrap();
    let reference = dir.path().join("ref.csv");
    std::fs::write(&reference, "# oracle draws\n1\n3\n").unwrap();
    let text = format!(
        "{EXAMPLE1}k = 3\nm = 200\nreps = 5\nseed = 2\nh = indicator_gt(0.5)\nreference.file = {}\n",
        reference.display()
    );
    let summary = cmd_estimate(&config(&text, dir.path())).unwrap();
    assert_eq!(summary.entry("h.label"), Some("outside-guarantee"));
    assert_eq!(summary.entry("oracle.value"), Some("1.0000000000000000e0"));
    assert_eq!(data_lines(&dir.path().join("estimates.csv")).len(), 5);
    let p: f64 = summary.entry("estimate.mean").unwrap().parse().unwrap();
    assert!((0.0..=1.0).contains(&p));
}

#[test]
fn check_flags_failing_conditions() {
    let dir = tempfile::tempdir().unwrap();
    let text = "model.q.type = exponential\nmodel.q.rate = 1\nmodel.n.type = zeta\nmodel.n.s = 2.5\n\
                model.c.type = uniform\nmodel.c.a = 0\nmodel.c.b = 0.5\nk = 10\nseed = 1\nbeta = 2\n";
    let summary = cmd_check(&config(text, dir.path())).unwrap();
    assert_eq!(summary.condition_report.case.as_str(), "fail");
    assert!(!summary.warnings.is_empty());
    let text = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(text.contains("condition.case = fail"));
    assert!(text.contains("warning.0 = "));
}

#[test]
fn presets_run_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_branchsim");
    let out = dir.path().join("q");
    let status = Command::new(bin)
        .args(["check", "--preset", "quicksort", "--seed", "9", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("seed = 9"));
    assert!(summary.contains("condition.case = case_ii"));

    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "k = 2\nseed = 1\nmodel.variant = quicksort\nbogus = 1\n").unwrap();
    let run = Command::new(bin).args(["bootstrap", "--config"]).arg(&cfg).output().unwrap();
    assert!(!run.status.success());
    let stderr = String::from_utf8_lossy(&run.stderr);
    assert!(stderr.contains("line 4") && stderr.contains("bogus"), "{stderr}");
}

#[test]
fn config_file_overrides_preset() {
    let dir = tempfile::tempdir().unwrap();
    let mut raw = preset("example1").unwrap();
    raw = raw.overlay(RawConfig::parse("k = 2\nm = 10\n").unwrap());
    raw.set("out", dir.path().display().to_string());
    let cfg = ExperimentConfig::from_raw(&raw).unwrap();
    assert_eq!((cfg.k, cfg.m), (2, 10));
    let summary = cmd_bootstrap(&cfg).unwrap();
    assert_eq!(summary.counts.vector_draws, 20);
}
