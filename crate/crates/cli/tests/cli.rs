use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SMALL: &str = r#"{
  "domain": {"half_length": 6.283185307179586, "grid_size": 32},
  "solver": {"dt": 0.05, "t_end": 1.0, "snapshot_every": 1},
  "sweep": {"alphas": [0.01, 0.001, 0.0001, 0.0], "t_end": 1.0, "t_max_check": 0.5},
  "attractor": {"alphas": [0.0], "t_transient": 1.0, "t_sample": 2.0},
  "properties": {"count": 10}
}"#;

fn nlks(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlks"))
        .args(args)
        .env("NLKS_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        cmd,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    nlks(&args)
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn simulate_writes_norms_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", SMALL);
    let out = dir.path().join("norms.csv");
    let res = run("simulate", &cfg, &out, &[]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,l2,h1,h2,linf,mean"));
    assert_eq!(lines.count(), 21);
    let series = nlks::io::load_norms(&out).unwrap();
    assert_eq!(*series.times.last().unwrap(), 1.0);
}

#[test]
fn zero_horizon_gives_single_row() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "c.json",
        r#"{"domain": {"grid_size": 32}, "solver": {"t_end": 0.0}}"#,
    );
    let out = dir.path().join("norms.csv");
    assert_eq!(code(&run("simulate", &cfg, &out, &[])), 0);
    let series = nlks::io::load_norms(&out).unwrap();
    assert_eq!(series.len(), 1);
    assert_eq!(series.times[0], 0.0);
    assert!(series.l2[0] > 0.0);
}

#[test]
fn local_simulation_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", SMALL);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(code(&run("simulate", &cfg, &a, &["--alpha", "0", "--seed", "3"])), 0);
    assert_eq!(code(&run("simulate", &cfg, &b, &["--alpha", "0", "--seed", "3"])), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn seed_override_changes_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", SMALL);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(code(&run("simulate", &cfg, &a, &["--seed", "1"])), 0);
    assert_eq!(code(&run("simulate", &cfg, &b, &["--seed", "2"])), 0);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn snapshots_are_written_when_requested() {
    let dir = TempDir::new().unwrap();
    let snaps = dir.path().join("snaps");
    let body = format!(
        r#"{{"domain": {{"grid_size": 16}}, "solver": {{"t_end": 0.1, "snapshot_every": 1}},
            "output": {{"snapshot_dir": {:?}}}}}"#,
        snaps.to_str().unwrap()
    );
    let cfg = write_config(&dir, "c.json", &body);
    let out = dir.path().join("norms.csv");
    assert_eq!(code(&run("simulate", &cfg, &out, &[])), 0);
    let snap = nlks::io::load_snapshot(snaps.join("snapshot_000002.csv")).unwrap();
    assert_eq!(snap.field.values().len(), 16);
    let text = std::fs::read_to_string(snaps.join("snapshot_000000.csv")).unwrap();
    assert!(text.starts_with('#'));
    assert_eq!(text.lines().nth(1), Some("x,u"));
}

#[test]
fn sweep_report_is_deterministic_and_excludes_zero() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", SMALL);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    assert_eq!(code(&run("sweep", &cfg, &a, &[])), 0);
    assert_eq!(code(&run("sweep", &cfg, &b, &[])), 0);
    let body = std::fs::read(&a).unwrap();
    assert_eq!(body, std::fs::read(&b).unwrap());

    let report: nlks::ConvergenceReport = serde_json::from_slice(&body).unwrap();
    assert_eq!(report.alphas, vec![0.01, 0.001, 0.0001, 0.0]);
    assert_eq!(report.sup_w[3], 0.0);
    let fit = report.fit.expect("three positive alphas remain");
    assert_eq!(fit.used, 3);
    assert_eq!(fit.excluded, vec![3]);
}

#[test]
fn attractor_against_itself_has_zero_distance() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", SMALL);
    let out = dir.path().join("a.json");
    assert_eq!(code(&run("attractor", &cfg, &out, &[])), 0);
    let report: nlks::analysis::AttractorReport =
        serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(report.distances(), vec![0.0]);
}

#[test]
fn properties_pass_on_minimal_grid() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "c.json",
        r#"{"domain": {"grid_size": 8}, "properties": {"count": 50}}"#,
    );
    let out = dir.path().join("p.json");
    let res = run("properties", &cfg, &out, &[]);
    assert_eq!(code(&res), 0);
    let stdout = String::from_utf8(res.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 8);
    assert!(stdout.contains("hilbert_isometry"));
    let report: nlks::analysis::PropertyReport =
        serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert!(report.passed());
}

#[test]
fn zero_property_count_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", r#"{"properties": {"count": 0}}"#);
    let out = dir.path().join("p.json");
    assert_eq!(code(&run("properties", &cfg, &out, &[])), 1);
    assert!(!out.exists());
}

#[test]
fn bad_configs_are_usage_errors() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o.csv");
    for (name, body) in [
        ("syntax.json", "{ not json"),
        ("unknown.json", r#"{"solver": {"alpah": 0.1}}"#),
        ("odd.json", r#"{"domain": {"grid_size": 33}}"#),
        ("dt.json", r#"{"solver": {"dt": -1.0}}"#),
    ] {
        let cfg = write_config(&dir, name, body);
        let res = run("simulate", &cfg, &out, &[]);
        assert_eq!(code(&res), 1, "{name}");
        assert!(!res.stderr.is_empty());
    }
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&run("simulate", &missing, &out, &[])), 1);
}

#[test]
fn malformed_arguments_are_usage_errors() {
    assert_eq!(code(&nlks(&["simulate"])), 1);
    assert_eq!(code(&nlks(&["frobnicate", "--out", "x"])), 1);
    assert_eq!(code(&nlks(&["simulate", "--out", "x", "--seed", "minus"])), 1);
    assert_eq!(code(&nlks(&["--help"])), 0);
}

#[test]
fn blow_up_is_numerical_failure() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "c.json",
        r#"{"domain": {"grid_size": 32}, "initial": {"amplitude": 100000.0},
            "solver": {"dt": 1.0, "t_end": 50.0, "dealias": false}}"#,
    );
    let out = dir.path().join("n.csv");
    let res = run("simulate", &cfg, &out, &[]);
    assert_eq!(code(&res), 2, "{}", String::from_utf8_lossy(&res.stderr));
}
