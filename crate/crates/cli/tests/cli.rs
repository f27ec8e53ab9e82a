use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gsr_cli::output::to_json;
use gsr_cli::Report;

fn gsr() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gsr"));
    c.env("GSR_FIXED_CLOCK", "1");
    c
}

fn run_spec(dir: &Path, spec: &str, extra: &[&str]) -> Output {
    let path = dir.join("spec.json");
    std::fs::write(&path, spec).unwrap();
    gsr()
        .args(["run", "--spec"])
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn standard_spec() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../experiments/standard.json")
}

const CERT_AND_SWEEP: &str = r#"{
  "seed": 11,
  "scenarios": [
    {"kind": "theorem41",
     "background": {"type": "periodic", "period": 2, "a": [1, 1], "b": [0, -1]},
     "perturbation": {"db": [{"site": 0, "value": 2.0}, {"site": 2, "value": 1.5}]},
     "k": 5},
    {"kind": "szego-sweep",
     "background": {"type": "periodic", "period": 2, "a": [1, 1], "b": [0, -1]},
     "trials": 20},
    {"kind": "lt-sandwich",
     "v0": {"form": "zero"},
     "v": {"form": "gaussian-well", "depth": 2.0, "center": 0.0, "width": 0.5}}
  ]
}"#;

#[test]
fn free_gsr_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_spec(
        dir.path(),
        r#"{"scenarios":[{"kind":"gsr-check","background":{"type":"free"}}]}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("out/report.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["spec", "results", "verdicts", "meta"] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
    assert_eq!(value["meta"]["elapsed_ms"], 0);
    assert!(value["results"][0]["max_relative_residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn certificate_report_echoes_constants() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_spec(dir.path(), CERT_AND_SWEEP, &["--plots"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("out/report.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let constants = &value["results"][0]["certificate"]["constants"];
    for key in ["beta_plus", "beta_minus", "gamma_minus", "eta", "beta"] {
        assert!(constants[key].as_f64().unwrap() > 0.0);
    }
    assert_eq!(value["results"][0]["certificate"]["rows"].as_array().unwrap().len(), 5);

    let margins = std::fs::read_to_string(dir.path().join("out/margins_0.dat")).unwrap();
    assert_eq!(margins.lines().count(), 5);
    let sandwich = std::fs::read_to_string(dir.path().join("out/sandwich_2.dat")).unwrap();
    assert_eq!(sandwich.lines().count(), 2);
    assert_eq!(sandwich.lines().next().unwrap().split(' ').count(), 4);
    let cemp = std::fs::read_to_string(dir.path().join("out/cemp_1.dat")).unwrap();
    assert_eq!(cemp.lines().count(), 20);
    assert!(dir.path().join("out/bands_1.dat").exists());
}

#[test]
fn json_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_spec(dir.path(), CERT_AND_SWEEP, &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("out/report.json")).unwrap();
    let report: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(to_json(&report).unwrap(), text);
}

#[test]
fn csv_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_spec(dir.path(), CERT_AND_SWEEP, &["--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let cert = std::fs::read_to_string(dir.path().join("out/certificate_0.csv")).unwrap();
    let lines: Vec<&str> = cert.lines().collect();
    assert_eq!(lines[0], "j,lhs,rhs,margin");
    assert_eq!(lines.len(), 6);

    let sweep = std::fs::read_to_string(dir.path().join("out/szego_1.csv")).unwrap();
    let lines: Vec<&str> = sweep.lines().collect();
    assert_eq!(lines[0], "trial,lhs,norm,c_emp");
    assert_eq!(lines.len(), 21);
    let trials: Vec<usize> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(trials, (0..20).collect::<Vec<_>>());

    let moments = std::fs::read_to_string(dir.path().join("out/moments.csv")).unwrap();
    assert_eq!(moments.lines().count(), 1 + 2 * 2);
    assert!(!dir.path().join("out/report.json").exists());
}

#[test]
fn invalid_gamma_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_spec(
        dir.path(),
        r#"{"scenarios":[{"kind":"lt-sandwich","v0":{"form":"zero"},
            "v":{"form":"square-well","depth":1,"center":0,"width":1},"gamma":-1}]}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("scenarios[0].gamma"), "{err}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn malformed_and_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_spec(dir.path(), "{ not json", &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_spec(
        dir.path(),
        r#"{"scenarios":[{"kind":"commutator","size":4}]}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("size"));
}

#[test]
fn failed_verdict_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_spec(
        dir.path(),
        r#"{"scenarios":[{"kind":"gsr-check",
            "background":{"type":"periodic","period":2,"a":[1,1],"b":[0,-1]},
            "trials":5,"tolerance":1e-300}]}"#,
        &[],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[FAIL]"));
}

#[test]
fn seed_flag_overrides_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_spec(dir.path(), CERT_AND_SWEEP, &["--seed", "99"]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("out/report.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["meta"]["seed"], 99);
    assert_eq!(value["spec"]["seed"], 99);
}

#[test]
fn standard_experiment_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = gsr()
        .args(["run", "--spec"])
        .arg(standard_spec())
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn bands_command() {
    let out = gsr()
        .args(["bands", "--period", "2", "--a", "1,1", "--b", "0,-1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let edges: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .flat_map(|l| l.split_whitespace().map(|x| x.parse::<f64>().unwrap()))
        .collect();
    let r = 17f64.sqrt();
    let expected = [(-1.0 - r) / 2.0, -1.0, 0.0, (r - 1.0) / 2.0];
    for (a, b) in edges.iter().zip(&expected) {
        assert!((a - b).abs() < 1e-10);
    }
    let bad = gsr().args(["bands", "--period", "2", "--a", "1", "--b", "0,1"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn verify_command() {
    let out = gsr().args(["verify", "--suite", "gsr", "--trials", "10"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("[PASS] gsr: 10 trials"));
}
