use std::path::Path;
use std::process::{Command, Output};

use monopole_moduli::cli::{metric_sample, RunConfig};
use serde_json::Value;

fn monopoles(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monopoles")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.json");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

// One grid point sits on the center, the other is well away from it.
const GRID_THROUGH_CENTER: &str = r#"{
    "monopole": {"centers": [[0.2, -0.1, 1.3]], "charges": [1], "mass": 0.5},
    "metric": {
        "x": {"min": 0.2, "max": 0.7, "count": 2},
        "y": {"min": -0.1, "max": -0.1, "count": 1},
        "z": {"min": 1.3, "max": 1.3, "count": 1},
        "theta": {"min": 0.0, "max": 0.0, "count": 1}
    }
}"#;

#[test]
fn metric_rows_are_grid_size_minus_skipped() {
    let cfg = RunConfig::from_json(GRID_THROUGH_CENTER).unwrap();
    let sample = metric_sample(&cfg).unwrap();
    assert_eq!(sample.rows.len(), 1);
    assert_eq!(sample.skipped.len(), 1);
    assert_eq!(sample.rows[0].x, 0.7);

    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), GRID_THROUGH_CENTER);
    let csv_path = dir.path().join("grid.csv");
    let out = monopoles(&["--config", &config, "--csv", csv_path.to_str().unwrap(), "metric"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "x");
    assert!(headers.iter().any(|h| h == "weyl_asd"));
    assert_eq!(reader.records().count(), 1);
}

#[test]
fn verify_only_restricts_the_report() {
    let out = monopoles(&["verify", "--only", "hyperbolic"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let records = report["records"].as_array().unwrap();
    assert!(!records.is_empty());
    assert!(records.iter().all(|r| r["module"] == "hyperbolic" && r["pass"] == true));
    assert_eq!(report["failed"], 0);
}

#[test]
fn broken_connection_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let out = monopoles(&[
        "--json",
        json.to_str().unwrap(),
        "verify",
        "--only",
        "metric",
        "--broken-connection",
        "0.5",
        "--samples",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let failed: Vec<&str> = report["records"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["pass"] == false)
        .map(|r| r["id"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"metric.connection_curvature"), "{failed:?}");
}

#[test]
fn usage_and_config_errors_exit_two() {
    assert_eq!(monopoles(&["spectral", "--q", "1,2"]).status.code(), Some(2));
    assert_eq!(monopoles(&["scatter", "--delta", "-1"]).status.code(), Some(2));
    assert_eq!(monopoles(&["no-such-command"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"seed": 1, "unknown": true}"#);
    assert_eq!(monopoles(&["--config", &config, "symplectic"]).status.code(), Some(2));
}

#[test]
fn spectral_and_symplectic_emit_json() {
    let out = monopoles(&["spectral", "--q", "0.3,0.4,0.9", "--phase", "0.7"]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["divisor_disjoint"], true);
    assert_eq!(report["divisor_matches"], true);
    assert!((report["phase"]["modulus"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let out = monopoles(&["--seed", "3", "symplectic", "--instances", "10"]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["records"].as_array().unwrap().len(), 10);
    assert_eq!(report["pass"], true);
}
