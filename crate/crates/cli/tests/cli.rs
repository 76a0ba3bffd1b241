use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kahlerglue"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn error_record(out: &Output) -> Value {
    let stderr = String::from_utf8(out.stderr.clone()).unwrap();
    let lines: Vec<&str> = stderr.lines().collect();
    assert_eq!(lines.len(), 1, "{stderr}");
    serde_json::from_str(lines[0]).expect("stderr is one JSON record")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn list_names_every_scenario() {
    let out = cli(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in ["S1", "S2", "S3", "S4"] {
        assert!(text.lines().any(|l| l.starts_with(id)), "{text}");
    }
}

#[test]
fn run_writes_report_and_verify_accepts_it() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("s1.json");
    let fields = dir.path().join("fields");
    let out = cli(&["run", "--scenario", "S1", "--out", path_str(&report), "--dump-fields", path_str(&fields)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let value: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(value["scenario"], "S1");
    for key in ["params", "checks", "env"] {
        assert!(value.get(key).is_some(), "{key}");
    }
    for c in value["checks"].as_array().unwrap() {
        for key in ["name", "value", "tol", "pass"] {
            assert!(c.get(key).is_some(), "{c}");
        }
    }
    let csv = std::fs::read_to_string(fields.join("S1_chart0_smoothed.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("re_1,im_1,value"));
    assert!(csv.lines().count() > 100);

    let verified = cli(&["verify", "--report", path_str(&report)]);
    assert_eq!(verified.status.code(), Some(0));

    let mut tampered = value.clone();
    tampered["checks"][0]["value"] = Value::from(1.0e9);
    let bad = dir.path().join("tampered.json");
    std::fs::write(&bad, serde_json::to_string(&tampered).unwrap()).unwrap();
    assert_eq!(cli(&["verify", "--report", path_str(&bad)]).status.code(), Some(1));
}

#[test]
fn eta_above_half_delta_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = cli(&["run", "--scenario", "S1", "--eta", "0.01", "--out", path_str(&report)]);
    assert_eq!(out.status.code(), Some(2));
    let record = error_record(&out);
    assert_eq!(record["error"], "infeasible");
    assert!(record["message"].as_str().unwrap().contains("eta ≤ delta/2"), "{record}");
    assert!(!report.exists());
}

#[test]
fn nested_radii_must_be_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = cli(&["run", "--scenario", "S1", "--nprime-radius", "0.8", "--out", path_str(&report)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"], "infeasible");
}

#[test]
fn usage_errors_exit_with_two() {
    let out = cli(&["run", "--scenario", "S9", "--out", "/tmp/never.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"], "unknown_scenario");

    let out = cli(&["run", "--scenario", "S1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"], "usage");

    let out = cli(&["run", "--scenario", "S1", "--h", "-1", "--out", "/tmp/never.json"]);
    assert_eq!(out.status.code(), Some(2));

    let out = cli(&["sweep", "--scenario", "S1", "--param", "zeta", "--values", "1,2", "--out", "/tmp/never.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"], "invalid_override");

    let out = cli(&["sweep", "--scenario", "S1", "--param", "eta", "--values", "1,x", "--out", "/tmp/never.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_rejects_malformed_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.json");
    std::fs::write(&path, "{not json").unwrap();
    let out = cli(&["verify", "--report", path_str(&path)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"], "malformed_report");
    let out = cli(&["verify", "--report", path_str(&dir.path().join("missing.json"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_records_every_value() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sweep.json");
    let out = cli(&["sweep", "--scenario", "S1", "--param", "eta", "--values", "0.00025,0.0005,0.01", "--out", path_str(&out_path)]);
    assert_eq!(out.status.code(), Some(1));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let runs = doc["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 3);
    assert_eq!(runs[0]["report"]["pass"], true);
    assert_eq!(runs[1]["report"]["pass"], true);
    assert!(runs[2]["error"].as_str().unwrap().contains("eta ≤ delta/2"));
}
