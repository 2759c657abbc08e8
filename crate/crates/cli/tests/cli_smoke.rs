use std::fs;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn igusa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_igusa")).args(args).output().expect("run igusa")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn help_lists_subcommands() {
    let out = igusa(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in ["verify", "hilbert", "syzygy", "intersect", "quadrics", "estimate-c5", "tensor-check", "suite"] {
        assert!(text.contains(cmd), "missing {cmd} in help");
    }
}

#[test]
fn verify_default_grid_passes() {
    let out = igusa(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json_of(&out);
    assert_eq!(report["pass"], true);
    assert_eq!(report["command"], "verify");
    assert_eq!(report["input_digest"].as_str().unwrap().len(), 64);
    let names: Vec<&str> = report["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"point5-diag/chi5-vanishes"));
    assert!(names.contains(&"c5/spread"));
}

#[test]
fn loose_truncation_fails_with_named_checks() {
    let out = igusa(&["verify", "--eps", "1e-4"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("FAILED point0/thetalink"), "{stderr}");
    let report = json_of(&out);
    assert_eq!(report["pass"], false);
}

#[test]
fn eps_outside_the_accepted_range_is_a_usage_error() {
    let out = igusa(&["verify", "--eps", "1e-3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_point_file_exits_two() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("points.json");
    fs::write(&path, r#"[{"z0": [0, 1]}]"#).unwrap();
    let out = igusa(&["verify", "--points", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot parse"));

    fs::write(&path, r#"[{"z0": [0, 1], "z1": [0, 2], "z2": [0, 1]}]"#).unwrap();
    let out = igusa(&["verify", "--points", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "non-positive imaginary part must be rejected");
}

#[test]
fn missing_config_file_exits_two() {
    let out = igusa(&["verify", "--config", "/nonexistent/run.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_and_flags_combine() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"eps": 1e-12, "format": "csv"}"#).unwrap();
    let out = igusa(&["estimate-c5", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("name,residual"));
    let out = igusa(&["estimate-c5", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    assert_eq!(json_of(&out)["pass"], true);
}

#[test]
fn hilbert_tables_match() {
    let out = igusa(&["hilbert", "--module", "M+", "--max-r", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json_of(&out);
    assert_eq!(report["data"].as_array().unwrap().len(), 9);
    assert!(report["data"].as_array().unwrap().iter().all(|row| row["match"] == true));

    let out = igusa(&["hilbert", "--module", "trivial-combined", "--max-r", "5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 7);
}

#[test]
fn degree_too_large_is_a_usage_error() {
    let out = igusa(&["hilbert", "--module", "M-", "--max-r", "500"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lower --max-r"));
}

#[test]
fn intersect_and_syzygy_pass() {
    let out = igusa(&["intersect", "--max-r", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json_of(&out)["data"].as_array().unwrap().iter().all(|r| r["equal_as_subspaces"] == true));
    let out = igusa(&["syzygy", "--module", "M-", "--max-r", "7"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn quadrics_are_ten_integer_matrices() {
    let out = igusa(&["quadrics"]);
    assert_eq!(out.status.code(), Some(0));
    let data = json_of(&out)["data"].clone();
    let list = data.as_array().unwrap();
    assert_eq!(list.len(), 10);
    for q in list {
        let m = q["matrix"].as_array().unwrap();
        assert_eq!(m.len(), 4);
        assert!(m.iter().flat_map(|row| row.as_array().unwrap()).all(Value::is_i64));
    }
}

#[test]
fn tensor_check_reads_candidate_files() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("c.json");
    fs::write(
        &path,
        r#"[{"n": 1, "p": 1, "k": 0, "N": 1, "Q": [[0, 2, "1"], [2, 0, "-1"]], "A": {"1": [[1, 1, "1"]]}}]"#,
    )
    .unwrap();
    let out = igusa(&["tensor-check", "--candidates", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "a non-member without an expectation fails");
    let report = json_of(&out);
    let witness = &report["data"][0]["membership"]["conditions"][2]["witness"];
    assert_eq!(witness["exponents"], serde_json::json!([1, 1]));

    fs::write(&path, r#"[{"n": 1, "p": 2, "k": 0, "N": 1, "Q": [[0, 2, "1"]], "A": {}}]"#).unwrap();
    let out = igusa(&["tensor-check", "--candidates", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_report() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("report.json");
    let out = igusa(&["tensor-check", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
}

#[test]
fn seed_changes_points_and_digest() {
    let a = json_of(&igusa(&["estimate-c5"]));
    let b = json_of(&igusa(&["estimate-c5", "--seed", "7"]));
    assert_ne!(a["input_digest"], b["input_digest"]);
    assert_eq!(b["pass"], true);
}

#[test]
fn multiprecision_verify_passes() {
    let out = igusa(&["verify", "--precision-bits", "128"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}
