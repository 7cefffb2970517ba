use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn nil3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nil3")).args(args).output().expect("run nil3")
}

fn code(args: &[&str]) -> i32 {
    nil3(args).status.code().expect("exit code")
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn check_exit_codes() {
    for (file, expected) in [
        ("cap.json", 0),
        ("half_disk_js.json", 0),
        ("scherk.json", 0),
        ("lens_aa.json", 2),
        ("lens_failing.json", 3),
    ] {
        let p = data(file);
        assert_eq!(code(&["check", "--input", p.to_str().unwrap()]), expected, "{file}");
    }
}

#[test]
fn check_report_lists_margins() {
    let dir = tempfile::tempdir().unwrap();
    let p = data("lens_failing.json");
    code(&["check", "--input", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    let rep = json(dir.path().join("check.json"));
    assert_eq!(rep["passed"], false);
    assert_eq!(rep["admissibility"]["passed"], true);
    assert_eq!(rep["solvability"]["passed"], false);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&["check"]), 64);
    assert_eq!(code(&["frobnicate"]), 64);
    assert_eq!(code(&["check", "--input", "/nonexistent/domain.json"]), 64);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"tau\": 0.0, \"arcs\": [").unwrap();
    assert_eq!(code(&["check", "--input", bad.to_str().unwrap()]), 64);
    let p = data("half_disk_js.json");
    assert_eq!(code(&["solve", "--input", p.to_str().unwrap()]), 64);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn solve_writes_field_and_residual() {
    let dir = tempfile::tempdir().unwrap();
    let p = data("cap.json");
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&["solve", "--input", p.to_str().unwrap(), "--h", "0.1", "--out", out]), 0);
    let rep = json(dir.path().join("residual.json"));
    let nodes = rep["nodes"].as_u64().unwrap() as usize;
    assert!(rep["residual"]["residual_history"].as_array().unwrap().last().unwrap().as_f64().unwrap() < 1e-10);
    assert_eq!(rep["residual"]["flagged_blowup"], false);
    let mut field = csv::Reader::from_path(dir.path().join("field.csv")).unwrap();
    assert_eq!(field.records().count(), nodes);
    let mut tris = csv::Reader::from_path(dir.path().join("triangles.csv")).unwrap();
    assert_eq!(tris.records().count(), rep["triangles"].as_u64().unwrap() as usize);
    assert!(dir.path().join("nodes.csv").exists());
}

#[test]
fn solve_refuses_failing_hypotheses_unless_forced() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("steep.json");
    // unit disk with tau^2 = 0.64 > (k / 2)^2
    let text = fs::read_to_string(data("cap.json")).unwrap().replace("\"tau\": 0.1", "\"tau\": 0.8");
    fs::write(&f, text).unwrap();
    let p = f.to_str().unwrap();
    assert_eq!(code(&["solve", "--input", p, "--h", "0.2"]), 3);
    let forced = code(&["solve", "--input", p, "--h", "0.2", "--force"]);
    assert!(forced == 0 || forced == 4, "{forced}");
}

#[test]
fn flux_balance_at_default_resolution() {
    let p = data("cap.json");
    let out = nil3(&["flux", "--input", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rep["relative_residual"].as_f64().unwrap() < 1e-2, "{rep}");
    for arc in rep["arcs"].as_array().unwrap() {
        assert!(arc["flux"].as_f64().unwrap().abs() < arc["length"].as_f64().unwrap());
    }
}

#[test]
fn flux_report_is_reproducible() {
    let p = data("cap.json");
    let args = ["flux", "--input", p.to_str().unwrap(), "--h", "0.1"];
    let a = nil3(&args).stdout;
    let b = nil3(&args).stdout;
    let single = Command::new(env!("CARGO_BIN_EXE_nil3")).args(args).env("NIL3_THREADS", "1").output().unwrap().stdout;
    assert!(!a.is_empty());
    assert_eq!(a, b);
    assert_eq!(a, single);
}

#[test]
fn sequence_reports_divergence_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = data("lens_failing.json");
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&["sequence", "--input", p.to_str().unwrap(), "--nmax", "64", "--out", out]), 0);
    let rep = json(dir.path().join("sequence.json"));
    assert_eq!(rep["n_values"].as_array().unwrap().len(), 7);
    let lines = rep["divergence"]["lines"].as_array().unwrap();
    assert!(!lines.is_empty());
    let k = lines[0]["curvature"].as_f64().unwrap();
    assert!((k - 1.0).abs() < 0.05, "{k}");
    assert!(rep["limit_nodes"].as_u64().unwrap() > 0);
    assert_eq!(json(dir.path().join("divergence.json")), rep["divergence"]);
    assert!(dir.path().join("limit.csv").exists());
    assert!(dir.path().join("field_last.csv").exists());
}

#[test]
fn sequence_without_divergence() {
    let p = data("half_disk_js.json");
    let out = nil3(&["sequence", "--input", p.to_str().unwrap(), "--nmax", "16", "--h", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rep["divergence"]["lines"].as_array().unwrap().is_empty());
}
