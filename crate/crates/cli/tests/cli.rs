use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn csskit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csskit")).args(args).output().expect("binary runs")
}

fn json_stdout(args: &[&str]) -> Value {
    let out = csskit(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("csskit-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn ghz_fixed_x_omega_is_three_quarters() {
    let v = json_stdout(&["game", "omega", "--code", "ghz", "--n", "3", "--fix-x", "1"]);
    assert_eq!(v["omega"], "3/4");
}

#[test]
fn csv_output_for_oracle() {
    let out = csskit(&["--format", "csv", "game", "omega", "--code", "ghz", "--n", "3", "--fix-x", "1", "--method", "oracle"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("3/4"), "{text}");
}

#[test]
fn digamma_sides_agree() {
    let v = json_stdout(&["statmech", "digamma"]);
    let lhs = v["lhs"].as_f64().unwrap();
    let rhs = v["rhs"].as_f64().unwrap();
    assert!((lhs - rhs).abs() < 1e-8);
    assert_eq!(v["pass"], true);
}

#[test]
fn standard_form_of_k5() {
    let path = temp_file("k5.txt", "5 5\n01111\n10111\n11011\n11101\n11110\n");
    let v = json_stdout(&["standard-form", "--matrix", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(v["rank"], 4);
    assert_eq!(v["bell_pairs"].as_array().unwrap().len(), 2);
    assert_eq!(v["isolated"].as_array().unwrap().len(), 1);
}

#[test]
fn malformed_matrix_reports_line() {
    let path = temp_file("bad.txt", "01111\n");
    let out = csskit(&["standard-form", "--matrix", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "format");
    assert_eq!(err["error"]["line"], 1);
}

#[test]
fn unknown_code_is_a_parameter_error() {
    let out = csskit(&["game", "omega", "--code", "no-such-code"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "parameter");
}

#[test]
fn bad_flag_is_a_usage_error() {
    assert_eq!(csskit(&["--bogus"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["game", "omega", "--code", "cluster", "--n", "4"];
    let first = csskit(&args);
    let second = csskit(&["--sequential", "game", "omega", "--code", "cluster", "--n", "4"]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn sweep_writes_csv() {
    let out = csskit(&["sweep", "--game", "ghz3", "--steps", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,pauli_score,ncf,bound"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0, 1.0, 0.0, 1.0]);
    assert_eq!(lines.count(), 2);
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("csskit-{}-plaquette.json", std::process::id()));
    let out = csskit(&["-o", path.to_str().unwrap(), "statmech", "plaquette", "--L", "4"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(v["ground_states"], 16);
}
