use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn k3tau(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k3tau")).args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = k3tau(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn failure(args: &[&str]) -> (i32, Value) {
    let out = k3tau(args);
    assert!(out.stdout.is_empty());
    (out.status.code().unwrap(), serde_json::from_slice(&out.stderr).unwrap())
}

#[test]
fn enriques_involution_report() {
    let v = ok_json(&["involution", "--builtin", "enriques"]);
    assert_eq!(v["r"], 10);
    assert_eq!(v["a"], 10);
    assert_eq!(v["hyperbolic"], true);
    assert_eq!(v["anti_invariant"]["rank"], 12);
    assert_eq!(v["anti_invariant"]["signature"]["positive"], 2);
}

#[test]
fn lattice_reports() {
    let v = ok_json(&["lattice", "--builtin", "K3"]);
    assert_eq!(v["rank"], 22);
    assert_eq!(v["determinant"], -1);
    assert_eq!(v["signature"]["positive"], 3);
    let e8 = ok_json(&["lattice", data("e8_lattice.json").to_str().unwrap()]);
    assert_eq!(e8["signature"]["negative"], 8);
    assert_eq!(e8["unimodular"], true);
}

#[test]
fn synthetic_zeta_gives_determinant_two() {
    let v = ok_json(&["zeta", data("synthetic_spectrum.json").to_str().unwrap()]);
    assert!((v["determinant"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-14);
    assert!(v["determinant"]["error_estimate"].as_f64().unwrap() < 1e-12);
    assert!((v["torsion"]["tau"].as_f64().unwrap() - 0.25).abs() < 1e-14);
    let balanced = ok_json(&["zeta", data("balanced_spectrum.json").to_str().unwrap()]);
    assert!((balanced["determinant"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn tau_with_and_without_curves() {
    let spec = data("synthetic_spectrum.json");
    let free = ok_json(&["tau", spec.to_str().unwrap()]);
    assert!((free["tau"].as_f64().unwrap() - 0.25).abs() < 1e-14);
    assert!(free["torsion_check"]["log_difference"].as_f64().unwrap().abs() < 1e-12);
    let with = ok_json(&["tau", spec.to_str().unwrap(), "--curves", data("unit_curve.json").to_str().unwrap()]);
    assert!((with["tau"].as_f64().unwrap() - 0.25).abs() < 1e-14);
}

#[test]
fn report_arithmetic() {
    let v = ok_json(&["report", "--tau", "0.25"]);
    assert_eq!(v["implied_norm"].as_f64(), Some(16.0));
    assert_eq!(v["tau_round_trip"].as_f64(), Some(0.25));
    let f = ok_json(&["report", data("report.json").to_str().unwrap()]);
    assert_eq!(f["constant_residual"].as_f64(), Some(0.0));
}

#[test]
fn period_of_compatible_and_incompatible_frames() {
    let v = ok_json(&["period", data("frame_compatible.json").to_str().unwrap()]);
    assert_eq!(v["labels"]["plus"], 1);
    assert_eq!(v["labels"]["minus"], -1);
    assert!(v["isotropy"]["plus"].as_f64().unwrap() < 1e-9);
    let (code, err) = failure(&["period", data("frame_incompatible.json").to_str().unwrap()]);
    assert_eq!(code, 4);
    assert_eq!(err["error"]["kind"], "geometry");
    assert!(err["error"]["message"].as_str().unwrap().contains("T g_I = g_I"));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(failure(&["zeta", "--builtin", "klein-bottle"]).0, 2);
    assert_eq!(failure(&["zeta", "--builtin", "t2-flat", "--tol=0"]).0, 2);
    assert_eq!(failure(&["zeta", "/nonexistent/spectrum.json"]).0, 2);
    assert_eq!(failure(&["involution", data("synthetic_spectrum.json").to_str().unwrap()]).0, 2);
    assert_eq!(k3tau(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn accuracy_errors_exit_three() {
    let (code, err) = failure(&["zeta", "--builtin", "t2-flat", "--tol", "1e-12", "--max-terms", "20"]);
    assert_eq!(code, 3);
    assert_eq!(err["error"]["requested"].as_f64(), Some(1e-12));
    assert!(err["error"]["achievable"].as_f64().unwrap() > 1e-12);
}

#[test]
fn consistency_errors_exit_four() {
    let (code, err) = failure(&["tau", "--builtin", "s2-antipodal", "--curves", data("unit_curve.json").to_str().unwrap()]);
    assert_eq!(code, 4);
    assert!(err["error"]["message"].as_str().unwrap().contains("free"));
}

#[test]
fn out_flag_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = k3tau(&["zeta", "--builtin", "t2-flat", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), k3tau(&["zeta", "--builtin", "t2-flat"]).stdout);
}
