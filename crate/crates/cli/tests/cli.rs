use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use legendre_flow::io::read_curve_csv_file;
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_legendre-flow"))
        .args(args)
        .env_remove("LEGENDRE_FLOW_OUT")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn simulate_writes_snapshots_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = bin(&[
        "simulate", "--n", "1", "--coeffs", "a0=0.01, 2:1, 4:0.1", "--times", "0,0.5,1", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for i in 0..3 {
        let table = read_curve_csv_file(&out.join(format!("curve_{i:03}.csv"))).unwrap();
        assert_eq!(table.curve.grid_size(), 512);
        assert!(table.curvature.is_some());
        assert!(table.curve.frontal_residual() < 1e-2);
    }
    let manifest = json(&out.join("manifest.json"));
    let artifacts = manifest["artifacts"].as_array().unwrap();
    assert_eq!(artifacts.len(), 7);
    let paths: Vec<&str> = artifacts.iter().map(|a| a["path"].as_str().unwrap()).collect();
    let mut sorted = paths.clone();
    sorted.sort();
    assert_eq!(paths, sorted);
    assert!(artifacts.iter().all(|a| a["sha256"].as_str().unwrap().len() == 64));
    assert_eq!(manifest["config"]["coefficients"]["n"], 1);
}

#[test]
fn self_similar_profile_image() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    let o = bin(&["self-similar", "--n", "2", "--m", "4", "--c1", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let index = json(&out.join("index.json"));
    assert_eq!(index[0]["lap_count"], 2);
    assert_eq!(index[0]["cusp_count"], 4);
    let svg = fs::read_to_string(out.join("profile.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(svg.contains("<path"));
}

#[test]
fn catalog_has_twelve_entries() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["self-similar", "--catalog", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let index = json(&dir.path().join("index.json"));
    assert_eq!(index.as_array().unwrap().len(), 12);
    // csv and svg for each profile, plus the index
    assert_eq!(json(&dir.path().join("manifest.json"))["artifacts"].as_array().unwrap().len(), 25);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        r#"{"command": "cusps", "coefficients": {"n": 2, "modes": [{"k": 1, "a": 0.05}, {"k": 3, "a": 1.0}]}}"#,
    )
    .unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = bin(&["--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["manifest.json", "cusps.csv", "cusps.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn resonant_profile_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["self-similar", "--n", "2", "--m", "2", "--c1", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&o.stderr).is_empty());
}

#[test]
fn missing_source_and_unreadable_curve_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(bin(&["simulate", "--out", out]).status.code(), Some(2));
    let bogus = dir.path().join("nope.csv");
    fs::write(&bogus, "u,x,y\n0,1,2\n").unwrap();
    assert_eq!(bin(&["reparam", "--curve", bogus.to_str().unwrap(), "--out", out]).status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        r#"{"command": "simulate", "coefficients": {"n": 1, "modes": [{"k": 2, "a": 1.0}]}, "times": [0.0, 1.0], "grid": 128}"#,
    )
    .unwrap();
    let out = dir.path().join("o");
    let o = bin(&["--config", config.to_str().unwrap(), "simulate", "--times", "0.25", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("curve_000.csv").exists());
    assert!(!out.join("curve_001.csv").exists());
    let table = read_curve_csv_file(&out.join("curve_000.csv")).unwrap();
    assert_eq!(table.curve.grid_size(), 128);
    assert_eq!(table.t, Some(0.25));
}

#[test]
fn cusp_decrease_is_witnessed() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["cusps", "--n", "2", "--coeffs", "1:0.05, 3:1", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let report = json(&dir.path().join("cusps.json"));
    let events = report["events"].as_array().unwrap();
    assert_eq!(events.len(), 1);
    let t = events[0]["time"].as_f64().unwrap();
    assert!((t - 60f64.ln() / 2.0).abs() < 1e-5, "{t}");
}

#[test]
fn oracle_checks_pass_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let beta = dir.path().join("beta");
    let o = bin(&["oracle-check", "--out", beta.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json(&beta.join("oracle.json"))["observed_order"].as_f64().unwrap() >= 1.9);

    let phi = dir.path().join("phi");
    let o = bin(&["oracle-check", "--equation", "phi", "--t-end", "0.5", "--forcing", "0.1", "--out", phi.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&phi.join("oracle.json"))["pass"], true);
}

#[test]
fn explicit_scheme_beyond_its_limit_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&[
        "oracle-check", "--scheme", "explicit-euler", "--stencil", "standard", "--dt", "0.01", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}
