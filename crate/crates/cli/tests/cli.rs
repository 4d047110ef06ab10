use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str], config: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_korteweg"))
        .args(args)
        .arg("--config")
        .arg(fixture(config))
        .env("KORTEWEG_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("korteweg-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn validate_reports_constants() {
    let out = run(&["validate"], "validate_ok.json");
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["constants"]["eta_w"].as_f64().unwrap() + 0.25).abs() < 1e-15);
}

#[test]
fn degenerate_parameters_exit_with_validation_code() {
    let out = run(&["validate"], "validate_degenerate.json");
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("EtaVanishes") && err.contains("KappaEqualsMuNu"), "{err}");
}

#[test]
fn unknown_keys_are_rejected() {
    let out = run(&["validate"], "unknown_key.json");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn missing_config_is_an_io_error() {
    let out = run(&["validate"], "no_such_file.json");
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn manufactured_full_solve_writes_fields() {
    let dir = temp_dir("solve");
    let out = run(&["solve", "--out", dir.to_str().unwrap()], "solve_full.json");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["solution"]["residual"]["max_relative"].as_f64().unwrap() <= 1e-8);
    assert!(v["solution"]["relative_error"].as_f64().unwrap() <= 1e-8);
    let side: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("solution.json")).unwrap()).unwrap();
    assert_eq!(side["components"].as_array().unwrap().len(), 3);
    let bytes = std::fs::metadata(dir.join("solution.bin")).unwrap().len();
    assert_eq!(bytes, 16 * 3 * 16 * 513);
    assert!(dir.join("report.json").exists());
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn pressure_solve_picks_a_contracting_lambda() {
    let out = run(&["solve"], "solve_pressure.json");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["solution"]["lambda_selection"]["lambda0"].as_f64().unwrap() >= 0.5);
    assert!(v["solution"]["residual"]["max_relative"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn divergence_exits_with_numerical_code() {
    let out = run(&["solve"], "solve_diverging.json");
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("diverged"));
}

#[test]
fn whole_and_half_solves_have_small_residuals() {
    for config in ["solve_whole.json", "solve_half.json"] {
        let out = run(&["solve"], config);
        assert_eq!(out.status.code(), Some(0), "{config}");
        assert!(json(&out)["solution"]["residual"]["max_relative"].as_f64().unwrap() <= 1e-10, "{config}");
    }
}

#[test]
fn scan_reports_angle_and_positive_constant() {
    let out = run(&["scan"], "scan_l1.json");
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["sigma_star"]["sigma_star"].as_f64().is_some());
    assert!(v["scans"][0]["result"]["constant"].as_f64().unwrap() > 0.0);
}

#[test]
fn rbound_is_deterministic_and_seeded() {
    let a = run(&["rbound"], "rbound_small.json");
    let b = run(&["rbound"], "rbound_small.json");
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["rbound", "--seed", "12"], "rbound_small.json");
    assert_ne!(a.stdout, c.stdout);
    let v = json(&a);
    assert_eq!(v["estimates"].as_array().unwrap().len(), 2);
}

#[test]
fn probe_emits_csv() {
    let out = run(&["probe", "--format", "csv"], "probe.json");
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "lambda_abs,ratio");
    let ratios: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]));
}
