//! End-to-end checks of the command-line interface: exit codes, JSON
//! summaries, determinism, config files and CSV artifacts.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn hjsing(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hjsing"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hjsing-cli-{name}"));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn exponents_subcritical_example() {
    let out = hjsing(&["exponents", "--N", "3", "--p", "2", "--q", "1.25"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["beta_q"], 3.0);
    assert!((v["result"]["q_star"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-12);
    assert_eq!(v["result"]["regime"], "subcritical");
    // the full resolved config is embedded
    assert_eq!(v["config"]["n"], 3);
    assert_eq!(v["config"]["tol"], 1e-10);
}

#[test]
fn profile_above_threshold_exits_two() {
    let out = hjsing(&["profile", "--N", "3", "--p", "2", "--q", "1.5", "--grid", "512"]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["regime"], "critical_or_above");
    assert!(v["result"]["bracket"].is_null());
}

#[test]
fn eigen_planar_matches_closed_form() {
    let dir = tmpdir("eigen");
    let out = hjsing(&[
        "eigen", "--N", "2", "--p", "1.5", "--tol", "1e-10",
        "--grid", "2048", "--out", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let bs = v["result"]["beta_star"].as_f64().unwrap();
    let cf = v["result"]["closed_form"].as_f64().unwrap();
    assert!((bs - cf).abs() < 1e-6, "{bs} vs {cf}");
    assert!(v["result"]["identity_gap"].as_f64().unwrap() < 1e-5);
    // CSV artifact with the documented header
    let csv = fs::read_to_string(dir.join("eigenprofile.csv")).unwrap();
    assert!(csv.starts_with("theta,omega,omega_theta\n"));
    assert_eq!(csv.lines().count(), 2048 + 2);
}

#[test]
fn summaries_are_byte_identical() {
    let args = ["exponents", "--N", "4", "--p", "3", "--q", "2.3", "--grid", "512"];
    let a = hjsing(&args);
    let b = hjsing(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn usage_errors_exit_one() {
    // unknown flag
    let out = hjsing(&["exponents", "--bogus", "1"]);
    assert_eq!(out.status.code(), Some(1));
    // invalid parameter range is a one-line diagnostic naming the flag
    let out = hjsing(&["exponents", "--N", "3", "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--N/--p/--q"), "stderr: {err}");
    // bad grid2 syntax
    let out = hjsing(&["pde", "--N", "2", "--p", "1.5", "--q", "1.2", "--grid2", "64"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tmpdir("config");
    let path = dir.join("run.json");
    fs::write(&path, r#"{"n": 3, "p": 2.0, "q": 1.25, "grid": 256}"#).unwrap();
    let out = hjsing(&[
        "exponents", "--config", path.to_str().unwrap(), "--q", "1.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["config"]["q"], 1.5); // flag beats file
    assert_eq!(v["config"]["grid"], 256); // file value kept
    assert_eq!(v["result"]["regime"], "critical_or_above");
}

#[test]
fn sweep_reports_no_bracket_above_threshold() {
    let out = hjsing(&["sweep", "--N", "4", "--p", "4", "--q", "3.6", "--grid", "512"]);
    assert_eq!(out.status.code(), Some(2));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["bracket_found"], false);
    assert!((v["result"]["q_star"].as_f64().unwrap() - 3.5).abs() < 1e-9);
    let outcomes = v["result"]["outcomes"].as_array().unwrap();
    assert!(outcomes.len() >= 40);
    assert!(outcomes
        .iter()
        .all(|o| o["exit"]["kind"] != "crossed_zero"));
}

#[test]
fn pde_writes_field_and_fit() {
    let dir = tmpdir("pde");
    let out = hjsing(&[
        "pde", "--N", "2", "--p", "1.5", "--q", "0.66", "--mode", "weak",
        "--grid2", "64x24", "--eps", "1e-3", "--grid", "512",
        "--out", dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert!(v["result"]["stats"]["converged"].as_bool().unwrap());
    assert!(v["result"]["fit"]["beta_hat"].as_f64().unwrap() > 1.0);
    let csv = fs::read_to_string(dir.join("field.csv")).unwrap();
    assert!(csv.starts_with("r,theta,u\n"));
    assert_eq!(csv.lines().count(), 64 * 24 + 1);
}

#[test]
fn verify_bounds_suite_passes() {
    let out = hjsing(&["verify", "--suite", "bounds"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["result"]["passed"], true);
    assert!(v["result"]["checks"].as_array().unwrap().len() >= 6);
}
