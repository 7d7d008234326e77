use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const E12: &str = r#"{"dim":2,"rows":[[[0,0],[1,0]],[[0,0],[0,0]]]}"#;

fn specfn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specfn"))
        .args(args)
        .env("SPECFN_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn e12_file(dir: &Path) -> String {
    let p = dir.join("e12.json");
    std::fs::write(&p, E12).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn wq_of_e12() {
    let dir = tempfile::tempdir().unwrap();
    let c = e12_file(dir.path());
    let out = specfn(&["compute", "wq", "--C", &c, "--q", "0.6"]);
    assert!(out.status.success());
    let v = json(&out)["value"].as_f64().unwrap();
    assert!((v - 0.9).abs() < 1e-9, "{v}");
}

#[test]
fn psr_and_wk_of_e12() {
    let dir = tempfile::tempdir().unwrap();
    let a = e12_file(dir.path());
    // r_ε of the 2×2 Jordan block is √(ε² + ε)
    let out = specfn(&["compute", "psr", "--matrix", &a, "--eps", "0.5"]);
    let v = json(&out)["value"].as_f64().unwrap();
    assert!((v - 0.75f64.sqrt()).abs() < 1e-8, "{v}");
    let out = specfn(&["compute", "wk", "--matrix", &a, "--k", "1"]);
    let v = json(&out)["value"].as_f64().unwrap();
    assert!((v - 0.5).abs() < 1e-9, "{v}");
}

#[test]
fn region_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let a = e12_file(dir.path());
    let out_dir = dir.path().join("out");
    let out = specfn(&[
        "compute", "region", "--kind", "pseudo", "--matrix", &a, "--eps", "0.3", "--grid", "32", "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("region.csv").exists());
    let svg = std::fs::read_to_string(out_dir.join("region.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}

#[test]
fn classify_c_reports_condition() {
    let dir = tempfile::tempdir().unwrap();
    let c = e12_file(dir.path());
    let out = specfn(&["classify-c", "--C", &c, "--grid", "41"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["condition"], "1");
    assert_eq!(v["profile"]["points"].as_array().unwrap().len(), 41);
}

#[test]
fn verify_writes_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = specfn(&[
        "verify", "rank-one-psr", "--trials", "3", "--dims", "3,4", "--seed", "7", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("rank-one-psr.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["seed"], 7);
    assert_eq!(json(&out), report);
}

#[test]
fn reports_are_reproducible() {
    let run = || json(&specfn(&["verify", "rank-one-psr", "--trials", "2", "--dims", "3", "--seed", "11"]));
    assert_eq!(run(), run());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let a = e12_file(dir.path());
    // missing parameter
    assert_eq!(specfn(&["compute", "psr", "--matrix", &a]).status.code(), Some(2));
    // out-of-range parameter
    assert_eq!(specfn(&["compute", "wq", "--C", &a, "--q", "1.5"]).status.code(), Some(2));
    // unknown suite
    assert_eq!(specfn(&["verify", "nope"]).status.code(), Some(2));
    // dims below 3
    assert_eq!(specfn(&["verify", "lwq", "--dims", "2"]).status.code(), Some(2));
    // profile grid too coarse
    assert_eq!(specfn(&["classify-c", "--C", &a, "--grid", "5"]).status.code(), Some(2));
    // malformed matrix file
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dim":2,"rows":[[[0,0]]]}"#).unwrap();
    assert_eq!(specfn(&["compute", "wk", "--matrix", bad.to_str().unwrap(), "--k", "1"]).status.code(), Some(2));
}

#[test]
fn failing_suite_exits_one() {
    // the sweep agrees with the closed form to rounding, not exactly
    let out = specfn(&["verify", "rank-one-psr", "--trials", "5", "--dims", "5", "--tol", "tolerance=0"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["pass"], false);
    assert!(!report["witnesses"].as_array().unwrap().is_empty());
}
