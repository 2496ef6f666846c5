//! The command-line binary: formats, exit codes, determinism and the thread cap.

use serde_json::Value;
use std::process::{Command, Output};

fn hypolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypolab")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn kernel_both_methods() {
    let out = hypolab(&["kernel", "--model", "hopf", "--n", "1", "--t", "0.5", "--r", "0.7", "--theta", "0.4", "--method", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in ["command", "params", "seed", "results", "verdicts", "paper_refs"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let summary = v["results"].as_array().unwrap().last().unwrap();
    assert!(summary["relative_difference"].as_f64().unwrap() < 1e-8);
    assert!(summary["series"].is_f64() && summary["integral"].is_f64());
    assert!(!v["paper_refs"][0].as_str().unwrap().is_empty());
}

#[test]
fn lichnerowicz_csv() {
    let out = hypolab(&["verify", "--suite", "lichnerowicz", "--d", "1..5", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("model,d,bound,lambda1,equal"));
    let hopf: Vec<&str> = lines.clone().filter(|l| l.starts_with("hopf,")).collect();
    assert_eq!(hopf.len(), 5);
    assert!(hopf.iter().all(|l| l.ends_with(",true")));
    assert!(hopf[0].starts_with("hopf,1,2,2,"));
    // the quaternionic rows are not equalities, so the run reports failure
    assert!(lines.any(|l| l.starts_with("quaternionic,") && l.ends_with(",false")));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("FAIL quaternionic"));
}

#[test]
fn decay_report() {
    let out = hypolab(&["kfp", "decay", "--potential", "quadratic", "--eta", "0.25", "--T", "6", "--grid", "48"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let r = &v["results"][0];
    assert!(r["lambda_fitted"].as_f64().unwrap() >= 0.95 * r["lambda_predicted"].as_f64().unwrap());
    let csv = hypolab(&["kfp", "decay", "--T", "2", "--grid", "32", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("t,functional\n"));
    assert!(text.lines().skip(1).all(|l| l.split(',').count() == 2));
}

#[test]
fn usage_errors() {
    assert_eq!(hypolab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hypolab(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(hypolab(&["kernel", "--model", "hopf", "--t", "x", "--r", "1"]).status.code(), Some(2));
}

#[test]
fn output_file_is_deterministic_and_records_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = hypolab(&["verify", "--suite", "cd", "--polys", "5", "--seed", "42", "--output", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
        std::fs::read(path).unwrap()
    };
    let (a, b) = (run("a.json"), run("b.json"));
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn tolerance_overrides_are_echoed() {
    let out = hypolab(&["verify", "--suite", "phi", "--tol", "phi_rel=0.001"]);
    let v = json(&out);
    assert_eq!(v["params"]["tolerances"]["phi_rel"], 0.001);
    assert_eq!(v["verdicts"][0]["threshold"], 0.001);
}

#[test]
fn thread_cap() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_hypolab"))
            .args(["verify", "--suite", "relation"])
            .env("HYPOLAB_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, run("2").stdout);
    assert_eq!(run("zero").status.code(), Some(2));
}
