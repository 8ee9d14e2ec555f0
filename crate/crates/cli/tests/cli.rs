use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn b2disc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_b2disc")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn without_timestamp(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap().lines().filter(|l| !l.contains("\"timestamp\"")).collect()
}

#[test]
fn b2_char_of_a_radial_weight() {
    let o = b2disc(&["b2-char", "--weight", "radial:0.5", "--max-level", "10"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["status"], "ok");
    assert_eq!(r["result"]["in_b2"], true);
    // (4/3)·(1 − ...) closed form stays below 4/3
    let c = r["result"]["characteristic_sq"].as_f64().unwrap();
    assert!(c > 1.0 && c <= 4.0 / 3.0 + 1e-12, "{c}");
    assert_eq!(r["config"]["experiment"]["command"], "b2-char");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&b2disc(&["b2-char", "--weight", "radial:1"])), 2);
    let bad = b2disc(&["b2-char", "--weight", "radial:x"]);
    assert_eq!(code(&bad), 1);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("weight"));
    assert_eq!(code(&b2disc(&["no-such-command"])), 1);
    assert_eq!(code(&b2disc(&["gamma", "--weight", "one", "--tol", "-1"])), 1);
    assert_eq!(code(&b2disc(&["--help"])), 0);
}

#[test]
fn identical_configs_give_identical_reports() {
    let args = ["eps-cond", "--weight", "radial:-1", "--eps", "0.5", "--budget", "2000", "--seed", "4"];
    let a = b2disc(&args);
    let b = b2disc(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(without_timestamp(&a), without_timestamp(&b));

    // rerunning the embedded config reproduces the report
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, serde_json::to_string(&json(&a)["config"]).unwrap()).unwrap();
    let c = b2disc(&["run", cfg.to_str().unwrap()]);
    assert_eq!(code(&c), 0, "{}", String::from_utf8_lossy(&c.stderr));
    assert_eq!(without_timestamp(&a), without_timestamp(&c));
}

#[test]
fn config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"experiment": {"command": "gamma", "weight": "one", "tol": 0.1, "max_levels": 3}}"#)
        .unwrap();
    let o = b2disc(&["run", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("max_levels"), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn csv_and_merge() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    let o = b2disc(&[
        "--out",
        &p("a.json"),
        "--csv",
        &p("a.csv"),
        "gamma",
        "--weight",
        "radial-log:-1",
        "--max-level",
        "6",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(p("a.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("t,in_b2"));
    assert!(text.lines().count() > 3);

    let o = b2disc(&["--out", &p("b.json"), "spectrum", "truncation", "--g", "z", "--n-max", "32"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let b: Value = serde_json::from_str(&std::fs::read_to_string(p("b.json")).unwrap()).unwrap();
    assert_eq!(b["result"]["radius"], 0.0);

    let m = b2disc(&["report-merge", &p("a.json"), &p("b.json")]);
    assert_eq!(code(&m), 0);
    assert_eq!(json(&m)["result"]["reports"].as_array().unwrap().len(), 2);
    assert!(!Path::new(&p("missing.json")).exists());
    assert_eq!(code(&b2disc(&["report-merge", &p("missing.json")])), 1);
}

#[test]
fn jobs_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_b2disc"))
        .env("B2DISC_JOBS", "1")
        .args(["net", "--separation", "0.5", "--r-max", "0.9"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["config"]["jobs"], 1);
    assert!(r["result"]["size"].as_u64().unwrap() > 1);
}

#[test]
fn counterexample_and_cesaro() {
    let o = b2disc(&["counterexample", "--spec", "factorial", "--terms", "6", "--floor-samples", "1000"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["result"]["floors"].as_array().unwrap().len(), 6);

    let o = b2disc(&["cesaro-matrix", "--g", "z", "--n", "8"]);
    let r = json(&o);
    assert_eq!(r["result"]["strictly_lower"], true);
    assert_eq!(r["result"]["eigenvalue_radius"], 0.0);
}

#[test]
fn projection_commands() {
    let o = b2disc(&["project", "--function", "abs2", "--points", "0,0;0.5,0"]);
    assert_eq!(code(&o), 0);
    for v in json(&o)["result"]["values"].as_array().unwrap() {
        assert!((v[0].as_f64().unwrap() - 0.5).abs() < 1e-6);
    }
    let o = b2disc(&["confid-residual", "--function", "abs2", "--z", "0.5,0"]);
    assert_eq!(code(&o), 0);
    assert!(json(&o)["result"]["refined_residual"].as_f64().unwrap() < 1e-8);
}
