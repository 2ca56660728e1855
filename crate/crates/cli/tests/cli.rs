use std::path::PathBuf;
use std::process::Command;

use core_entropy_cli::{run, EXIT_DOMAIN, EXIT_INPUT, EXIT_OK};
use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("core-entropy").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = call(args);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}"));
    (code, v)
}

#[test]
fn thurston_airplane() {
    let (code, v) = json(&["entropy", "thurston", &fixture("portrait_airplane.json")]);
    assert_eq!(code, EXIT_OK);
    assert!((v["entropy"].as_f64().unwrap() - 0.481211825060).abs() < 1e-9);
    assert_eq!(v["pairs"], 3);
}

#[test]
fn bad_portrait_exits_one_with_report() {
    let (code, v) = json(&["portrait", "validate", &fixture("portrait_bad.json")]);
    assert_eq!(code, EXIT_DOMAIN);
    assert_eq!(v["valid"], false);
    assert_eq!(v["report"]["non_singleton_image"][0], 0);
}

#[test]
fn chebyshev_verdict() {
    let (code, v) = json(&["poly", "verdict", &fixture("forest_chebyshev.json")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["verdict"], "Discontinuous");
    assert!((v["h"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-9);
    assert_eq!(v["mu"].as_f64(), Some(0.0));
}

#[test]
fn classes_and_itinerary() {
    let (code, v) = json(&["portrait", "classes", &fixture("portrait_chebyshev.json")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["classes"].as_array().unwrap().len(), 2);
    assert_eq!(v["classes"][0]["length"], "1/2");

    let p = fixture("portrait_airplane.json");
    let (code, v) = json(&["portrait", "itinerary", &p, "--angle", "3/7", "--side", "right"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["period"], 3);
    let (code, _, err) = call(&["portrait", "itinerary", &p, "--angle", "x/7"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("--angle"));
}

#[test]
fn tree_mu_and_newton() {
    let (code, v) = json(&["entropy", "tree", &fixture("forest_airplane.json")]);
    assert_eq!(code, EXIT_OK);
    assert!((v["entropy"].as_f64().unwrap() - 0.481211825060).abs() < 1e-9);

    let (code, v) = json(&["poly", "mu", &fixture("forest_basilica.json")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["mu"].as_f64(), Some(0.0));

    let (code, v) = json(&["entropy", "newton", &fixture("newton_cubic.json")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["extended_graph"]["agrees"], true);
    assert_eq!(v["multipliers"]["pass"], true);

    let (code, v) = json(&["newton", "verdict", "--cubic", &fixture("newton_cubic_basilica.json")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["verdict"], "Continuous");

    let (code, _) = json(&["newton", "verdict", &fixture("newton_ray_into_forest.json")]);
    assert_eq!(code, EXIT_DOMAIN);
}

#[test]
fn scan_table_and_tolerance() {
    let (code, v) = json(&["scan", "continuity", &fixture("scan_chebyshev.json"), "--tolerance", "0.5"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["tolerance"].as_f64(), Some(0.5));
    assert_eq!(v["rows"].as_array().unwrap().len(), 8);

    let (code, out, _) = call(&["--table", "scan", "continuity", &fixture("scan_airplane.json")]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("converged"));
    assert!(out.lines().any(|l| l.trim_start().starts_with("distance")));
}

#[test]
fn output_file_and_render() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("p.svg");
    let (code, out, _) = call(&["render", "portrait", &fixture("portrait_quintic.json"), "-o", svg.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let first = std::fs::read(&svg).unwrap();
    assert!(String::from_utf8_lossy(&first).starts_with("<svg"));
    call(&["render", "portrait", &fixture("portrait_quintic.json"), "-o", svg.to_str().unwrap()]);
    assert_eq!(first, std::fs::read(&svg).unwrap());
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let (code, out, err) = call(&["entropy", "thurston", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.is_empty() && err.contains("error"));
    let (code, _, _) = call(&["entropy", "nonsense"]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn reports_are_deterministic() {
    let args = ["poly", "verdict", &fixture("forest_cubic_fatou_julia.json")];
    assert_eq!(call(&args), call(&args));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_core-entropy");
    let ok = Command::new(bin).args(["entropy", "thurston", &fixture("portrait_chebyshev.json")]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    let bad = Command::new(bin).args(["portrait", "validate", &fixture("portrait_bad.json")]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_DOMAIN));
}
