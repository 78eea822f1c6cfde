use std::path::{Path, PathBuf};
use std::process::Command;

use akdq::cli::{parse_scalar, Report};
use akdq::jets::scalar::gi;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(format!("{name}.json"))
}

fn akdq(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_akdq")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn json(args: &[&str]) -> (i32, Report) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let (code, out) = akdq(&full);
    (code, Report::from_json(&out).unwrap())
}

fn value<'a>(r: &'a Report, label: &str) -> &'a str {
    r.sections
        .iter()
        .flat_map(|s| &s.entries)
        .find(|e| e.label == label)
        .map(|e| e.value.as_str())
        .unwrap_or_else(|| panic!("no entry {label}"))
}

#[test]
fn check_passes_on_every_corpus_chart() {
    for name in ["flat2d", "flat_c2", "kahler2d", "nonintegrable4d"] {
        let path = corpus(name);
        let (code, report) = json(&["check", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{name}");
        assert!(report.passed && !report.checks.is_empty());
    }
}

#[test]
fn star_on_the_plane_gives_the_half_bracket() {
    let path = corpus("flat2d");
    let args = ["star", path.to_str().unwrap(), "--order", "1", "--f", "x1", "--g", "x2", "--normalized"];
    let (code, report) = json(&args);
    assert_eq!(code, 0);
    assert_eq!(parse_scalar(value(&report, "C_1")).unwrap(), gi(-1, 2));
}

#[test]
fn class_reports_gamma_on_the_nonintegrable_chart() {
    let (code, text) = akdq(&["class", corpus("nonintegrable4d").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(text.contains("verdict: pass"));
    assert!(text.contains("gamma["));
}

#[test]
fn bundled_names_resolve_without_a_file() {
    assert_eq!(akdq(&["check", "kahler2d.json"]).0, 0);
}

#[test]
fn invalid_geometry_exits_with_one() {
    let text = std::fs::read_to_string(corpus("flat2d")).unwrap();
    let mut spec: serde_json::Value = serde_json::from_str(&text).unwrap();
    spec["J"] = serde_json::json!([["0", "2"], ["-2", "0"]]);
    let path = std::env::temp_dir().join(format!("akdq-bad-{}.json", std::process::id()));
    std::fs::write(&path, spec.to_string()).unwrap();
    let (code, report) = json(&["check", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(code, 1);
    assert!(!report.passed);
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(akdq(&["check", "/nonexistent/chart.json"]).0, 2);
    let path = corpus("flat2d");
    assert_eq!(akdq(&["star", path.to_str().unwrap(), "--f", "x1 +", "--g", "x2"]).0, 2);
    assert_eq!(akdq(&["star", path.to_str().unwrap(), "--f", "x7", "--g", "x2"]).0, 2);
    assert_eq!(akdq(&["frobnicate"]).0, 2);
}

#[test]
fn selftest_passes() {
    let (code, text) = akdq(&["selftest", "--samples", "2", "--chart", "flat2d"]);
    assert_eq!(code, 0, "{text}");
}
