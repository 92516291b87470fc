use std::process::Command;

use postnikov_cli::{run, to_canonical_json, EXIT_MISMATCH, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["postnikov"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let mut v = args.to_vec();
    v.extend_from_slice(&["--format", "json"]);
    let (code, out, err) = call(&v);
    assert_eq!(code, EXIT_OK, "{err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn adem_text() {
    assert_eq!(call(&["adem", "1", "2"]).1, "Sq[3]\n");
    assert_eq!(call(&["adem", "1", "1"]).1, "0\n");
    assert_eq!(call(&["adem", "2", "3"]).1, "Sq[4,1] + Sq[5]\n");
}

#[test]
fn em_basis_reports_equivalents() {
    let (code, out, _) = call(&["em-basis", "--n", "2", "--deg", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("Sq[2]i2"), "{out}");
    assert!(out.contains("dim 1"), "{out}");
    let v = json(&["em-basis", "--n", "2", "--deg", "2", "--max-deg", "6"]);
    let dims: Vec<u64> = v["degrees"].as_array().unwrap().iter().map(|d| d["dim"].as_u64().unwrap()).collect();
    // 1 + t^2 + t^3 + t^4 + 2t^5 + 2t^6 + ...
    assert_eq!(dims, [1, 1, 1, 2, 2]);
}

#[test]
fn kunneth_dimensions() {
    let v = json(&["kunneth", "--space", "K(1,2)xK(1,3)", "--deg", "5"]);
    // Sq[2]i3, i2 i3, i2 Sq[1]i2, Sq[2,1]i2
    assert_eq!(v["degrees"][0]["dim"], 4);
}

#[test]
fn classify3_json_is_canonical() {
    let (code, out, _) = call(&["classify3", "--A", "1,2", "--B", "1,3", "--C", "1,5", "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(to_canonical_json(&v).unwrap(), out.trim_end());
    assert_eq!(v["total"], 14);
}

#[test]
fn text_and_json_agree() {
    let args = ["classify3", "--A", "1,2", "--B", "1,3", "--C", "1,5"];
    let (_, text, _) = call(&args);
    let v = json(&args);
    for b in v["branches"].as_array().unwrap() {
        let line = format!("k1 = {}: {} candidates, {} orbits", b["k1"].as_str().unwrap(), b["candidates"], b["orbits"]);
        assert!(text.contains(&line), "missing '{line}' in\n{text}");
    }
    assert!(text.contains(&format!("total {}", v["total"])));
}

#[test]
fn compare_exit_code() {
    let (code, out, _) = call(&["compare", "--A", "1,2", "--B", "1,3", "--C", "1,5"]);
    assert_ne!(code, EXIT_MISMATCH);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().filter(|l| l.ends_with("true")).count(), 2, "{out}");
}

#[test]
fn lifts_levels() {
    let v = json(&["lifts", "--source", "K(1,2)", "--fiber", "1,3"]);
    assert_eq!(v["levels"].as_array().unwrap().len(), 4);
}

#[test]
fn serre_chart_rendered() {
    let (code, out, _) = call(&[
        "serre-ss", "--base", "K(1,2)", "--fiber", "1,3", "--k", "Sq[2]i2", "--max-deg", "7", "--chart",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("E_2"), "{out}");
    assert!(out.contains("degree 6"), "{out}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(call(&["classify2", "--A", "1,3", "--B", "1,2"]).0, EXIT_USAGE);
    assert_eq!(call(&["classify2", "--A", "x", "--B", "1,3"]).0, EXIT_USAGE);
    assert_eq!(call(&["em-basis", "--n", "0", "--deg", "3"]).0, EXIT_USAGE);
    assert_eq!(call(&["kunneth", "--space", "K(1,", "--deg", "3"]).0, EXIT_USAGE);
    assert_eq!(call(&["serre-ss", "--base", "K(1,2)", "--fiber", "1,3", "--k", "i3", "--max-deg", "5"]).0, EXIT_USAGE);
    assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
}

#[test]
fn cache_file_written_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bases.json");
    let p = path.to_str().unwrap();
    let first = call(&["em-basis", "--n", "3", "--deg", "6", "--cache", p]);
    assert_eq!(first.0, EXIT_OK);
    assert!(path.exists());
    let second = call(&["em-basis", "--n", "3", "--deg", "6", "--cache", p]);
    assert_eq!(first.1, second.1);
}

#[test]
fn binary_honours_cache_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_postnikov"))
        .args(["kunneth", "--space", "K(1,2)xK(1,3)", "--deg", "6", "--format", "json"])
        .env(postnikov_cli::CACHE_ENV, dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("bases.json").exists());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["degrees"][0]["degree"], 6);
}

#[test]
fn binary_exit_codes() {
    let bad = Command::new(env!("CARGO_BIN_EXE_postnikov"))
        .args(["classify3", "--A", "1,2", "--B", "1,3"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
}
