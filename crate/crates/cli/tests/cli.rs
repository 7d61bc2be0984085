use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn models() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn model(name: &str) -> String {
    models().join(name).to_str().unwrap().to_string()
}

fn tripos(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_tripos")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn verify_passes_on_the_subset_tripos() {
    let (code, out, _) = tripos(&["verify", "--model", &model("finset-subset.toml"), "--max-size", "2"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("[PASS] beck-chevalley"));
    assert!(!out.contains("[FAIL]"));
}

#[test]
fn corrupted_table_fails_with_a_witness() {
    let (code, out, _) = tripos(&["verify", "--model", &model("broken-residuation.alg")]);
    assert_eq!(code, 1);
    assert!(out.contains("[FAIL] algebra-tables"));
    assert!(out.contains("residuation="));
}

#[test]
fn small_budget_on_a_large_request_is_exit_3() {
    let (code, _, err) = tripos(&["verify", "--model", &model("chain2.toml"), "--max-size", "4", "--budget", "10"]);
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("budget"));
}

#[test]
fn syntax_errors_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.alg");
    fs::write(&path, "algebra bad\nelements 0 1\nleq 0 2\n").unwrap();
    let (code, _, err) = tripos(&["verify", "--model", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 3"), "{err}");

    let spec = dir.path().join("bad.toml");
    fs::write(&spec, "kind = \"h-valued\"\nalgebra = \"builtin:chain2\"\ncolour = \"red\"\n").unwrap();
    assert_eq!(tripos(&["verify", "--model", spec.to_str().unwrap()]).0, 2);
    assert_eq!(tripos(&["verify", "--model", "does-not-exist.toml"]).0, 2);
    assert_eq!(tripos(&["verify", "--model", &model("chain2.toml"), "--max-size", "0"]).0, 2);
    assert_eq!(tripos(&["frobnicate"]).0, 2);
}

#[test]
fn stages_must_respect_the_pipeline_order() {
    let (code, _, err) = tripos(&["pipeline", "--model", &model("chain2.toml"), "--stages", "q,c"]);
    assert_eq!(code, 2);
    assert!(err.contains("out of order"));
    assert_eq!(tripos(&["pipeline", "--model", &model("chain2.toml"), "--stages", "c,x"]).0, 2);
}

#[test]
fn pipeline_needs_a_tripos() {
    let (code, _, err) = tripos(&["pipeline", "--model", &model("subobject.toml"), "--max-size", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("not a tripos"));
}

#[test]
fn export_without_a_trace_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = tripos(&["export", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("no trace"));
}

fn trace(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("trace.json")).unwrap()).unwrap()
}

fn check<'a>(stage: &'a Value, name: &str) -> &'a Value {
    stage["checks"].as_array().unwrap().iter().find(|c| c["check"] == name).unwrap()
}

#[test]
fn quotients_alone_are_not_extensional() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, _, _) =
        tripos(&["pipeline", "--model", &model("chain2.toml"), "--max-size", "2", "--stages", "c,q", "--out", out]);
    assert_eq!(code, 0);
    let t = trace(dir.path());
    let stages = t["stages"].as_array().unwrap();
    assert_eq!(stages.len(), 3);
    let q = &stages[2];
    assert_eq!(q["stage"], "q");
    let ext = check(q, "extensional");
    assert_eq!(ext["expected"], false);
    assert!(ext["failures"].as_u64().unwrap() > 0);
    let w = ext["witnesses"][0].to_string();
    assert!(w.contains("[1 1 1 1]"), "{w}");
    assert!(check(q, "effective-quotients")["failures"] == 0);
    // before the quotient stage there is no A/⊤ and extensionality holds
    assert_eq!(check(&stages[1], "extensional")["failures"], 0);
}

#[test]
fn structured_output_is_deterministic_and_matches_the_human_report() {
    let args = ["verify", "--model", &model("chain3.toml"), "--max-size", "2"];
    let (_, human, _) = tripos(&args);
    let run = || tripos(&[&args[..], &["--format", "structured"]].concat()).1;
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    for r in v["reports"].as_array().unwrap() {
        let line = format!("[PASS] {} ({} cases)", r["check"].as_str().unwrap(), r["cases"]);
        assert!(human.contains(&line), "{line}");
    }
}

#[test]
fn golden_export_after_the_two_chain_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, _, err) = tripos(&[
        "pipeline",
        "--model",
        &model("chain2.toml"),
        "--max-size",
        "2",
        "--format",
        "structured",
        "--out",
        out,
    ]);
    assert_eq!(code, 0, "{err}");
    let t = trace(dir.path());
    assert_eq!(t["topos"]["structure"]["terminal"].as_str().unwrap(), "((1,[1])/[1])");
    assert_eq!(tripos(&["export", "--out", out, "--format", "structured"]).0, 0);
    assert_eq!(tripos(&["export", "--out", out]).0, 0);
    for name in ["fragment.json", "fragment.dot", "fragment.txt"] {
        let got = fs::read_to_string(dir.path().join(name)).unwrap();
        let path = golden(&format!("chain2-{name}"));
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            fs::create_dir_all(path.parent().unwrap()).unwrap();
            fs::write(&path, &got).unwrap();
        }
        assert_eq!(got, fs::read_to_string(&path).unwrap(), "{name}");
    }
}
