use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name].iter().collect();
    path.to_string_lossy().into_owned()
}

fn tsr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsr")).args(args).output().expect("run tsr")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = tsr(&full);
    (out.status.code().unwrap(), serde_json::from_slice(&out.stdout).expect("valid json"))
}

#[test]
fn refinement_holds_exits_zero() {
    let out = tsr(&["refine", &fixture("t_a.tsr"), &fixture("t_c.tsr")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("refinement: holds"));
}

#[test]
fn safe_refinement_failure_reports_deadlock() {
    let out = tsr(&["refine", "--safe", "--oracle", &fixture("t_a.tsr"), &fixture("t_c.tsr")]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("DeadlockNotReflected"));
    assert!(text.contains("oracle: agrees"));
    assert_eq!(text.lines().last(), Some("counterexample: prescribe"));
}

#[test]
fn response_growth_failure_names_the_action() {
    let out = tsr(&["refine", &fixture("t_b.tsr"), &fixture("t_c.tsr")]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("violation: ResponseNotGrown at (s1,s1) on sign"));
    assert_eq!(text.lines().last(), Some("counterexample: prescribe"));
}

#[test]
fn human_and_json_verdicts_agree() {
    let cases: Vec<Vec<String>> = vec![
        vec!["refine".into(), fixture("t_a.tsr"), fixture("t_b.tsr")],
        vec!["refine".into(), fixture("t_b.tsr"), fixture("t_c.tsr")],
        vec!["refine".into(), "--safe".into(), fixture("t_a.tsr"), fixture("t_c.tsr")],
        vec!["lang".into(), "includes".into(), fixture("t_b.tsr"), fixture("t_a.tsr")],
        vec!["lang".into(), "equiv".into(), fixture("t_a.tsr"), fixture("t_a.tsr")],
        vec!["lang".into(), "empty".into(), fixture("t_a.tsr")],
        vec!["modal".into(), fixture("t_b.tsr")],
        vec!["deadlocks".into(), fixture("t_c.tsr")],
        vec!["iso".into(), fixture("m_med.mixts"), fixture("t_a.tsr")],
    ];
    for case in cases {
        let args: Vec<&str> = case.iter().map(String::as_str).collect();
        let human = tsr(&args);
        let (code, value) = json(&args);
        assert_eq!(human.status.code(), Some(code), "{args:?}");
        let text = stdout(&human);
        if let Some(trace) = value.get("counterexample").and_then(|c| c.get("trace").or(Some(c))) {
            if let Some(words) = trace.as_array() {
                let rendered: Vec<&str> = words.iter().map(|w| w.as_str().unwrap()).collect();
                let expected = format!("counterexample: {}", rendered.join(" "));
                assert_eq!(text.lines().last().map(str::trim_end), Some(expected.trim_end()), "{args:?}");
            }
        }
    }
}

#[test]
fn language_inclusion_witness() {
    let (code, value) = json(&["lang", "includes", &fixture("t_b.tsr"), &fixture("t_a.tsr")]);
    assert_eq!(code, 1);
    assert_eq!(value["counterexample"], serde_json::json!(["prescribe", "cancel"]));
}

#[test]
fn empty_language() {
    assert_eq!(tsr(&["lang", "empty", &fixture("ce_left.tsr")]).status.code(), Some(0));
    assert_eq!(tsr(&["lang", "empty", &fixture("t_c.tsr")]).status.code(), Some(1));
}

#[test]
fn membership_splits_on_whitespace() {
    let file = fixture("t_b.tsr");
    assert_eq!(tsr(&["lang", "member", &file, "prescribe sign", "give"]).status.code(), Some(0));
    assert_eq!(tsr(&["lang", "member", &file, "prescribe"]).status.code(), Some(1));
    assert_eq!(tsr(&["lang", "member", &file, "fly"]).status.code(), Some(2));
}

#[test]
fn enumeration_lists_words_in_order() {
    let out = tsr(&["lang", "enum", &fixture("t_b.tsr"), "--maxlen", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "ε\nprescribe sign give\nprescribe sign dont_trust cancel\n");
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("garbage.tsr");
    std::fs::write(&path, "this is not a system\n").unwrap();
    let out = tsr(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":1:"));
    assert_eq!(tsr(&["check", "/nonexistent/file.tsr"]).status.code(), Some(2));
    assert_eq!(tsr(&["refine", &fixture("t_a.tsr")]).status.code(), Some(2));
    assert_eq!(tsr(&["refine", &fixture("t_a.tsr"), &fixture("m_med.mixts")]).status.code(), Some(2));
}

#[test]
fn conversion_roundtrip_is_isomorphic() {
    let dir = tempfile::tempdir().unwrap();
    let tsr_path = dir.path().join("back.tsr");
    let mix_path = dir.path().join("again.mixts");
    let out = tsr(&["convert", &fixture("m_med.mixts"), "--to", "tsr", "-o", tsr_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = tsr(&["convert", tsr_path.to_str().unwrap(), "--to", "mixts", "-o", mix_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = tsr(&["iso", &fixture("m_med.mixts"), mix_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn fmt_in_place_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.tsr");
    std::fs::copy(fixture("t_a.tsr"), &path).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(tsr(&["fmt", "--in-place", p]).status.code(), Some(0));
    let once = std::fs::read_to_string(&path).unwrap();
    assert_eq!(tsr(&["fmt", "-i", p]).status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), once);
    assert_eq!(stdout(&tsr(&["fmt", p])), once);
}

#[test]
fn mixed_refinement_and_canon() {
    let out = tsr(&["refine", &fixture("m_med.mixts"), &fixture("m_med.mixts")]);
    assert_eq!(out.status.code(), Some(0));
    let out = tsr(&["canon", &fixture("m_med.mixts")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("kind mixts"));
    assert_eq!(tsr(&["canon", &fixture("t_a.tsr")]).status.code(), Some(2));
    assert_eq!(tsr(&["modal", &fixture("m_med.mixts")]).status.code(), Some(1));
}

#[test]
fn dot_output() {
    let out = tsr(&["dot", &fixture("m_med.mixts")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("digraph"));
    assert!(text.contains("style=dashed"));
}
