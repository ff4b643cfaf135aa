//! End-to-end exit-code and output contract of the `safpat` binary.

use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_safpat"))
        .args(args)
        .output()
        .unwrap()
}

fn temp_file(name: &str, contents: &str) -> String {
    let path = std::env::temp_dir().join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn check_reports_model_summary() {
    let out = run(&["check", &fixture("acc.sp")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ok: 6 components, 4 channels, 5 hazards, 0 patterns"), "{text}");
}

#[test]
fn missing_file_exits_with_io_error() {
    let out = run(&["check", "/no/such/file.sp"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn syntax_error_exits_with_model_error_and_location() {
    let path = temp_file("safpat_bad_arity.sp", "cp(a).\nch(c1,a).\n");
    let out = run(&["check", &path]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap() + &String::from_utf8(out.stderr).unwrap();
    assert!(text.contains("2:"), "diagnostic without line number: {text}");
    assert!(text.contains("arity"), "{text}");
}

#[test]
fn analyze_distinguishes_complete_and_incomplete() {
    let open = run(&["analyze", &fixture("acc.sp")]);
    assert_eq!(open.status.code(), Some(3));
    let text = String::from_utf8(open.stdout).unwrap();
    assert!(text.contains("controlled 0/5"), "{text}");

    let closed = run(&["analyze", &fixture("acc_solution1.sp")]);
    assert_eq!(closed.status.code(), Some(0));
    let text = String::from_utf8(closed.stdout).unwrap();
    assert!(text.contains("controlled 5/5"), "{text}");
}

#[test]
fn analyze_accepts_assumptions() {
    let out = run(&["analyze", &fixture("bms.sp"), "--assume-controlled", "canerr"]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("canerr: controlled"), "{text}");
    assert!(text.contains("controlled 1/4"), "{text}");
}

#[test]
fn recommend_exit_codes_follow_search_outcome() {
    let complete = run(&["recommend", &fixture("acc.sp")]);
    assert_eq!(complete.status.code(), Some(0));
    let text = String::from_utf8(complete.stdout).unwrap();
    assert!(text.contains("scenarios evaluated: 64"), "{text}");

    // a watchdog alone cannot control the erroneous-value hazards
    let partial = run(&[
        "recommend",
        &fixture("acc.sp"),
        "--budget",
        "safMon=0",
        "--budget",
        "tmr=0",
        "--budget",
        "2Prog=0",
    ]);
    assert_eq!(partial.status.code(), Some(3));

    let capped = run(&["recommend", &fixture("acc.sp"), "--hard-cap", "2"]);
    assert_eq!(capped.status.code(), Some(4));
    assert!(!capped.stderr.is_empty());
}

#[test]
fn export_renders_dot_and_validates_scenario_index() {
    let dot = run(&["export", &fixture("acc.sp")]);
    assert_eq!(dot.status.code(), Some(0));
    let text = String::from_utf8(dot.stdout).unwrap();
    assert!(text.contains("digraph safpat"), "{text}");
    assert!(text.contains("subgraph \"cluster_acc\""), "{text}");

    let picked = run(&["export", &fixture("acc.sp"), "--scenario", "0"]);
    assert_eq!(picked.status.code(), Some(0));
    let text = String::from_utf8(picked.stdout).unwrap();
    assert!(text.contains("darkgray"), "{text}");

    let bad = run(&["export", &fixture("acc.sp"), "--scenario", "99"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn json_outputs_are_well_formed() {
    for (cmd, file, code) in [
        ("analyze", fixture("acc_solution1.sp"), 0),
        ("analyze", fixture("acc.sp"), 3),
        ("recommend", fixture("acc.sp"), 0),
        ("export", fixture("acc_solution1.sp"), 0),
    ] {
        let out = run(&[cmd, &file, "--format", "json"]);
        assert_eq!(out.status.code(), Some(code), "{cmd} {file}");
        let text = String::from_utf8(out.stdout).unwrap();
        serde_json::from_str::<serde_json::Value>(&text)
            .unwrap_or_else(|e| panic!("invalid json from {cmd} {file}: {e}\n{text}"));
    }
}
