//! End-to-end checks of the `rank1` binary: exit codes, fixtures, JSON
//! determinism, and schedule-file ingestion.

use std::path::PathBuf;
use std::process::{Command, Output};

fn rank1(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rank1"))
        .args(args)
        .env_remove("RANK1_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn word_fixture_and_success_exit() {
    let out = rank1(&["word", "--preset", "chacon", "--stage", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "0010001010010");
}

#[test]
fn usage_errors_exit_64() {
    let out = rank1(&["word", "--preset", "chacon", "--stage", "-1"]);
    assert_eq!(out.status.code(), Some(64));

    let out = rank1(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(64));

    let out = rank1(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn computation_errors_exit_1() {
    // repeating schedule without the override
    let out = rank1(&["language", "--preset", "odometer2", "--max-len", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));

    let out = rank1(&[
        "language",
        "--preset",
        "odometer2",
        "--max-len",
        "4",
        "--allow-repeating",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn probe_is_deterministic_and_clean_on_chacon() {
    let args = [
        "probe",
        "--preset",
        "chacon",
        "--radius",
        "2",
        "--test-len",
        "24",
        "--inverse-radius",
        "3",
        "--json",
    ];
    let first = rank1(&args);
    assert_eq!(first.status.code(), Some(0));
    let second = rank1(&args);
    assert_eq!(first.stdout, second.stdout, "JSON output must be byte-identical");

    let doc: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(doc["schema"], "rank1/v1");
    assert_eq!(doc["command"], "probe");
    assert_eq!(doc["report"]["exotic_count"], 0);
    assert_eq!(doc["report"]["invertible"], 5);
}

#[test]
fn probe_exits_2_on_exotic_survivor() {
    let path = temp_schedule(
        "periodic2",
        r#"{"h0":1,"stages":[{"q":2,"spacers":[1]}],"tail":{"mode":"repeat-last"}}"#,
    );
    let out = rank1(&[
        "probe",
        "--schedule",
        path.to_str().unwrap(),
        "--radius",
        "0",
        "--test-len",
        "8",
        "--inverse-radius",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2), "exotic finding must exit 2");
    assert!(stdout(&out).contains("EXOTIC"));
    // warning about the repeating schedule goes to stderr
    assert!(String::from_utf8_lossy(&out.stderr).contains("repeating"));
    std::fs::remove_file(path).ok();
}

#[test]
fn schedule_files_load() {
    let path = temp_schedule(
        "chacon-file",
        r#"{"h0":1,"stages":[{"q":3,"spacers":[0,1]}],"tail":{"mode":"repeat-last"}}"#,
    );
    let out = rank1(&["height", "--schedule", path.to_str().unwrap(), "--stage", "5"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "364");

    let bad = temp_schedule(
        "bad",
        r#"{"h0":1,"stages":[{"q":1,"spacers":[]}],"tail":{"mode":"repeat-last"}}"#,
    );
    let out = rank1(&["validate", "--schedule", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_file(path).ok();
    std::fs::remove_file(bad).ok();
}

#[test]
fn expected_positions_as_json() {
    let out = rank1(&[
        "expected",
        "--preset",
        "chacon",
        "--upper",
        "3",
        "--lower",
        "1",
        "--json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        doc["report"]["positions"],
        serde_json::json!([0, 4, 9, 13, 17, 22, 27, 31, 36])
    );
}

#[test]
fn occurrences_scan() {
    let out = rank1(&[
        "occurrences",
        "--haystack",
        "001000010010010000100",
        "--needle",
        "00100",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "occurrences: 0 5 8 11 16");
}

#[test]
fn budget_env_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_rank1"))
        .args(["word", "--preset", "chacon", "--stage", "8"])
        .env("RANK1_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget exceeded"));
}

fn temp_schedule(tag: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!(
        "rank1-test-{tag}-{}.json",
        std::process::id()
    ));
    std::fs::write(&path, contents).unwrap();
    path
}
