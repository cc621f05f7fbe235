//! End-to-end checks of the `lyapcert` binary: subcommand outputs, the
//! exit-code contract, and byte determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn binary() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_lyapcert"))
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("lyapcert-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn triad_scalar_document() {
    let file = write_temp("scalar.json", r#"{"A": [[0.5]], "C": [[1]]}"#);
    let output = run(&["triad", file.to_str().unwrap()]);
    let value = stdout_json(&output);
    assert_eq!(value["stability"]["verdict"], true);
    assert_eq!(value["observability"]["verdict"], true);
    assert_eq!(value["lyapunov"]["positive_definite"], true);
    assert_eq!(value["consistency"], true);
    let q00 = value["lyapunov"]["direct"]["q"][0][0].as_f64().unwrap();
    assert!((q00 - 4.0 / 3.0).abs() <= 1e-10);
}

#[test]
fn triad_identity_document_is_consistent_with_all_false() {
    let file = write_temp("identity.json", r#"{"A": [[1, 0], [0, 1]], "C": [[1, 0]]}"#);
    let output = run(&["triad", file.to_str().unwrap()]);
    let value = stdout_json(&output);
    assert_eq!(value["stability"]["verdict"], false);
    assert_eq!(value["observability"]["verdict"], false);
    assert_eq!(value["lyapunov"]["positive_definite"], false);
    assert_eq!(value["lyapunov"]["direct"]["status"], "error");
    assert_eq!(value["consistency"], true);
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn triad_nilpotent_document() {
    let file = write_temp("nilpotent.json", r#"{"A": [[0, 1], [0, 0]], "C": [[1, 0]]}"#);
    let output = run(&["triad", file.to_str().unwrap()]);
    let value = stdout_json(&output);
    assert_eq!(value["stability"]["verdict"], true);
    assert_eq!(value["observability"]["verdict"], true);
    assert_eq!(value["lyapunov"]["positive_definite"], true);
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j { 1.0 } else { 0.0 };
            let got = value["lyapunov"]["direct"]["q"][i][j].as_f64().unwrap();
            assert!((got - want).abs() <= 1e-10);
        }
    }
}

#[test]
fn triad_text_format_lines() {
    let file = write_temp("scalar-text.json", r#"{"A": [[0.5]], "C": [[1]]}"#);
    let output = run(&["triad", file.to_str().unwrap(), "--format", "text"]);
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("(i)"));
    assert!(lines[1].starts_with("(ii)"));
    assert!(lines[2].starts_with("(iii)"));
}

#[test]
fn reports_are_byte_deterministic() {
    let file = write_temp(
        "deterministic.json",
        r#"{"A": [[0.3, 0.2, 0.0], [0.1, 0.4, 0.1], [0.0, 0.2, 0.5]], "C": [[1, 0, 1]]}"#,
    );
    let first = run(&["triad", file.to_str().unwrap()]);
    assert!(first.status.success());
    for _ in 0..2 {
        let again = run(&["triad", file.to_str().unwrap()]);
        assert_eq!(first.stdout, again.stdout);
    }
}

#[test]
fn input_errors_exit_one() {
    let missing = run(&["triad", "/nonexistent/not-here.json"]);
    assert_eq!(missing.status.code(), Some(1));

    let file = write_temp("bad-mode.json", r#"{"A": [[0.5]]}"#);
    let output = run(&["triad", file.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("exactly one of C, B, c required"));

    let file = write_temp("ragged.json", r#"{"A": [[1, 2], [3]], "C": [[1, 0]]}"#);
    let output = run(&["triad", file.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8(output.stderr).unwrap().contains("ragged matrix A"));
}

#[test]
fn solve_methods_agree_on_a_scalar_document() {
    let file = write_temp("solve.json", r#"{"A": [[0.5]], "C": [[1]]}"#);
    let mut values = Vec::new();
    for method in ["fixed-point", "direct", "series"] {
        let output = run(&["solve", file.to_str().unwrap(), "--method", method]);
        let value = stdout_json(&output);
        assert_eq!(value["method"], method);
        values.push(value["q"][0][0].as_f64().unwrap());
    }
    for v in &values {
        assert!((v - 4.0 / 3.0).abs() <= 1e-8);
    }
}

#[test]
fn solve_on_singular_system_exits_two() {
    let file = write_temp("singular.json", r#"{"A": [[1, 0], [0, 1]], "C": [[1, 0]]}"#);
    let output = run(&["solve", file.to_str().unwrap(), "--method", "direct"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8(output.stderr)
        .unwrap()
        .contains("numerical failure"));
}

#[test]
fn solve_fixed_point_reports_alpha_and_lambda() {
    let file = write_temp("solve-fp.json", r#"{"A": [[0.5]], "C": [[1]]}"#);
    let output = run(&["solve", file.to_str().unwrap(), "--method", "fixed-point"]);
    let value = stdout_json(&output);
    let alpha = value["alpha"].as_f64().unwrap();
    let lambda = value["lambda"].as_f64().unwrap();
    assert!((alpha - 0.75).abs() <= 1e-8);
    assert!((lambda - 1.0).abs() <= 1e-9);
}

#[test]
fn check_subcommands_report_verdicts() {
    let file = write_temp("checks.json", r#"{"A": [[0, 1], [0, 0]], "C": [[1, 0]]}"#);
    let stability = stdout_json(&run(&["check-stability", file.to_str().unwrap()]));
    assert_eq!(stability["stable"], true);
    assert!(stability["spectral_radius"].as_f64().unwrap().abs() <= 1e-12);

    let observability = stdout_json(&run(&["check-observability", file.to_str().unwrap()]));
    assert_eq!(observability["observable"], true);
    assert_eq!(observability["rank"], 2);
    assert_eq!(observability["n"], 2);
}

#[test]
fn b_mode_documents_are_dualized() {
    let file = write_temp("b-mode.json", r#"{"A": [[0.5, 0.2], [0.0, 0.3]], "B": [[1], [1]]}"#);
    let output = run(&["triad", file.to_str().unwrap()]);
    let value = stdout_json(&output);
    assert_eq!(value["stability"]["verdict"], true);
    // (A, B) controllable here, so the dual pair is observable.
    assert_eq!(value["observability"]["verdict"], true);
    assert_eq!(value["lyapunov"]["positive_definite"], true);
}

#[test]
fn positive_solve_reports_the_certificate() {
    let file = write_temp("positive.json", r#"{"A": [[0.0, 0.5], [0.5, 0.0]], "c": [1, 0]}"#);
    let output = run(&["positive-solve", file.to_str().unwrap()]);
    let value = stdout_json(&output);
    assert!((value["q"][0].as_f64().unwrap() - 4.0 / 3.0).abs() <= 1e-10);
    assert!((value["q"][1].as_f64().unwrap() - 2.0 / 3.0).abs() <= 1e-10);
    assert_eq!(value["positive"], true);

    // Negative entries violate the positive-systems input contract.
    let file = write_temp("negative.json", r#"{"A": [[-0.5]], "c": [1]}"#);
    let output = run(&["positive-solve", file.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));

    // Unstable positive systems are a numerical precondition failure.
    let file = write_temp("unstable-positive.json", r#"{"A": [[1.5]], "c": [1]}"#);
    let output = run(&["positive-solve", file.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));

    // positive-solve requires c-mode documents.
    let file = write_temp("not-positive.json", r#"{"A": [[0.5]], "C": [[1]]}"#);
    let output = run(&["positive-solve", file.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn theta_map_emits_csv() {
    let output = run(&[
        "theta-map", "--lambda", "1.2", "--gamma", "0.8", "--theta0", "0.5", "--steps", "4",
    ]);
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,theta");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("0,"));
    let theta1: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!((theta1 - 0.6).abs() <= 1e-12);
}
