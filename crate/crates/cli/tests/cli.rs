//! End-to-end tests of the command-line interface: frozen examples for each
//! subcommand, exit-code conventions, JSON round trips, and deterministic
//! census output.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_eisenstein"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("failed to launch the binary")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is text")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is text")
}

#[test]
fn invariants_quartic_example() {
    let out = run(&["invariants", "T^4+2", "--p", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("breaks: 2, 4"), "{text}");
    assert!(text.contains("different exponent: 11"), "{text}");
    assert!(text.contains("automorphisms: 2"), "{text}");
}

#[test]
fn invariants_quadratic_example() {
    let out = run(&["invariants", "T^2+2*T+2", "--p", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("breaks: 1\n"), "{text}");
    assert!(text.contains("different exponent: 2"), "{text}");
    assert!(text.contains("automorphisms: 2"), "{text}");
}

#[test]
fn reduce_square_class_example() {
    let out = run(&["reduce", "T^2-2", "--p", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "T^2+4*T+2\n");

    let out = run(&["reduce", "T^2-2", "--p", "2", "--all"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "T^2+4*T+2: 2\n");
}

#[test]
fn reduce_fixed_point() {
    let out = run(&["reduce", "T^2+2*T+2", "--p", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "T^2+2*T+2\n");
}

#[test]
fn identify_exit_codes_and_reasons() {
    // The same square class: isomorphic, exit 0.
    let out = run(&["identify", "T^2-2", "T^2+4*T+2", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("isomorphic"), "{}", stdout(&out));

    // Different classes with the same polygon: ruled out by the residual,
    // exit 1 with the firing criterion named.
    let out = run(&["identify", "T^2+2*T+2", "T^2+2*T+6", "--p", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("non-isomorphic ("), "{}", stdout(&out));

    // Different polygons: ruled out immediately.
    let out = run(&["identify", "T^2+2*T+2", "T^2+2", "--p", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("polygon"), "{}", stdout(&out));

    // Identical input: exit 0.
    let out = run(&["identify", "T^3+3", "T^3+3", "--p", "3"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn enumerate_quadratics_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("census.jsonl");
    let arg = path.to_str().unwrap();
    let first = run(&["enumerate", "2", "--p", "2", "--out", arg]);
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(stdout(&first).contains("classes: 6"), "{}", stdout(&first));
    assert!(stdout(&first).contains("mass: 2"), "{}", stdout(&first));
    let body = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines.len(), 6);
    for line in &lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let aut = v["aut"].as_u64().unwrap();
        let b = v["B"].as_u64().unwrap();
        let reduced = v["reduced"].as_array().unwrap();
        assert_eq!(b, aut * reduced.len() as u64);
        assert_eq!(v["n"], 2);
    }
    // Byte-identical on a second run.
    let second = run(&["enumerate", "2", "--p", "2", "--out", arg]);
    assert!(second.status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), body);
}

#[test]
fn enumerate_rejects_degree_one() {
    let out = run(&["enumerate", "1", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
}

fn write_spec(dir: &Path, name: &str, pi_digits: &str) -> String {
    let path = dir.join(name);
    let spec = format!(
        r#"{{"base":{{"p":2,"f":1,"char":0,"prec":10,"modulus":[0,1]}},"pi_N":{pi_digits},"tame_order":1,"wild":[{{"u":1,"rows":[[1]]}}]}}"#
    );
    std::fs::write(&path, spec).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn classfield_quadratic_examples() {
    let dir = tempfile::tempdir().unwrap();
    // Designated norm 2 with one level-1 condition.
    let spec = write_spec(dir.path(), "two.json", "[[0],[1]]");
    let out = run(&["classfield", &spec]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "T^2+2*T+2\n");

    // Designated norm -2 (digits of -2 in base 2: 0, then all ones).
    let spec = write_spec(
        dir.path(),
        "minus-two.json",
        "[[0],[1],[1],[1],[1],[1],[1],[1],[1],[1]]",
    );
    let out = run(&["classfield", &spec]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "T^2+2*T-2\n");
}

#[test]
fn classfield_writes_a_readable_record() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(dir.path(), "two.json", "[[0],[1]]");
    let record = dir.path().join("result.json");
    let out = run(&["classfield", &spec, "--out", record.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    // The record feeds back into the polynomial-input commands.
    let out = run(&["invariants", record.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("breaks: 1"), "{text}");
    assert!(text.contains("automorphisms: 2"), "{text}");
}

#[test]
fn reduce_record_feeds_identify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("reduced.json");
    let out = run(&["reduce", "T^2-2", "--p", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let out = run(&["identify", path.to_str().unwrap(), "T^2-2", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn malformed_inputs_exit_with_code_two() {
    // Broken syntax.
    let out = run(&["reduce", "T^2+", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("position"), "{}", stderr(&out));
    // Text input without a residue characteristic.
    let out = run(&["reduce", "T^2+2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--p"), "{}", stderr(&out));
    // Not Eisenstein.
    let out = run(&["invariants", "T^2+1", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Eisenstein"), "{}", stderr(&out));
    // Not monic.
    let out = run(&["invariants", "2*T^2+2", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("monic"), "{}", stderr(&out));
}
