//! Black-box tests of the command-line binary: exit codes, output shapes,
//! and determinism.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crosseq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn prove_exit_codes() {
    let out = run(&["prove", "[a]p -> p"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "valid");

    let out = run(&["prove", "p -> [a]p", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["result"], "refuted");
    assert_eq!(v["model"]["worlds"].as_array().unwrap().len(), 2);

    let out = run(&["prove", "p -> ("]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["prove", "p", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn countermodel_exit_codes() {
    let out = run(&["countermodel", "p -> [a]p", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["result"], "countermodel");

    let out = run(&["countermodel", "[a]p -> p"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn interpolate_reproduces_contract_example() {
    let out = run(&["interpolate", "true", "[a]p | <a>~p", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["interpolant"], "true");
    assert_eq!(v["preRepair"], "[a]true");
    for flag in ["leftImp", "rightImp", "varPlus", "varMinus", "agents"] {
        assert_eq!(v["checks"][flag], true, "{flag}");
    }

    let out = run(&["interpolate", "p", "[a]p"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn checkmodel_reads_model_json() {
    let dir = std::env::temp_dir();
    let path = dir.join("crosseq_cli_test_model.json");
    std::fs::write(
        &path,
        r#"{"worlds":[0,1],"relations":{"a":[[0,1]]},"valuation":{"p":[0]}}"#,
    )
    .unwrap();
    let path = path.to_str().unwrap();

    let out = run(&["checkmodel", path, "0", "p"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "true");

    let out = run(&["checkmodel", path, "1", "p"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).trim(), "false");

    // box over the one a-block: false at both worlds
    let out = run(&["checkmodel", path, "0", "[a]p", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).trim(), r#"{"value":false}"#);

    let out = run(&["checkmodel", path, "7", "p"]);
    assert_eq!(out.status.code(), Some(2));

    let bad = dir.join("crosseq_cli_test_bad_model.json");
    std::fs::write(&bad, r#"{"worlds":[0],"relations":{"a":[[0,9]]},"valuation":{}}"#).unwrap();
    let out = run(&["checkmodel", bad.to_str().unwrap(), "0", "p"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dot_output_is_restricted_and_wellformed() {
    let out = run(&["prove", "[a]p -> p", "--format", "dot"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("digraph proof {"));

    let out = run(&["countermodel", "p -> [a]p", "--format", "dot"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("digraph model {"));

    let out = run(&["interpolate", "p", "p", "--format", "dot"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_output_is_deterministic() {
    let a = run(&["prove", "p -> [b]p", "--format", "json"]);
    let b = run(&["prove", "p -> [b]p", "--format", "json"]);
    assert_eq!(stdout(&a), stdout(&b));

    let a = run(&["interpolate", "p & q", "q | r", "--format", "json"]);
    let b = run(&["interpolate", "p & q", "q | r", "--format", "json"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest", "--seed", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["passed"], true, "{v}");
    assert_eq!(out.status.code(), Some(0));
}
