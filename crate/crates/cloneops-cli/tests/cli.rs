//! End-to-end tests of the binary: report schema, determinism, exit codes
//! and the eval task file.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cloneops"))
        .args(args)
        .env_remove("CLONEOPS_SEED")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON report")
}

#[test]
fn fincard_suite_passes_with_schema() {
    let out = run(&["verify", "fincard", "--trials", "100", "--seed", "7"]);
    assert!(out.status.success());
    let report = json_of(&out);
    assert_eq!(report["command"], "verify fincard");
    assert_eq!(report["status"], "pass");
    assert_eq!(report["params"]["seed"], 7);
    assert!(report["counterexample"].is_null());
    assert!(report["checked"].as_u64().unwrap() > 0);
    assert!(report["elapsed_ms"].is_number());
    assert_eq!(report["version"], cloneops::VERSION);
}

#[test]
fn same_seed_gives_byte_identical_reports_modulo_elapsed() {
    let args = ["verify", "fincard", "--trials", "50", "--seed", "11"];
    let mut a = json_of(&run(&args));
    let mut b = json_of(&run(&args));
    a["elapsed_ms"] = 0.into();
    b["elapsed_ms"] = 0.into();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn seed_env_var_is_used_but_flag_wins() {
    let with_env = Command::new(env!("CARGO_BIN_EXE_cloneops"))
        .args(["verify", "fincard", "--trials", "10"])
        .env("CLONEOPS_SEED", "123")
        .output()
        .unwrap();
    assert_eq!(json_of(&with_env)["params"]["seed"], 123);

    let flag_wins = Command::new(env!("CARGO_BIN_EXE_cloneops"))
        .args(["verify", "fincard", "--trials", "10", "--seed", "5"])
        .env("CLONEOPS_SEED", "123")
        .output()
        .unwrap();
    assert_eq!(json_of(&flag_wins)["params"]["seed"], 5);
}

#[test]
fn clone_axioms_report_failure_with_exit_one() {
    // the associativity counterexample is found and reported
    let out = run(&[
        "verify",
        "clone-axioms",
        "--q",
        "2",
        "--n",
        "3",
        "--m",
        "3",
        "--trials",
        "1000",
        "--seed",
        "42",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report = json_of(&out);
    assert_eq!(report["status"], "fail");
    assert_eq!(report["counterexample"]["axiom"], 3);
}

#[test]
fn set_clone_and_lemmas_pass() {
    let out = run(&["verify", "set-clone", "--size", "2", "--max-arity", "2"]);
    assert!(out.status.success());
    assert_eq!(json_of(&out)["status"], "pass");

    let out = run(&[
        "verify", "lemmas", "--q", "2", "--n", "1", "--coeff-bound", "1", "--trials", "50",
        "--seed", "3",
    ]);
    assert!(out.status.success());
}

#[test]
fn classification_detects_hopf_mode_failure() {
    let out = run(&["verify", "classification", "--q", "2", "--n", "1", "--coeff-bound", "1"]);
    assert!(out.status.success());

    let out = run(&["verify", "classification", "--q", "1", "--n", "1", "--coeff-bound", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let report = json_of(&out);
    assert_eq!(report["counterexample"]["witness_classifiable"], false);
}

#[test]
fn hopf_demo_payload() {
    let out = run(&["hopf", "demo"]);
    assert!(out.status.success());
    let report = json_of(&out);
    assert_eq!(report["status"], "pass");
    assert_eq!(report["detail"]["witness_difference"], "2*t{1}x{1}");
    assert_eq!(report["detail"]["comultiplication_is_morphism"], true);
    assert_eq!(report["detail"]["contraction_is_morphism"], false);
}

#[test]
fn eval_echoes_projection_substitution() {
    // π_1 • (π_1) echoes π_1
    let dir = std::env::temp_dir().join("cloneops-eval-test");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("tasks.json");
    std::fs::write(
        &file,
        serde_json::json!({
            "tasks": [
                {"op": "bullet",
                 "phi": {"q": 2, "n": 1, "t": "t{1}x{}", "x": "t{}x{1}"},
                 "psis": [{"q": 2, "n": 1, "t": "t{1}x{}", "x": "t{}x{1}"}]},
                {"op": "mul", "n": 1, "q": 2, "a": "t{}x{1}", "b": "t{1}x{}"}
            ]
        })
        .to_string(),
    )
    .unwrap();
    let out = run(&["eval", "--file", file.to_str().unwrap()]);
    assert!(out.status.success());
    let report = json_of(&out);
    let results = report["detail"].as_array().unwrap();
    assert_eq!(results[0]["result"]["t"], "t{1}x{}");
    assert_eq!(results[0]["result"]["x"], "t{}x{1}");
    assert_eq!(results[1]["result"], "-1*t{1}x{1}");
}

#[test]
fn parse_errors_exit_two() {
    let out = run(&["verify", "clone-axioms", "--q", "four"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["verify", "clone-axioms", "--q", "4"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["eval", "--file", "/nonexistent/tasks.json"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = std::env::temp_dir().join("cloneops-eval-test");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("bad.json");
    std::fs::write(&file, "{not json").unwrap();
    let out = run(&["eval", "--file", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
