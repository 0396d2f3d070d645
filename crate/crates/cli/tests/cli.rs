use std::process::{Command, Output};

use serde_json::Value;
use staircase_core::{Status, VerificationReport};

fn staircase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_staircase"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn weights_json() {
    let out = staircase(&["--format", "json", "weights", "55/8"]);
    assert_eq!(code(&out), 0);
    let j = json_of(&out);
    assert_eq!(j["continued_fraction"], "[6; 1, 7]");
    assert_eq!(j["sum_squares"], "440");
    assert_eq!(j["blocks"][0]["value"], "8");
    assert_eq!(j["blocks"][0]["count"], "6");
}

#[test]
fn sequences_and_identities() {
    let out = staircase(&["--format", "json", "seq", "--n-max", "3"]);
    assert_eq!(code(&out), 0);
    let rows = json_of(&out);
    assert_eq!(rows[1]["b"], "55/8");
    assert_eq!(rows[1]["mu"], "21/8");
    assert_eq!(rows[2]["ell"], "48");

    let out = staircase(&["seq", "--identity", "nine_ell", "--n", "7"]);
    assert_eq!(code(&out), 0);
    let out = staircase(&["seq", "--identity", "no_such", "--n", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn cremona_paths_and_exit_codes() {
    let out = staircase(&["--format", "json", "cremona", "3;2,1,1,1,1,1,1"]);
    assert_eq!(code(&out), 0);
    let j = json_of(&out);
    assert_eq!(j["reduced"], "(1; 1^2)");
    assert_eq!(j["termination"], "terminal");
    assert_eq!(j["steps"].as_array().unwrap().len(), 2);

    // a negative multiplicity is reported as a violation
    let out = staircase(&["cremona", "1;2"]);
    assert_eq!(code(&out), 1);

    let out = staircase(&["cremona", "not a class"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn grading_and_partition() {
    let out = staircase(&["--format", "json", "grade", "1", "6", "--b", "55/8+eps", "--lattice"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("308"));

    let out = staircase(&["--format", "json", "partition", "pos", "1/(55/8+eps)", "4"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).replace([' ', '\n'], "").contains("[1,1,1,1]"));
}

#[test]
fn index_of_model_curve() {
    let curve = r#"{"level":"blowup_e","z":[6,6,6,6,6,6,6,1,1,1,1,1,1,1],
        "positive":{"beta1":[1],"beta2":[6]},"x":"55/8+eps"}"#;
    let out = staircase(&["--format", "json", "index", "e", "--json", curve]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let s = String::from_utf8_lossy(&out.stdout);
    assert!(s.contains("\"ech_index\": \"0\""), "{s}");
    assert!(s.contains("\"fredholm_index\": \"0\""), "{s}");
}

#[test]
fn verify_pass_fail_and_list() {
    let out = staircase(&["verify", "--list"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("lem:WcM"));

    let out = staircase(&["--format", "json", "verify", "lem:WcM", "eqn:s=2", "--no-timing"]);
    assert_eq!(code(&out), 0);
    let reports: Vec<VerificationReport> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(reports.len(), 2);
    assert!(reports.iter().all(|r| r.status == Status::Pass && r.millis == 0));

    let out = staircase(&["--format", "json", "verify", "eqn:s=2", "--n", "0..3", "--no-timing"]);
    assert_eq!(code(&out), 1);
    let reports: Vec<VerificationReport> = serde_json::from_slice(&out.stdout).unwrap();
    let w = reports[0].witness.as_ref().unwrap();
    assert_eq!(w["n"], 0);
    assert_eq!(w["split"], serde_json::json!([1, 7]));

    let out = staircase(&["verify", "no:such"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_csv_has_header() {
    let out = staircase(&["--format", "csv", "verify", "eq:estim", "--no-timing"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("check,params,status,witness,millis"));
    assert_eq!(lines.next(), Some("eq:estim,-,pass,,0"));
}

#[test]
fn output_is_independent_of_jobs() {
    let args = |j: &'static str| {
        vec!["--jobs", j, "--format", "json", "verify", "cor:weight", "lem:R", "eq:gr", "le:bottomend", "--no-timing"]
    };
    let one = staircase(&args("1"));
    let four = staircase(&args("4"));
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&staircase(&["frobnicate"])), 2);
    assert_eq!(code(&staircase(&["weights", "-3/2"])), 2);
    assert_eq!(code(&staircase(&["area", "55/8+eps", "notanumber"])), 2);
    assert_eq!(code(&staircase(&["--help"])), 0);
}
