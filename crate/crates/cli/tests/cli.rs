//! End-to-end checks of the command-line surface: canonical invocations,
//! exit codes, and report determinism.

use std::process::{Command, Output};

fn endomon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_endomon"))
        .args(args)
        .env_remove("ENDOMON_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn census_normalized_reports_17_classes() {
    let out = endomon(&["census", "normalized", "--p", "2", "--lambda", "1,0"]);
    let json = stdout_json(&out);
    assert_eq!(json["normalized_count"], 17);
    assert_eq!(json["schema_version"], 1);
    assert_eq!(json["generator_into_center_shortcut"], false);
}

#[test]
fn orbit_census_rank_formula_total() {
    let out = endomon(&["orbits", "census", "--p", "2", "--lambda", "1,1"]);
    let json = stdout_json(&out);
    assert_eq!(json["total_orbits"], 194048);
    assert_eq!(json["histogram"]["256"], 1536);
}

#[test]
fn orbit_census_csv_histogram() {
    let out = endomon(&["orbits", "census", "--p", "2", "--lambda", "1,0", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text, "length,count\n1,131072\n16,61440\n");
}

#[test]
fn group_pow_reaches_identity_at_p_squared() {
    let out = endomon(&[
        "group", "pow", "--p", "3", "--lambda", "0,1", "--element", "1,0,0,0|0,0,0,0", "--n", "9",
    ]);
    let json = stdout_json(&out);
    assert_eq!(json["power"], "0,0,0,0|0,0,0,0");
}

#[test]
fn tables_markdown_mirrors_the_composition_table() {
    let out = endomon(&["census", "tables", "--format", "markdown"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("phi_5+M1"));
    assert!(text.contains("image of b2"));
}

#[test]
fn sampling_commands_require_a_seed() {
    let out = endomon(&["census", "theorem1", "--p", "2", "--lambda", "0,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_lambda_is_a_config_error() {
    let out = endomon(&["group", "info", "--p", "3", "--lambda", "2,2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_check_exits_one() {
    // The (2,(1,1)) spot check finds rank-formula/closure mismatches.
    let out = endomon(&[
        "orbits", "spot-check", "--p", "2", "--lambda", "1,1", "--count", "30", "--seed", "7",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).expect("JSON report");
    assert!(json["mismatches"].as_array().is_some_and(|m| !m.is_empty()));
}

#[test]
fn reports_are_byte_identical_across_parallelism() {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_endomon"))
            .args(["census", "theorem1", "--p", "2", "--lambda", "0,1", "--pairs", "20000",
                "--seed", "42"])
            .env("ENDOMON_THREADS", threads)
            .output()
            .expect("binary runs");
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run("1"), run("2"));
}
