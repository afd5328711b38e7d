//! End-to-end runs of the `ctcsim` binary: exit codes, determinism, report
//! schema and CSV layout.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn corpus(name: &str) -> String {
    root().join("corpus").join(name).display().to_string()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn ctcsim(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_ctcsim")).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(run: &Run) -> Value {
    serde_json::from_str(&run.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}\n{}", run.stdout, run.stderr))
}

fn schema_validator() -> jsonschema::Validator {
    let text = std::fs::read_to_string(root().join("schemas/report.schema.json")).unwrap();
    let schema: Value = serde_json::from_str(&text).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

fn assert_schema(report: &Value) {
    let v = schema_validator();
    let errors: Vec<String> = v.iter_errors(report).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "schema violations: {errors:#?}\n{report:#}");
}

fn csv_layout(kind: &str) -> Vec<(String, String)> {
    let text = std::fs::read_to_string(root().join("schemas/csv_columns.json")).unwrap();
    let all: Value = serde_json::from_str(&text).unwrap();
    all[kind]
        .as_array()
        .unwrap_or_else(|| panic!("no CSV layout {kind}"))
        .iter()
        .map(|c| (c["name"].as_str().unwrap().to_string(), c["type"].as_str().unwrap().to_string()))
        .collect()
}

/// Parses CSV output and checks header and cell types against the layout.
fn assert_csv(text: &str, kind: &str) -> usize {
    let layout = csv_layout(kind);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    let names: Vec<String> = layout.iter().map(|(n, _)| n.clone()).collect();
    assert_eq!(header, names, "{kind} header");
    let mut rows = 0;
    for record in reader.records() {
        let record = record.unwrap();
        assert_eq!(record.len(), layout.len());
        for (cell, (name, ty)) in record.iter().zip(&layout) {
            let ok = match ty.as_str() {
                "integer" => cell.parse::<i64>().is_ok(),
                "number" => cell.parse::<f64>().is_ok(),
                "boolean" => cell == "true" || cell == "false",
                "assignments" => cell.is_empty() || cell.split(';').all(|kv| kv.contains('=')),
                _ => true,
            };
            assert!(ok, "{kind}.{name}: {cell:?} is not {ty}");
        }
        rows += 1;
    }
    rows
}

#[test]
fn validate_corpus_passes() {
    let files: Vec<String> =
        std::fs::read_dir(root().join("corpus")).unwrap().map(|e| e.unwrap().path().display().to_string()).collect();
    let mut args = vec!["validate"];
    args.extend(files.iter().map(String::as_str));
    let run = ctcsim(&args);
    assert_eq!(run.code, 0, "{}\n{}", run.stdout, run.stderr);
    let report = json(&run);
    assert_schema(&report);
    assert_eq!(report["status"], "ok");
    let checks = report["result"]["checks"].as_array().unwrap();
    assert!(checks.len() >= files.len());
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn run_signaling_scenario() {
    let run = ctcsim(&["run", &corpus("bhw_signaling.scn")]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let report = json(&run);
    assert_schema(&report);
    assert_eq!(report["config"]["frame"], "alice-first");
    assert_eq!(report["config"]["null_policy"], "error");
}

#[test]
fn null_projection_exits_one() {
    let run = ctcsim(&["run", &corpus("ralph_premeasured.scn")]);
    assert_eq!(run.code, 1, "{}", run.stdout);
    let report = json(&run);
    assert_schema(&report);
    assert!(report["message"].as_str().unwrap().contains("null"), "{report:#}");
}

#[test]
fn flag_policy_reports_forbidden_context() {
    let run = ctcsim(&["run", "--null-policy", "flag", &corpus("ralph_premeasured.scn")]);
    let report = json(&run);
    assert_schema(&report);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(report["config"]["null_policy"], "flag");
    let table = &report["result"]["table"];
    assert_eq!(table["forbidden_contexts"], serde_json::json!([{ "phase_flip": "on" }]));
    assert_eq!(table["entries"], serde_json::json!([]));
}

#[test]
fn missing_input_exits_two() {
    let run = ctcsim(&["fixed-point", "/nonexistent/x.ctc", &corpus("zero.state")]);
    assert_eq!(run.code, 2);
    assert!(run.stdout.is_empty());
    assert!(run.stderr.contains("/nonexistent/x.ctc"), "{}", run.stderr);
}

#[test]
fn malformed_circuit_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.ctc");
    std::fs::write(&bad, "qubits 1 ctc 1\nx q4\n").unwrap();
    let run = ctcsim(&["validate", bad.to_str().unwrap()]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("2:3") && run.stderr.contains("out-of-range-wire"), "{}", run.stderr);
}

#[test]
fn usage_error_exits_two() {
    assert_eq!(ctcsim(&["frobnicate"]).code, 2);
    assert_eq!(ctcsim(&["run"]).code, 2);
}

#[test]
fn fixed_point_reports() {
    let run = ctcsim(&["fixed-point", &corpus("bhw.ctc"), &corpus("minus.state")]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let report = json(&run);
    assert_schema(&report);
    let fp = &report["result"]["fixed_point"];
    assert!(fp["residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(fp["degenerate"], false);

    let run = ctcsim(&["fixed-point", &corpus("grandfather.ctc"), &corpus("zero.state")]);
    let report = json(&run);
    assert_schema(&report);
    assert_eq!(report["result"]["fixed_point"]["degenerate"], true);
    let entropy = report["result"]["fixed_point"]["entropy"].as_f64().unwrap();
    assert!((entropy - std::f64::consts::LN_2).abs() < 1e-9);
}

#[test]
fn montecarlo_same_seed_same_log() {
    let args = ["montecarlo", "--seed", "42", "--trials", "20000", &corpus("swap.ctc"), &corpus("plus.state")];
    let a = ctcsim(&args);
    let b = ctcsim(&args);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    let report = json(&a);
    assert_schema(&report);
    assert_eq!(report["result"]["log"]["seed"], 42);
}

#[test]
fn montecarlo_generated_seed_is_logged() {
    let run = ctcsim(&["montecarlo", "--trials", "1000", &corpus("swap.ctc"), &corpus("plus.state")]);
    let report = json(&run);
    assert_schema(&report);
    let seed = report["config"]["seed"].as_u64().expect("seed logged");
    assert_eq!(report["result"]["log"]["seed"].as_u64(), Some(seed));
    let again = ctcsim(&[
        "montecarlo",
        "--trials",
        "1000",
        "--seed",
        &seed.to_string(),
        &corpus("swap.ctc"),
        &corpus("plus.state"),
    ]);
    assert_eq!(json(&again)["result"]["log"], report["result"]["log"]);
}

#[test]
fn consistency_all_frames() {
    let run = ctcsim(&["consistency", "--frame", "all", &corpus("bhw_signaling.scn")]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let report = json(&run);
    assert_schema(&report);
    assert_eq!(report["result"]["consistency"]["priority_frame"], "alice-first");
}

#[test]
fn relay_scenario_decodes() {
    let run = ctcsim(&["run", &corpus("relay_pctc.scn")]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let report = json(&run);
    assert_schema(&report);
    assert_eq!(report["result"]["relay"]["decoded"], serde_json::json!([1, 0, 1, 0]));
}

#[test]
fn csv_outputs_match_layouts() {
    let cases: [(&[&str], &str); 6] = [
        (&["run", "--format", "csv", &corpus("bhw_signaling.scn")], "table"),
        (&["consistency", "--format", "csv", &corpus("ralph.scn")], "table"),
        (&["fixed-point", "--format", "csv", &corpus("bhw.ctc"), &corpus("plus.state")], "fixed_point"),
        (
            &[
                "montecarlo",
                "--format",
                "csv",
                "--seed",
                "1",
                "--trials",
                "500",
                &corpus("swap.ctc"),
                &corpus("plus.state"),
            ],
            "montecarlo",
        ),
        (&["run", "--format", "csv", &corpus("relay_dctc.scn")], "relay"),
        (&["validate", "--format", "csv", &corpus("bhw.ctc"), &corpus("ralph.scn")], "validate"),
    ];
    for (args, kind) in cases {
        let run = ctcsim(args);
        assert_eq!(run.code, 0, "{args:?}: {}", run.stderr);
        assert!(assert_csv(&run.stdout, kind) > 0, "{args:?}: no rows");
    }
    let failed = ctcsim(&["run", "--format", "csv", &corpus("ralph_premeasured.scn")]);
    assert_eq!(failed.code, 1);
    assert_eq!(assert_csv(&failed.stdout, "failure"), 1);
}

#[test]
fn text_format_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.txt");
    let run = ctcsim(&["run", "--format", "text", "--out", out.to_str().unwrap(), &corpus("bhw_signaling.scn")]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let written = std::fs::read_to_string(Path::new(&out)).unwrap();
    assert!(written.starts_with("run [ok]"), "{written}");
}
