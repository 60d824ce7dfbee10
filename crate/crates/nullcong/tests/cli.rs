//! End-to-end tests of the `nullcong` binary: exit codes, report formats,
//! conformance to the shipped JSON schema, and byte-level determinism.

use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nullcong"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn manifest_path() -> String {
    format!("file:{}/bases/rotated-flat.txt", env!("CARGO_MANIFEST_DIR"))
}

/// Drops the (timing-dependent) wall_ms line so reports can be compared.
fn strip_wall(text: &str) -> String {
    text.lines().filter(|l| !l.contains("wall_ms")).collect::<Vec<_>>().join("\n")
}

// ---------------------------------------------------------------------------
// Minimal JSON-schema checker covering the subset used by the shipped schema
// (types, unions, required, properties, additionalProperties, items, enum,
// minimum / exclusiveMinimum).
// ---------------------------------------------------------------------------

fn type_matches(name: &str, value: &Value) -> bool {
    match name {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "boolean" => value.is_boolean(),
        "integer" => value.is_i64() || value.is_u64(),
        "number" => value.is_number(),
        "null" => value.is_null(),
        other => panic!("schema uses unsupported type {other}"),
    }
}

fn check_schema(schema: &Value, value: &Value, path: &str, errs: &mut Vec<String>) {
    if let Some(ty) = schema.get("type") {
        let ok = match ty {
            Value::String(name) => type_matches(name, value),
            Value::Array(alts) => alts
                .iter()
                .any(|alt| type_matches(alt.as_str().expect("type name"), value)),
            other => panic!("unsupported type clause {other}"),
        };
        if !ok {
            errs.push(format!("{path}: expected {ty}, got {value}"));
            return;
        }
    }
    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.contains(value) {
            errs.push(format!("{path}: {value} not in {allowed:?}"));
        }
    }
    if let Some(min) = schema.get("minimum").and_then(Value::as_f64) {
        if value.as_f64().map_or(true, |v| v < min) {
            errs.push(format!("{path}: {value} below minimum {min}"));
        }
    }
    if let Some(min) = schema.get("exclusiveMinimum").and_then(Value::as_f64) {
        if value.as_f64().map_or(true, |v| v <= min) {
            errs.push(format!("{path}: {value} not above {min}"));
        }
    }
    if let Some(props) = schema.get("properties").and_then(Value::as_object) {
        for (key, sub) in props {
            if let Some(field) = value.get(key) {
                check_schema(sub, field, &format!("{path}.{key}"), errs);
            }
        }
        if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
            if let Some(obj) = value.as_object() {
                for key in obj.keys() {
                    if !props.contains_key(key) {
                        errs.push(format!("{path}: unexpected key {key}"));
                    }
                }
            }
        }
    }
    if let Some(required) = schema.get("required").and_then(Value::as_array) {
        for key in required {
            let key = key.as_str().expect("required key");
            if value.get(key).is_none() {
                errs.push(format!("{path}: missing required key {key}"));
            }
        }
    }
    if let Some(items) = schema.get("items") {
        if let Some(arr) = value.as_array() {
            for (i, item) in arr.iter().enumerate() {
                check_schema(items, item, &format!("{path}[{i}]"), errs);
            }
        }
    }
}

fn assert_conforms(report_json: &str) {
    let schema_text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/schemas/report.schema.json"
    ))
    .expect("schema file ships with the crate");
    let schema: Value = serde_json::from_str(&schema_text).expect("schema parses");
    let value: Value = serde_json::from_str(report_json).expect("report parses");
    let mut errs = Vec::new();
    check_schema(&schema, &value, "$", &mut errs);
    assert!(errs.is_empty(), "schema violations: {errs:#?}");
}

// ---------------------------------------------------------------------------
// Exit codes
// ---------------------------------------------------------------------------

#[test]
fn reference_einstein_invocation_passes() {
    let out = run(&[
        "einstein", "--m", "2", "--base", "heisenberg", "--lambda", "1.0", "--c", "0.3",
        "--samples", "200", "--seed", "42", "--tol", "1e-7",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(report["suite"], "einstein");
    assert_eq!(report["pass"], true);
    assert_eq!(report["config"]["samples"], 200);
    assert_conforms(&stdout(&out));
}

#[test]
fn lambda0_prints_profile_summary_on_stderr() {
    let out = run(&["lambda0", "--m", "2", "--lambda", "1", "--ulambda", "0", "--c", "0"]);
    assert_eq!(code(&out), 0);
    assert!(
        stderr(&out).contains("lambda0(0) = -1; a_j = (1, 2, 8)"),
        "stderr: {}",
        stderr(&out)
    );
    // stdout stays machine-readable
    let report: Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(report["pass"], true);
}

#[test]
fn unmet_tolerance_exits_one() {
    let out = run(&["einstein", "--samples", "5", "--tol", "1e-30"]);
    assert_eq!(code(&out), 1);
    let report: Value = serde_json::from_str(&stdout(&out)).expect("report still emitted");
    assert_eq!(report["pass"], false);
    assert_conforms(&stdout(&out));
}

#[test]
fn usage_errors_exit_two() {
    // unknown suite
    assert_eq!(code(&run(&["bogus"])), 2);
    // unknown flag (handled by the argument parser)
    assert_eq!(code(&run(&["einstein", "--frobnicate"])), 2);
    // degenerate base rejected by the radial suite
    assert_eq!(code(&run(&["taubnut", "--m", "2", "--ulambda", "0"])), 2);
    // explicit constant contradicting the base
    assert_eq!(code(&run(&["lambda0", "--base", "fs-lift", "--ulambda", "1.0"])), 2);
    // config invariants
    assert_eq!(code(&run(&["killing", "--samples", "0"])), 2);
    assert_eq!(code(&run(&["killing", "--phi-margin", "2.0"])), 2);
    assert_eq!(code(&run(&["killing", "--tol", "-1e-9"])), 2);
    // unreadable manifest
    assert_eq!(code(&run(&["cr-base", "--base", "file:/no/such/manifest.txt"])), 2);
    // malformed jobs environment variable
    let out = bin()
        .args(["killing", "--samples", "2"])
        .env("NULLCONG_JOBS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn evaluation_errors_exit_three() {
    // A manifest that parses cleanly but blows up when evaluated: log(0).
    let dir = std::env::temp_dir().join("nullcong-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("poisoned.txt");
    std::fs::write(
        &path,
        "m = 2\ncoords = t x1 y1 x2 y2\n\
         theta0 t = 1\ntheta0 x1 = -y1\ntheta0 y1 = x1\n\
         theta0 x2 = -y2\ntheta0 y2 = x2\n\
         theta1 x1 = log(x1*0)\ntheta1 y1 = i\n\
         theta2 x2 = 1\ntheta2 y2 = i\n",
    )
    .unwrap();
    let spec = format!("file:{}", path.display());
    let out = run(&["cr-base", "--base", &spec, "--samples", "2"]);
    assert_eq!(code(&out), 3, "stderr: {}", stderr(&out));
}

// ---------------------------------------------------------------------------
// Formats and determinism
// ---------------------------------------------------------------------------

#[test]
fn csv_output_round_trips() {
    let out = run(&["killing", "--samples", "10", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("check,samples,max_abs,max_rel,tol,pass\n"));
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut rows = 0;
    for record in rdr.records() {
        let record = record.expect("well-formed CSV row");
        assert_eq!(record.len(), 6);
        record[2].parse::<f64>().expect("max_abs number");
        record[3].parse::<f64>().expect("max_rel number");
        record[4].parse::<f64>().expect("tol number");
        assert_eq!(&record[5], "true");
        rows += 1;
    }
    assert!(rows >= 2, "killing suite reports at least two checks");
}

#[test]
fn json_reports_conform_to_shipped_schema() {
    for args in [
        vec!["lambda0", "--lambda", "0.4", "--samples", "20"],
        vec!["twist-identity", "--samples", "6"],
        vec!["taubnut", "--base", "fs-lift", "--samples", "5"],
    ] {
        let out = run(&args);
        assert_eq!(code(&out), 0, "{args:?} stderr: {}", stderr(&out));
        assert_conforms(&stdout(&out));
    }
}

#[test]
fn reports_are_byte_reproducible_per_seed() {
    let args = ["cr-base", "--samples", "10", "--seed", "7"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(strip_wall(&stdout(&first)), strip_wall(&stdout(&second)));

    // Worker count must not affect the results either (they are canonicalized);
    // only the echoed jobs value may differ.
    let drop_jobs = |text: &str| {
        text.lines().filter(|l| !l.contains("\"jobs\"")).collect::<Vec<_>>().join("\n")
    };
    let serial = bin().args(args).args(["--jobs", "1"]).output().unwrap();
    let pooled = bin().args(args).env("NULLCONG_JOBS", "3").output().unwrap();
    assert_eq!(drop_jobs(&strip_wall(&stdout(&serial))), drop_jobs(&strip_wall(&stdout(&pooled))));
    assert_eq!(drop_jobs(&strip_wall(&stdout(&first))), drop_jobs(&strip_wall(&stdout(&pooled))));
}

#[test]
fn negative_flag_values_parse() {
    let out = run(&["lambda0", "--lambda", "-0.75", "--c", "-0.5", "--samples", "20"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["config"]["lambda"].as_f64().unwrap(), -0.75);
    assert_eq!(report["config"]["c"].as_f64().unwrap(), -0.5);
}

// ---------------------------------------------------------------------------
// File bases
// ---------------------------------------------------------------------------

#[test]
fn file_base_manifest_feeds_the_einstein_suite() {
    let base = manifest_path();
    let out = run(&[
        "einstein", "--base", &base, "--lambda", "0.7", "--c", "0.2", "--samples", "20",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["pass"], true);
    // the manifest declares rank 2; asking for rank 3 is a usage error
    let out = run(&["einstein", "--base", &base, "--m", "3"]);
    assert_eq!(code(&out), 2);
}
