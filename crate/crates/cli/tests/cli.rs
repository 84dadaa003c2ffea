//! End-to-end checks of the `jspec` binary: exact column sets, byte-level
//! determinism of report bodies, exit codes, and JSON schema conformance.

use std::path::Path;
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value;

fn jspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jspec"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).unwrap()
}

/// Drops the metadata comment line (it carries a timestamp).
fn body(doc: &str) -> String {
    doc.lines().skip(1).collect::<Vec<_>>().join("\n")
}

fn load_schema(name: &str) -> JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    JSONSchema::compile(&schema).expect("schema compiles")
}

fn assert_valid(schema: &JSONSchema, instance: &Value) {
    let result = schema.validate(instance);
    if let Err(errors) = result {
        let messages: Vec<String> = errors.map(|e| format!("{e} at {}", e.instance_path)).collect();
        panic!("schema violations: {messages:?}");
    }
}

#[test]
fn gen_emits_coefficient_csv() {
    let out = stdout(&jspec(&["gen", "--ensemble", "toeplitz", "--a", "0.5", "--b", "0.25", "--k", "4"]));
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("# {"));
    assert_eq!(lines[1], "index,diag,offdiag");
    assert_eq!(lines.len(), 2 + 4);
    assert!(lines[5].starts_with("4,") && lines[5].ends_with(','));
}

#[test]
fn spectrum_row_count_contract() {
    let out = stdout(&jspec(&["spectrum", "--ensemble", "hermite", "--k", "100"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[1], "k,index,lambda");
    assert_eq!(lines.len(), 2 + 100);
    // contracted Hermite eigenvalues live in (-1, 1) up to edge effects
    for line in &lines[2..] {
        let lambda: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert!(lambda.abs() < 1.02, "{lambda}");
    }
}

#[test]
fn moments_columns_and_phantom_value() {
    let out = stdout(&jspec(&[
        "moments", "--seq", "toeplitz", "--a", "0.5", "--b", "0.25", "--n", "2", "--ks", "10,20",
    ]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[1], "n,k,exact,approx,deviation_per_k");
    assert_eq!(lines.len(), 2 + 2);
    // phantom off-diagonal entry contributes exactly 2 b^2 = 0.125
    let dev: f64 = lines[2].split(',').nth(4).unwrap().parse().unwrap();
    assert!((dev - 0.125 / 10.0).abs() < 1e-9);
}

#[test]
fn deviation_columns_and_slope_metadata() {
    let out = stdout(&jspec(&[
        "deviation", "--seq", "ramp", "--ks", "100,215,464,1000",
    ]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[1], "k,tv,tv_per_k,max_abs,monotone_fraction,discrepancy");
    assert_eq!(lines.len(), 2 + 4);
    let meta: Value = serde_json::from_str(&lines[0][2..]).unwrap();
    assert_eq!(meta["class_slope"]["heuristic"], Value::Bool(true));
    assert_eq!(meta["class_slope"]["maxabs_growth"], "bounded");
    // the discrepancy column is populated for this unit-box sequence
    let disc: f64 = lines[2].split(',').nth(5).unwrap().parse().unwrap();
    assert!((disc - 0.01).abs() < 1e-12);
}

#[test]
fn compare_columns_and_csv_body_determinism() {
    let args = [
        "compare", "--ensemble", "toeplitz", "--a", "0.5", "--b", "0.25",
        "--ks", "50,100", "--phis", "m0,m2",
    ];
    let first = stdout(&jspec(&args));
    let second = stdout(&jspec(&args));
    assert_eq!(first.lines().nth(1).unwrap(), "phi_id,k,empirical,limit,abs_err");
    assert_eq!(body(&first), body(&second));
    assert_eq!(first.lines().count(), 2 + 4);
}

#[test]
fn random_ensembles_are_reproducible_per_seed() {
    let args = ["gen", "--ensemble", "order-stats", "--seed", "9", "--k", "50"];
    assert_eq!(body(&stdout(&jspec(&args))), body(&stdout(&jspec(&args))));
    let other = ["gen", "--ensemble", "order-stats", "--seed", "10", "--k", "50"];
    assert_ne!(body(&stdout(&jspec(&args))), body(&stdout(&jspec(&other))));
}

#[test]
fn compare_json_validates_against_shipped_schema() {
    let out = stdout(&jspec(&[
        "compare", "--ensemble", "vanvleck", "--ks", "50,100", "--phis", "m1,cheb2",
        "--format", "json",
    ]));
    let instance: Value = serde_json::from_str(&out).unwrap();
    assert_valid(&load_schema("compare.schema.json"), &instance);
    assert_eq!(instance["reports"].as_array().unwrap().len(), 4);
}

#[test]
fn helly_selects_the_even_class_from_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("alternating.json");
    std::fs::write(
        &config_path,
        r#"{
            "id": "alternating",
            "kind": "recurrence-family",
            "params": {"family": {"name": "alternating", "even": [0.0, 1.0], "odd": [1.0, 1.0]}},
            "declared_class": "s"
        }"#,
    )
    .unwrap();
    let out = stdout(&jspec(&[
        "helly", "--config", config_path.to_str().unwrap(),
        "--ks", "8,16,32,64,128,256,512,1024", "--tol", "0.05",
    ]));
    let instance: Value = serde_json::from_str(&out).unwrap();
    assert_valid(&load_schema("helly.schema.json"), &instance);
    assert_eq!(instance["converged"], Value::Bool(true));
    let selected: Vec<u64> = instance["selected_ks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert!(!selected.is_empty());
    assert!(selected.iter().all(|k| k % 2 == 0));
}

#[test]
fn helly_failure_exits_three() {
    let output = jspec(&[
        "helly", "--ensemble", "alternating",
        "--ks", "8,9,11,13,15,17,19,21", "--tol", "0.05",
    ]);
    assert_eq!(output.status.code(), Some(3));
    // the report itself is still written
    let doc: Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(doc["converged"], Value::Bool(false));
}

#[test]
fn compare_tolerance_gate_exits_three() {
    let output = jspec(&[
        "compare", "--ensemble", "toeplitz", "--ks", "10,20", "--phis", "m2",
        "--max-abs-err", "1e-12",
    ]);
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn config_errors_exit_two_and_name_the_problem() {
    let output = jspec(&["spectrum", "--ensemble", "no-such-ensemble", "--k", "5"]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("no-such-ensemble"), "{stderr}");

    let output = jspec(&["gen", "--ensemble", "gaussian", "--k", "5"]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("seed"), "{stderr}");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"id": "x", "kind": "explicit-table"}"#).unwrap();
    let output = jspec(&["gen", "--config", bad.to_str().unwrap(), "--k", "3"]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("params") || stderr.contains("declared_class"), "{stderr}");
}

#[test]
fn density_tabulates_the_arcsine_law() {
    let out = stdout(&jspec(&[
        "density", "--name", "arcsine", "--a", "0", "--b", "0.5", "--points", "8",
    ]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[1], "x,density");
    assert_eq!(lines.len(), 2 + 8);
    // symmetric tabulation: first and last rows mirror each other
    let first: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
    let last: Vec<f64> = lines[9].split(',').map(|v| v.parse().unwrap()).collect();
    assert!((first[0] + last[0]).abs() < 1e-12);
    assert!((first[1] - last[1]).abs() < 1e-12);
}

#[test]
fn explicit_table_config_round_trips_through_gen() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("table.json");
    std::fs::write(
        &config_path,
        r#"{
            "id": "table",
            "kind": "explicit-table",
            "params": {"diagonal": [0.1, 0.2, 0.3], "offdiagonal": [0.9, 0.8]},
            "declared_class": "s"
        }"#,
    )
    .unwrap();
    let out = stdout(&jspec(&["gen", "--config", config_path.to_str().unwrap(), "--k", "3"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[2], "1,1.0000000000000001e-1,9.0000000000000002e-1");
    assert_eq!(lines[4], "3,2.9999999999999999e-1,");
}
