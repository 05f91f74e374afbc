//! End-to-end tests of the binary: output formats, round trips and exit codes.

use std::process::{Command, Output};

use coulomb_coherent::acceptance::{Check, CriterionResult};
use coulomb_coherent::limits::ConvergenceReport;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coulomb-coherent")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<csv::StringRecord>, Vec<String>) {
    let meta = text.lines().filter(|l| l.starts_with('#')).map(String::from).collect();
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr.records().map(|r| r.unwrap()).collect();
    (header, rows, meta)
}

#[test]
fn curved_spectrum_csv() {
    let text = stdout(&["spectrum", "--curved", "--R", "10", "--ell", "0", "--n", "0..5", "--output", "csv"]);
    let (header, rows, meta) = csv_rows(&text);
    assert_eq!(header, ["n", "ell", "N", "energy", "gen_number", "gen_factorial"]);
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0][3].parse::<f64>().unwrap(), -0.5);
    assert!(meta.iter().any(|l| l.starts_with("# version: ")));
    assert!(meta.iter().any(|l| l.starts_with("# args: spectrum --curved")));
    for row in &rows {
        for field in row.iter() {
            field.parse::<f64>().unwrap();
        }
    }
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let args = ["states", "--kind", "bound", "--n", "2", "--ell", "1", "--points", "21"];
    let csv_text = stdout(&[&args[..], &["--output", "csv"]].concat());
    let json_text = stdout(&[&args[..], &["--output", "json"]].concat());
    let (header, rows, _) = csv_rows(&csv_text);
    let doc: Value = serde_json::from_str(&json_text).unwrap();
    let data = doc["data"].as_array().unwrap();
    assert_eq!(data.len(), rows.len());
    for (obj, row) in data.iter().zip(&rows) {
        for (col, field) in header.iter().zip(row.iter()) {
            assert_eq!(obj[col].as_f64().unwrap(), field.parse::<f64>().unwrap(), "{col}");
        }
    }
    assert_eq!(doc["meta"]["command"], "states");
}

#[test]
fn output_is_bit_stable() {
    let args = ["coherent", "build", "--s", "0.4", "--gamma", "0.3", "--ell", "1", "--output", "csv"];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn ground_state_label_is_normalized() {
    let text = stdout(&["coherent", "verify", "--check", "normalization", "--s", "0", "--ell", "0", "--output", "json"]);
    let doc: Value = serde_json::from_str(&text).unwrap();
    let checks: Vec<Check> = serde_json::from_value(doc["data"].clone()).unwrap();
    assert!(checks.iter().all(|c| c.pass));
    assert_eq!(doc["meta"]["pass"], true);
}

#[test]
fn every_check_kind_passes_in_both_spaces() {
    for check in ["normalization", "stability", "action", "moments"] {
        for space in [&["--R", "25"][..], &[][..]] {
            let args = [&["coherent", "verify", "--check", check, "--s", "0.6"][..], space].concat();
            let out = run(&args);
            assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
        }
    }
}

#[test]
fn limits_json_round_trips() {
    let text = stdout(&["limits", "factorial", "--n", "4", "--ell", "1", "--R-list", "100,1000,10000", "--output", "json"]);
    let doc: Value = serde_json::from_str(&text).unwrap();
    let rep: ConvergenceReport = serde_json::from_value(doc["data"].clone()).unwrap();
    assert_eq!(rep.r_values, [100.0, 1000.0, 10000.0]);
    assert!(rep.is_strictly_decreasing());
    assert!((rep.fitted_order.unwrap() + 2.0).abs() < 0.01);
    assert_eq!(serde_json::to_value(&rep).unwrap(), doc["data"]);
}

#[test]
fn limits_csv_lists_extras() {
    let text = stdout(&["limits", "energy", "--k", "0.5", "--R-list", "100,1000", "--output", "csv"]);
    let (header, rows, meta) = csv_rows(&text);
    assert_eq!(header, ["R", "residual", "index", "n_c"]);
    assert_eq!(rows.len(), 2);
    assert!(meta.iter().any(|l| l.starts_with("# fitted_order: ")));
}

#[test]
fn verify_suite_reports_every_criterion() {
    let out = run(&["verify", "--suite", "all", "--output", "json"]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let results: Vec<CriterionResult> = serde_json::from_value(doc["data"].clone()).unwrap();
    assert_eq!(results.len(), 12);
    for r in &results {
        let obj = &doc["data"][(r.id - 1) as usize];
        for key in ["name", "measured", "tolerance", "pass"] {
            assert!(obj.get(key).is_some(), "{key}");
        }
    }
    let all_pass = results.iter().all(|r| r.pass);
    assert_eq!(out.status.code(), Some(if all_pass { 0 } else { 1 }));
}

#[test]
fn flag_and_domain_errors_exit_two() {
    for args in [
        &["spectrum", "--curved"][..],
        &["spectrum", "--R", "10"],
        &["spectrum", "--n", "4..1"],
        &["--omega", "-1", "spectrum"],
        &["--omega", "1", "--Z", "1", "spectrum"],
        &["coherent", "build", "--s", "2", "--ell", "0"],
        &["coherent", "verify", "--check", "moments", "--ell", "1"],
        &["states", "--kind", "curved"],
        &["limits", "wavefunction", "--r-max", "100"],
        &["verify", "--only", "13"],
        &["nonsense"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn charge_sets_the_energy_scale() {
    let a = stdout(&["--Z", "2", "spectrum", "--n", "0", "--output", "csv"]);
    let (_, rows, _) = csv_rows(&a);
    assert_eq!(rows[0][3].parse::<f64>().unwrap(), -2.0);
}
