use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multislice")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let o = run(args);
    let v = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)));
    (v, o.status.code().unwrap())
}

fn schema() -> jsonschema::Validator {
    let text = include_str!("../../../docs/report.schema.json");
    jsonschema::validator_for(&serde_json::from_str(text).unwrap()).unwrap()
}

fn assert_valid(v: &Value) {
    let validator = schema();
    let errors: Vec<String> = validator.iter_errors(v).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn info_examples() {
    let (v, code) = json(&["info", "-k", "2,1,1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["cardinality"], "12");
    assert_eq!(v["results"]["degree"], 5);
    assert_valid(&v);
    let (v, _) = json(&["info", "-k", "4"]);
    assert_eq!(v["results"]["trivial"], true);
    assert_eq!(v["results"]["cardinality"], "1");
    let o = run(&["info", "-k", "1,1", "--format", "text"]);
    assert_eq!(stdout(&o), "(1,1): N = 2, r_eff = 2, 2 vertices, degree 1\n");
}

#[test]
fn malformed_composition_is_a_usage_error() {
    let o = run(&["info", "-k", "2,x"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["info", "-k", "0,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_single_and_trivial() {
    let (v, code) = json(&["verify", "-k", "1,1,1"]);
    assert_eq!(code, 0);
    assert_valid(&v);
    let r = &v["results"][0];
    assert_eq!(r["status"], "pass");
    assert_eq!(r["delta"]["exact"], "3");
    assert_eq!(r["gap"]["exact"], "3");
    assert_eq!(r["gap_multiplicity"], 4);
    assert!(r["gap_relation"].as_str().unwrap().contains("2 * gamma / (N - 1)"));
    let (v, code) = json(&["verify", "-k", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"][0]["status"], "skipped_trivial");
}

#[test]
fn verify_sweep_passes_and_is_deterministic() {
    let args = ["verify", "--sweep", "N=2..5", "--samples", "2"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_valid(&v);
    assert_eq!(v["results"].as_array().unwrap().len(), 2 + 4 + 8 + 16);
    assert!(v["timing"].is_null());
    let csv = stdout(&run(&["verify", "--sweep", "N=3,r=3", "--format", "csv"]));
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("\"(1,1,1)\",3,3,6,3,pass,3,3,4,"));
}

#[test]
fn budget_failure_sets_exit_code() {
    let (v, code) = json(&["verify", "-k", "2,2", "--budget", "3"]);
    assert_eq!(code, 1);
    assert_eq!(v["results"][0]["status"], "error");
    assert_eq!(v["results"][0]["error"]["code"], "E_BUDGET");
    assert_valid(&v);
}

#[test]
fn float_mode() {
    let (v, code) = json(&["verify", "-k", "2,1,1", "--float"]);
    assert_eq!(code, 0);
    assert_eq!(v["config"]["arithmetic"], "floating");
    let gap = &v["results"][0]["certificates"][0]["detail"];
    assert!(gap["nullity"].is_null());
    assert_eq!(gap["floating_eigenbasis"], true);
    assert_eq!(run(&["verify", "-k", "2,1", "--exact", "--float"]).status.code(), Some(2));
}

#[test]
fn spectrum_examples() {
    let o = run(&["spectrum", "-k", "2,2", "--format", "text"]);
    assert_eq!(stdout(&o), "0:1 4:3 6:2\n");
    let (v, code) = json(&["spectrum", "-k", "2,2"]);
    assert_eq!(code, 0);
    assert_valid(&v);
    assert_eq!(v["certificates"].as_array().unwrap().len(), 2);
    let o = run(&["spectrum", "-k", "3,1", "--operator", "k", "--format", "text"]);
    assert_eq!(stdout(&o), "-1/3:1 1:1\n");
    let o = run(&["spectrum", "-k", "2,1", "--operator", "p", "--format", "csv"]);
    assert_eq!(stdout(&o), "value,multiplicity\n1/2,2\n1,1\n");
}

#[test]
fn coarsen_examples() {
    let (v, code) = json(&["coarsen", "--from", "1,1,1", "--to", "2,1"]);
    assert_eq!(code, 0);
    assert_valid(&v);
    let audit = &v["results"]["audits"][0];
    assert_eq!(audit["intertwined"], 100);
    assert_eq!(audit["containment"]["contained"], true);
    assert_eq!(v["results"]["witness"]["s"], 3);
    let (v, code) = json(&["coarsen", "--from", "2,2", "--to", "3,1"]);
    assert_eq!(code, 1);
    assert!(v["results"]["witness"].is_null());
    let (_, code) = json(&["coarsen", "--from", "1,2,1", "--map", "1,0,1"]);
    assert_eq!(code, 0);
    let o = run(&["coarsen", "--from", "1,2,1", "--to", "3,1", "--map", "1,0,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("E_COARSENING"));
    let (v, code) = json(&["coarsen", "--sweep", "N=4", "--samples", "3"]);
    assert_eq!(code, 0);
    assert!(v["results"]["audits"].as_array().unwrap().len() >= 10);
}

#[test]
fn walk_examples() {
    let (v, code) = json(&["walk", "-k", "2,2,2", "--steps", "1e6", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_valid(&v);
    let ratio = v["results"]["stats"]["relaxation"]["ratio"].as_f64().unwrap();
    assert!((ratio - 0.6).abs() < 0.01, "{ratio}");
    assert_eq!(v["results"]["target"], "3/5");
    assert!(v["results"]["stats"]["rng"].as_str().unwrap().starts_with("chacha8"));
    let csv = stdout(&run(&["walk", "-k", "2,1,1", "--steps", "1e4", "--format", "csv"]));
    assert!(csv.starts_with("lag,autocorrelation,stderr\n"));
    let (v, code) = json(&["walk", "-k", "2,2", "--steps", "2e5", "--chi-square", "20000"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["stationarity"]["degrees_of_freedom"], 5);
    assert_eq!(run(&["walk", "-k", "3", "--steps", "100"]).status.code(), Some(2));
    assert_eq!(run(&["walk", "-k", "2,1", "--steps", "10", "--burn-in", "10"]).status.code(), Some(2));
}

#[test]
fn export_formats() {
    let o = run(&["export", "-k", "1,1", "--format", "edgelist"]);
    assert_eq!(stdout(&o), "0 1\n");
    let o = run(&["export", "-k", "1,1", "--format", "dot"]);
    assert!(stdout(&o).contains("0 -- 1;"));
    let o = run(&["export", "-k", "1,1", "--what", "laplacian", "--format", "coordinate"]);
    assert_eq!(stdout(&o), "0 0 1\n0 1 -1\n1 0 -1\n1 1 1\n");
    let o = run(&["export", "-k", "2,1", "--what", "k", "--format", "coordinate"]);
    assert_eq!(stdout(&o), "0 0 1/2\n0 1 1/2\n1 0 1\n");
    let (v, _) = json(&["export", "-k", "2,1"]);
    assert_eq!(v["results"]["edges"].as_array().unwrap().len(), 3);
    assert_valid(&v);
    assert_eq!(run(&["export", "-k", "2,1", "--format", "csv"]).status.code(), Some(2));
}

#[test]
fn output_file_and_timing() {
    let path = std::env::temp_dir().join(format!("multislice-cli-test-{}.json", std::process::id()));
    let o = run(&["info", "-k", "2,2", "--timing", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(v["timing"]["seconds"].as_f64().unwrap() >= 0.0);
    assert_valid(&v);
}
