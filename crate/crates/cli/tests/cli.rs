use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value;

fn qde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qde"))
        .args(args)
        .env_remove("QDE_MAX_DISC")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn repo(path: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(path)
}

fn fixture(name: &str) -> String {
    repo("fixtures").join(name).display().to_string()
}

fn schema(name: &str) -> JSONSchema {
    let text = fs::read_to_string(repo("docs/schemas").join(format!("{name}.json"))).unwrap();
    JSONSchema::compile(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn json_ok(args: &[&str]) -> Value {
    let out = qde(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(&out)).unwrap()
}

fn assert_schema(name: &str, value: &Value) {
    let schema = schema(name);
    let msgs: Vec<String> = match schema.validate(value) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| e.to_string()).collect(),
    };
    panic!("{name} output violates its schema: {msgs:?}\n{value}");
}

#[test]
fn predict_root_ten_json_is_exact() {
    let out = qde(&["predict", "--theta", "sqrt(10)", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out).trim(),
        r#"{"D":10,"f":1,"h":2,"rank":1,"sha":{"invariant_factors":[2,2],"order":4},"k0_rank":3}"#
    );
}

#[test]
fn predict_by_order() {
    let v = json_ok(&["predict", "--D", "5", "--f", "2", "--json"]);
    assert_eq!(v["h"], 1);
    assert_eq!(v["rank"], 0);
    let v = json_ok(&["predict", "--D", "79", "--json"]);
    assert_eq!(v["sha"]["invariant_factors"], serde_json::json!([3, 3]));
}

#[test]
fn cf_golden_ratio() {
    let out = qde(&["cf", "--theta", "(1+sqrt(5))/2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "preperiod=[] period=[1]");
    let v = json_ok(&["cf", "--theta", "sqrt(7)", "--json"]);
    assert_eq!(v["preperiod"], serde_json::json!([2]));
    assert_eq!(v["period"], serde_json::json!([1, 1, 1, 4]));
    let out = qde(&["cf", "--theta", "-sqrt(3) + 4"]);
    assert_eq!(stdout(&out).trim(), "preperiod=[2,3] period=[1,2]");
}

#[test]
fn outputs_match_schemas() {
    for theta in ["sqrt(10)", "(1+sqrt(5))/2", "sqrt(8)", "(3+sqrt(79))/5"] {
        assert_schema("predict", &json_ok(&["predict", "--theta", theta, "--json"]));
        assert_schema("k0", &json_ok(&["k0", "--theta", theta, "--json"]));
        assert_schema("classgroup", &json_ok(&["classgroup", "--theta", theta, "--json"]));
    }
    for f in ["curves.csv", "curves.json", "rank_zero_one.csv"] {
        assert_schema("validate", &json_ok(&["validate", "--input", &fixture(f), "--json"]));
    }
}

#[test]
fn schemas_reject_malformed_output() {
    let bad = serde_json::json!({"D":10,"f":1,"h":2,"rank":1,"sha":{"invariant_factors":[2,2]},"k0_rank":3});
    assert!(!schema("predict").is_valid(&bad));
    let bad = serde_json::json!({"total":1,"consistent":1,"violations":0,"violation_rows":[],"by_rank":{"x":{}}});
    assert!(!schema("validate").is_valid(&bad));
}

#[test]
fn k0_descriptor() {
    let v = json_ok(&["k0", "--theta", "sqrt(10)", "--json"]);
    assert_eq!(v["k0_rank"], 3);
    assert_eq!(v["trace_generators"], serde_json::json!(["1", "theta", "lambda_1"]));
}

#[test]
fn classgroup_and_companions() {
    let v = json_ok(&["classgroup", "--D", "10", "--json"]);
    assert_eq!(v["h"], 2);
    assert_eq!(v["representatives"].as_array().unwrap().len(), 2);
    let out = qde(&["companions", "--theta", "sqrt(10)"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    assert_eq!(text.lines().filter(|l| l.ends_with('*')).count(), 1);
}

#[test]
fn unit_and_order() {
    let v = json_ok(&["unit", "--D", "5", "--f", "2", "--json"]);
    assert_eq!(v["unit_index"], 3);
    assert_eq!(v["norm"], -1);
    let v = json_ok(&["order", "--theta", "sqrt(8)", "--json"]);
    assert_eq!(v["order"]["f"], 2);
    assert_eq!(v["order"]["D"], 2);
}

#[test]
fn validate_fixture() {
    let v = json_ok(&["validate", "--input", &fixture("curves.csv"), "--json"]);
    let total = v["total"].as_u64().unwrap();
    assert_eq!(total, 8);
    assert_eq!(v["consistent"].as_u64().unwrap() + v["violations"].as_u64().unwrap(), total);
    let labels: Vec<&str> = v["violation_rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["label"].as_str().unwrap())
        .collect();
    assert_eq!(labels, ["37a1", "389a1", "43a1", "5077a1", "571a1"]);
}

#[test]
fn validate_csv_and_json_agree_and_parallel_is_identical() {
    let csv = qde(&["validate", "--input", &fixture("curves.csv"), "--json"]);
    let json = qde(&["validate", "--input", &fixture("curves.json"), "--json"]);
    let par = qde(&["validate", "--input", &fixture("curves.csv"), "--json", "--jobs", "4"]);
    assert_eq!(stdout(&csv), stdout(&json));
    assert_eq!(stdout(&csv), stdout(&par));
}

#[test]
fn validate_bad_input_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "label,rank,sha_order\n11a1,0,1\n37a1,-1,1\n").unwrap();
    let out = qde(&["validate", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3") && err.contains("rank"), "{err}");
}

#[test]
fn validate_empty_input_warns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    fs::write(&path, "").unwrap();
    let out = qde(&["validate", "--input", path.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn exit_codes() {
    assert_eq!(qde(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qde(&["predict", "--theta", "sqrt(10)", "--bogus"]).status.code(), Some(2));
    assert_eq!(qde(&["predict"]).status.code(), Some(2));
    assert_eq!(qde(&["predict", "--D", "10", "--theta", "sqrt(2)"]).status.code(), Some(2));
    assert_eq!(qde(&["predict", "--theta", "sqrt(4)"]).status.code(), Some(1));
    assert_eq!(qde(&["predict", "--theta", "1 + + sqrt(2)"]).status.code(), Some(1));
    assert_eq!(qde(&["predict", "--D", "12"]).status.code(), Some(1));
    assert_eq!(qde(&["validate", "--input", "/nonexistent/curves.csv"]).status.code(), Some(1));
}

#[test]
fn max_disc_flag_and_env() {
    let out = qde(&["predict", "--D", "10", "--max-disc", "39"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds"));
    assert_eq!(qde(&["predict", "--D", "10", "--max-disc", "40"]).status.code(), Some(0));
    let out = Command::new(env!("CARGO_BIN_EXE_qde"))
        .args(["predict", "--D", "10"])
        .env("QDE_MAX_DISC", "39")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(qde(&["predict", "--D", "10", "--max-disc", "0"]).status.code(), Some(2));
}
