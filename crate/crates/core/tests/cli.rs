use std::process::Command;

use friction::cli::run;
use serde_json::Value;

fn instance(name: &str) -> String {
    format!("{}/instances/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn call(args: &[&str]) -> (i32, Value, String) {
    let mut argv = vec!["friction"];
    argv.extend_from_slice(args);
    let (code, out, err) = run(argv);
    let doc = serde_json::from_str(&out).unwrap_or(Value::Null);
    (code, doc, err)
}

const VERBS: [&str; 8] = ["validate", "polar", "recursion", "arbitrage", "price", "duality", "randomize", "semistatic"];

#[test]
fn exit_code_matrix() {
    let expected = [
        ("instanceA", [0, 0, 0, 0, 0, 0, 0, 0]),
        ("instanceB", [0, 0, 0, 2, 2, 2, 2, 2]),
        ("na2", [0, 0, 0, 0, 0, 0, 0, 0]),
        ("options", [0, 0, 0, 0, 0, 0, 0, 0]),
        ("three_assets", [0, 0, 0, 0, 0, 0, 0, 0]),
        ("broken", [3, 3, 3, 3, 3, 3, 3, 3]),
    ];
    for (name, codes) in expected {
        for (verb, code) in VERBS.iter().zip(codes) {
            let (got, doc, _) = call(&[verb, &instance(name)]);
            assert_eq!(got, code, "{verb} {name}");
            assert_eq!(doc["verb"], *verb);
        }
    }
}

#[test]
fn primal_price_of_instance_a() {
    let (code, doc, _) = call(&["price", "--method", "primal", &instance("instanceA")]);
    assert_eq!(code, 0);
    assert_eq!(doc["status"], "ok");
    assert_eq!(doc["primal"]["value"], "2");
    assert_eq!(doc["primal"]["strategy_check"]["valid"], true);
    assert!(doc.get("dual").is_none());
}

#[test]
fn arbitrage_witness_is_inlined() {
    let (code, doc, _) = call(&["arbitrage", &instance("instanceB")]);
    assert_eq!(code, 2);
    assert_eq!(doc["status"], "arbitrage");
    let w = &doc["na"]["witness"];
    assert_eq!(w["verified"], true);
    assert!(w["positions"].is_object());
}

#[test]
fn broken_file_names_the_invariant() {
    let (code, doc, _) = call(&["validate", &instance("broken")]);
    assert_eq!(code, 3);
    assert_eq!(doc["status"], "error");
    assert_eq!(doc["violation"], "kernel not stochastic");
    assert_eq!(doc["node"], "root");
}

#[test]
fn missing_file_is_a_validation_failure() {
    let (code, doc, _) = call(&["validate", "/nonexistent/market.json"]);
    assert_eq!(code, 3);
    assert!(doc["error"].as_str().unwrap().contains("cannot read"));
}

#[test]
fn duality_chain_on_the_na2_instance() {
    let (code, doc, _) = call(&["duality", &instance("na2"), "--epsilon-schedule", "1/10,1/100"]);
    assert_eq!(code, 0);
    assert_eq!(doc["gap"], "0");
    assert_eq!(doc["primal_K"]["value"], doc["dual_K_tilde"]["value"]);
    assert_eq!(doc["reduction_identity"], true);
    assert_eq!(doc["enlargement"]["runs"].as_array().unwrap().len(), 2);
    assert_eq!(doc["enlargement"]["sandwich_holds"], true);
}

#[test]
fn semistatic_price_never_exceeds_dynamic() {
    let (code, doc, _) = call(&["semistatic", &instance("options")]);
    assert_eq!(code, 0);
    assert_eq!(doc["gap"], "0");
    assert_eq!(doc["slater"], true);
    assert_eq!(doc["primal"]["value"], "31/16");
    assert_eq!(doc["dynamic_primal"], "2");
}

#[test]
fn several_inputs_keep_order_and_worst_code() {
    let (code, doc, _) = call(&["arbitrage", &instance("instanceA"), &instance("broken"), &instance("instanceB")]);
    assert_eq!(code, 3);
    let statuses: Vec<&str> = doc.as_array().unwrap().iter().map(|r| r["status"].as_str().unwrap()).collect();
    assert_eq!(statuses, ["ok", "error", "arbitrage"]);
}

#[test]
fn generated_input_with_seed() {
    let (code, doc, _) = call(&["validate", "random", "--seed", "3"]);
    assert_eq!(code, 0);
    assert_eq!(doc["input"], "random");
}

#[test]
fn pretty_table_goes_to_stderr() {
    let (code, doc, err) = call(&["semistatic", "--pretty", &instance("options")]);
    assert_eq!(code, 0);
    assert!(doc.is_object());
    assert!(err.contains("1.9375000000000000000 (approx)"));
}

#[test]
fn binary_output_is_byte_identical_across_runs() {
    let bin = env!("CARGO_BIN_EXE_friction");
    let file = instance("three_assets");
    let once = || Command::new(bin).args(["duality", &file]).output().unwrap();
    let (a, b) = (once(), once());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stderr.is_empty());
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_friction")).args(["price", "--bogus", "x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64));
    assert!(!out.stderr.is_empty());
}
