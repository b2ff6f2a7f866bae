use serde_json::Value;

use persuasion_web::{check_json, evaluate_json, example_json, parse_model, solve_lp_json};

fn example() -> (String, String) {
    let v: Value = serde_json::from_str(&example_json()).unwrap();
    (v["instance"].to_string(), v["scheme"].to_string())
}

#[test]
fn the_example_is_private_but_not_one_worst_case() {
    let (inst, scheme) = example();
    let private: Value = serde_json::from_str(&check_json(&inst, &scheme, "private", 0).unwrap()).unwrap();
    assert_eq!(private["ok"], true);
    let leaky: Value = serde_json::from_str(&check_json(&inst, &scheme, "kworst", 1).unwrap()).unwrap();
    assert_eq!(leaky["ok"], false);
    assert!(leaky["violation"].is_object());
    assert!(check_json(&inst, &scheme, "sideways", 1).is_err());
}

#[test]
fn lp_value_and_scheme() {
    let (inst, _) = example();
    let out: Value = serde_json::from_str(&solve_lp_json(&inst, 0).unwrap()).unwrap();
    assert_eq!(out["value"], "9/4");
    assert_eq!(out["decimal"], "2.250000");
    // the returned scheme checks out
    let verdict = check_json(&inst, &out["scheme"].to_string(), "private", 0).unwrap();
    assert!(verdict.contains("\"ok\": true"));
    assert!(solve_lp_json(&inst, 3).is_err());
}

#[test]
fn evaluation_on_the_cycle() {
    let (inst, scheme) = example();
    let empty = r#"{"kind":"fixed","pattern":{"n":3,"edges":[]}}"#;
    let quiet: Value = serde_json::from_str(&evaluate_json(&inst, &scheme, empty, 1, 0).unwrap()).unwrap();
    assert_eq!(quiet["value"], "9/4");
    let cycle = r#"{"kind":"fixed","pattern":{"n":3,"edges":[[2,1],[3,2],[1,3]]}}"#;
    let out: Value = serde_json::from_str(&evaluate_json(&inst, &scheme, cycle, 1, 0).unwrap()).unwrap();
    assert_eq!(out["method"], "exact");
    let v: persuasion_core::Rational = out["value"].as_str().unwrap().parse().unwrap();
    assert!(v < persuasion_core::q(9, 4));
}

#[test]
fn model_specs() {
    assert!(parse_model("kbroadcast:2").is_ok());
    assert!(parse_model("ring:2").is_err());
    assert!(parse_model("kstar").is_err());
    assert!(parse_model(r#"{"kind":"ker","k":1}"#).is_ok());
}
