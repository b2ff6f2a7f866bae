//! Browser bindings: persuasiveness check, persuasive LP, downstream
//! utility. Inputs and outputs are the same JSON documents the CLI uses.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use persuasion_core::appendix_c::appendix_c;
use persuasion_core::construct::optimal_private;
use persuasion_core::downstream::{downstream_utility_model, Estimate, Method};
use persuasion_core::lp::{self, build_persuasive_lp, scheme_from_solution, Objective};
use persuasion_core::persuasive::{check_k_worst_case, check_private, check_public, check_two_sided};
use persuasion_core::{BestResponseMode, Instance, LeakageModel, SignalingScheme};

/// Largest model support evaluated exactly before switching to sampling.
const EXACT_LIMIT: u128 = 20_000;

fn parse<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| format!("{what}: {e}"))
}

fn err(e: persuasion_core::Error) -> String {
    e.to_string()
}

/// `kstar:K`, `kclique:K`, `kbroadcast:K`, `ker:K`, or a model JSON document.
pub fn parse_model(spec: &str) -> Result<LeakageModel, String> {
    let spec = spec.trim();
    if spec.starts_with('{') {
        return parse("model", spec);
    }
    let (kind, k) = spec.split_once(':').ok_or_else(|| format!("model {spec:?} is not KIND:K"))?;
    let k: usize = k.trim().parse().map_err(|_| format!("model {spec:?}: bad count"))?;
    Ok(match kind.trim() {
        "kstar" => LeakageModel::KStar { k },
        "kclique" => LeakageModel::KClique { k },
        "kbroadcast" => LeakageModel::KBroadcast { k },
        "ker" => LeakageModel::KErdosRenyi { k },
        other => return Err(format!("unknown model kind {other:?}")),
    })
}

/// Verdict JSON for `kind` in `private | kworst | public | twosided`.
pub fn check_json(instance: &str, scheme: &str, kind: &str, k: usize) -> Result<String, String> {
    let inst: Instance = parse("instance", instance)?;
    let s: SignalingScheme = parse("scheme", scheme)?;
    let verdict = match kind {
        "private" => check_private(&inst, &s),
        "kworst" => check_k_worst_case(&inst, &s, k),
        "public" => check_public(&inst, &s),
        "twosided" => check_two_sided(&inst, &s, k),
        other => return Err(format!("unknown check {other:?}")),
    }
    .map_err(err)?;
    Ok(serde_json::to_string_pretty(&verdict.render(&s)).expect("verdict serializes"))
}

/// Optimal `k`-worst-case persuasive value and a scheme attaining it.
pub fn solve_lp_json(instance: &str, k: usize) -> Result<String, String> {
    let inst: Instance = parse("instance", instance)?;
    let sol = lp::solve(&build_persuasive_lp(&inst, k, Objective::Full).map_err(err)?).map_err(err)?;
    if !sol.is_optimal() {
        return Err(format!("LP ended {:?}", sol.status));
    }
    let scheme = scheme_from_solution(inst.n(), &sol.assignment).map_err(err)?;
    let out = json!({
        "k": k,
        "value": sol.value,
        "decimal": format!("{:.6}", sol.value.to_f64()),
        "scheme": scheme,
    });
    Ok(serde_json::to_string_pretty(&out).expect("json"))
}

/// Expected utility under `model`; exact when the support is small,
/// otherwise `samples` Monte Carlo draws from `seed`.
pub fn evaluate_json(
    instance: &str,
    scheme: &str,
    model: &str,
    samples: u32,
    seed: u32,
) -> Result<String, String> {
    let inst: Instance = parse("instance", instance)?;
    let s: SignalingScheme = parse("scheme", scheme)?;
    let m = parse_model(model)?;
    m.validate(inst.n()).map_err(err)?;
    let method = if m.support_size(inst.n()) <= EXACT_LIMIT {
        Method::Exact
    } else {
        Method::MonteCarlo { samples: samples.max(1) as u64, seed: seed as u64 }
    };
    let est = downstream_utility_model(&inst, &s, &m, method, BestResponseMode::Standard).map_err(err)?;
    let mut out = match &est {
        Estimate::Exact { value } => json!({ "method": "exact", "value": value }),
        Estimate::MonteCarlo { mean, stderr, samples, seed } => json!({
            "method": "monte-carlo",
            "value": mean,
            "stderr": stderr,
            "samples": samples,
            "seed": seed,
        }),
    };
    out["decimal"] = Value::String(format!("{:.6}", est.point().to_f64()));
    out["model"] = Value::String(m.label());
    Ok(serde_json::to_string_pretty(&out).expect("json"))
}

/// The three-receiver worked example and its private optimum, as starting
/// documents for the page.
pub fn example_json() -> String {
    let ex = appendix_c();
    serde_json::to_string_pretty(&json!({
        "instance": ex.instance,
        "scheme": optimal_private(&ex.instance).to_scheme(),
    }))
    .expect("json")
}

#[wasm_bindgen]
pub fn check(instance: &str, scheme: &str, kind: &str, k: usize) -> Result<String, JsError> {
    check_json(instance, scheme, kind, k).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = solveLp)]
pub fn solve_lp(instance: &str, k: usize) -> Result<String, JsError> {
    solve_lp_json(instance, k).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn evaluate(
    instance: &str,
    scheme: &str,
    model: &str,
    samples: u32,
    seed: u32,
) -> Result<String, JsError> {
    evaluate_json(instance, scheme, model, samples, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn example() -> String {
    example_json()
}
