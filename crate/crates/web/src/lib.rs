//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes plain strings and numbers and returns a JSON string.
//! The `*_json` functions hold the logic and are what the native tests call.

use hgp_core::catalog::list_all;
use hgp_core::certify::{check_certificate, Certificate};
use hgp_core::search::{search_certificate, SearchConfig};
use hgp_core::{build_group, parse_rational_tuple, solve_invariant_form, GroupPresentation};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Browser searches stop well before they could exhaust tab memory.
pub const WEB_MAX_NODES: usize = 400_000;

/// An integer as a JSON number when it fits in `i64`, else a string.
fn big(x: &impl ToString) -> Value {
    let s = x.to_string();
    s.parse::<i64>()
        .map(Value::from)
        .unwrap_or(Value::String(s))
}

fn group(alpha: &str, beta: &str) -> Result<GroupPresentation, String> {
    let alpha = parse_rational_tuple(alpha).map_err(|e| format!("alpha: {e}"))?;
    let beta = parse_rational_tuple(beta).map_err(|e| format!("beta: {e}"))?;
    build_group(&alpha, &beta).map_err(|e| e.to_string())
}

pub fn catalog_json() -> Value {
    let rows: Vec<Value> = list_all()
        .iter()
        .map(|e| {
            let beta = match (&e.corrected_beta, e.suspect) {
                (Some(b), true) => b,
                _ => &e.beta,
            };
            json!({
                "label": e.label,
                "table": e.table,
                "alpha": e.alpha.to_string(),
                "beta": beta.to_string(),
                "word": e.word,
                "suspect": e.suspect,
            })
        })
        .collect();
    Value::Array(rows)
}

pub fn verify_json(alpha: &str, beta: &str, word: &str) -> Result<Value, String> {
    let gp = group(alpha, beta)?;
    let cert = Certificate::new(gp.alpha, gp.beta, word, None).map_err(|e| e.to_string())?;
    let report = check_certificate(&cert).map_err(|e| e.to_string())?;
    serde_json::to_value(report).map_err(|e| e.to_string())
}

pub fn search_json(
    alpha: &str,
    beta: &str,
    max_entry: u32,
    max_depth: u32,
) -> Result<Value, String> {
    let gp = group(alpha, beta)?;
    let cfg = SearchConfig {
        max_entry: Some(u64::from(max_entry)),
        max_depth: max_depth as usize,
        max_nodes: Some(WEB_MAX_NODES),
        threads: 1,
    };
    let outcome = search_certificate(&gp.gens, &cfg).map_err(|e| e.to_string())?;
    let found = outcome.found.as_ref().map(|(w, v)| {
        json!({
            "word": w.to_string(),
            "length": w.len(),
            "image": v.iter().map(big).collect::<Vec<_>>(),
        })
    });
    Ok(json!({
        "found": found,
        "truncated": outcome.truncated,
        "levels": outcome.levels,
    }))
}

pub fn invariant_form_json(alpha: &str, beta: &str) -> Result<Value, String> {
    let gp = group(alpha, beta)?;
    let form = solve_invariant_form(&gp.gens).map_err(|e| e.to_string())?;
    let t = gp.gens.transvection().map_err(|e| e.to_string())?;
    let lambda = form.transvection_scalar(&t).map_err(|e| e.to_string())?;
    let rows: Vec<Vec<Value>> = form
        .matrix()
        .to_rows()
        .iter()
        .map(|r| r.iter().map(big).collect())
        .collect();
    Ok(json!({
        "omega": rows,
        "v_r": t.v_r.iter().map(big).collect::<Vec<_>>(),
        "v_l": t.v_l.iter().map(big).collect::<Vec<_>>(),
        "lambda": lambda.to_string(),
        "f": gp.f.to_string(),
        "g": gp.g.to_string(),
    }))
}

fn to_js(result: Result<Value, String>) -> Result<String, JsError> {
    result.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn catalog() -> String {
    catalog_json().to_string()
}

#[wasm_bindgen]
pub fn verify(alpha: &str, beta: &str, word: &str) -> Result<String, JsError> {
    to_js(verify_json(alpha, beta, word))
}

#[wasm_bindgen]
pub fn search(alpha: &str, beta: &str, max_entry: u32, max_depth: u32) -> Result<String, JsError> {
    to_js(search_json(alpha, beta, max_entry, max_depth))
}

#[wasm_bindgen]
pub fn invariant_form(alpha: &str, beta: &str) -> Result<String, JsError> {
    to_js(invariant_form_json(alpha, beta))
}
