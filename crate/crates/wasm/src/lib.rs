//! wasm-bindgen exports for the browser demo in `www/`.
//!
//! The computations live in [`demo`] so they can be tested natively; the
//! exported functions only translate errors into JS exceptions.

pub mod demo;

use wasm_bindgen::prelude::*;

fn js(e: bor_depth::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `BoR_max` in bits for depths `1..=max_depth`.
#[wasm_bindgen(js_name = ceilingCurve)]
pub fn ceiling_curve(corpus_size: u32, relevant: u32, max_depth: u32) -> Result<Vec<f64>, JsError> {
    demo::ceiling_curve(corpus_size as u64, relevant as u64, max_depth as u64).map_err(js)
}

/// BoR of a selector with success rate `found_rate` at a fixed depth.
#[wasm_bindgen(js_name = shortlistBits)]
pub fn shortlist_bits(corpus_size: u32, relevant: u32, depth: u32, found_rate: f64) -> Result<f64, JsError> {
    demo::shortlist_bits(corpus_size as u64, relevant as u64, depth as u64, found_rate).map_err(js)
}

/// Discounted return of stopping at each depth `1..=max_depth` when the
/// gold tool sits at `gold_rank` (0 = not in the list).
#[wasm_bindgen(js_name = stopReturns)]
pub fn stop_returns(
    reward_kind: &str,
    corpus_size: u32,
    gold_rank: u32,
    max_depth: u32,
    step_cost: f64,
    gamma: f64,
) -> Result<Vec<f64>, JsError> {
    let kind = reward_kind.parse().map_err(js)?;
    let gold = (gold_rank > 0).then_some(gold_rank as usize);
    demo::stop_returns(kind, corpus_size as usize, gold, max_depth as usize, step_cost, gamma).map_err(js)
}

/// Trains and evaluates the standard methods on a synthetic benchmark.
/// Returns the summary as a JSON string.
#[wasm_bindgen]
pub fn simulate(preset: &str, data_seed: u32, num_queries: u32, epochs: u32) -> Result<String, JsError> {
    let sim = demo::simulate(preset, data_seed as u64, num_queries as usize, epochs as usize).map_err(js)?;
    serde_json::to_string(&sim).map_err(|e| JsError::new(&e.to_string()))
}
