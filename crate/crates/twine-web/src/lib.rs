//! Browser bindings for the demo page in `www/`.
//!
//! The `*_json` functions hold the logic and return JSON text, so they run
//! and test natively. The exported wrappers only turn errors into JS errors.

use serde::Serialize;
use twine::bench::{run_benchmark, BenchConfig, Method};
use twine::noise::NoiseModel;
use twine::vote::{vote, Distribution, VotingConfig};
use wasm_bindgen::prelude::*;

/// Widest register the compilers are offered for.
pub const MAX_COMPILE_N: u32 = 128;
/// Widest register simulated in the page; the browser runs one thread.
pub const MAX_SIM_N: u32 = 10;

#[derive(Serialize)]
struct CountRow {
    n: usize,
    method: String,
    native_two_qubit: usize,
    cnot_equivalent: usize,
    two_qubit_depth: usize,
}

#[derive(Serialize)]
struct FidelityRow {
    n: usize,
    method: String,
    f_proc: f64,
}

fn check_range(n_min: u32, n_max: u32, limit: u32) -> Result<(), String> {
    if n_min == 0 || n_min > n_max || n_max > limit {
        return Err(format!(
            "need 1 <= n_min <= n_max <= {limit}, got {n_min}..{n_max}"
        ));
    }
    Ok(())
}

/// Two-qubit counts and depth of every method for each n in the range.
pub fn gate_counts_json(n_min: u32, n_max: u32) -> Result<String, String> {
    check_range(n_min, n_max, MAX_COMPILE_N)?;
    let mut rows = Vec::new();
    for n in n_min as usize..=n_max as usize {
        for method in Method::ALL {
            let c = method.compile(n).map_err(|e| e.to_string())?;
            rows.push(CountRow {
                n,
                method: method.to_string(),
                native_two_qubit: c.native_count(),
                cnot_equivalent: c.cnot_count(),
                two_qubit_depth: c.two_qubit_depth(),
            });
        }
    }
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

/// Process fidelity of every method under two-qubit depolarizing noise.
pub fn fidelity_curve_json(
    n_min: u32,
    n_max: u32,
    p2: f64,
    m: u32,
    shots: u32,
    seed: u64,
) -> Result<String, String> {
    check_range(n_min, n_max, MAX_SIM_N)?;
    let mut rows = Vec::new();
    for n in n_min as usize..=n_max as usize {
        for method in Method::ALL {
            let config = BenchConfig {
                m: m as usize,
                shots: shots as u64,
                seed,
                noise: NoiseModel::depolarizing(p2),
                ..BenchConfig::new(n, method)
            };
            let r = run_benchmark(&config).map_err(|e| e.to_string())?;
            rows.push(FidelityRow {
                n,
                method: method.to_string(),
                f_proc: r.f_proc,
            });
        }
    }
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

/// Vote over `variants`, a JSON array of `{bitstring: probability}` maps.
/// A threshold of 0 picks one automatically. The result carries the voted
/// distribution and, if `target` is non-empty, its success probability.
pub fn vote_json(variants: &str, threshold: u32, target: &str) -> Result<String, String> {
    let variants: Vec<Distribution> =
        serde_json::from_str(variants).map_err(|e| format!("variants: {e}"))?;
    let mut config = VotingConfig::auto(variants);
    if threshold > 0 {
        config.threshold = threshold as usize;
    }
    let out = vote(&config).map_err(|e| e.to_string())?;
    let mut json = serde_json::to_value(&out).map_err(|e| e.to_string())?;
    if !target.is_empty() {
        json["target"] = target.into();
        json["success"] = out.success(target).into();
    }
    Ok(json.to_string())
}

#[wasm_bindgen]
pub fn gate_counts(n_min: u32, n_max: u32) -> Result<String, JsError> {
    gate_counts_json(n_min, n_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn fidelity_curve(
    n_min: u32,
    n_max: u32,
    p2: f64,
    m: u32,
    shots: u32,
    seed: u64,
) -> Result<String, JsError> {
    fidelity_curve_json(n_min, n_max, p2, m, shots, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn plurality_vote(variants: &str, threshold: u32, target: &str) -> Result<String, JsError> {
    vote_json(variants, threshold, target).map_err(|e| JsError::new(&e))
}
