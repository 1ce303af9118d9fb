//! WebAssembly bindings for the demo page in `www/`.
//!
//! Each exported function takes plain strings and returns a JSON string, so
//! the same logic is exercised by native tests through the `*_json`
//! functions.

use partavoid::formulas;
use partavoid::{count_avoiders, f_ratio, find_occurrence, CountRecord, SetPartition};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest `n` the page will enumerate for a general pattern. One-block and
/// all-singleton patterns use exact formulas and go up to [`MAX_FORMULA_N`].
pub const MAX_ENUM_N: usize = 11;
pub const MAX_FORMULA_N: usize = 300;

#[derive(Serialize)]
struct GrowthPoint {
    n: usize,
    count: String,
    f: Option<f64>,
}

#[derive(Serialize)]
struct Growth {
    pattern: String,
    pm: usize,
    target: Option<f64>,
    exact_formula: bool,
    points: Vec<GrowthPoint>,
}

#[derive(Serialize)]
struct Check {
    host: String,
    pattern: String,
    contains: bool,
    witness: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct Cuts {
    pattern: String,
    pm: usize,
    cuts: Vec<usize>,
    intervals: Vec<(usize, usize)>,
    labels: Vec<usize>,
    sba: usize,
    layered: Option<String>,
}

fn parse(text: &str) -> Result<SetPartition, String> {
    text.trim().parse().map_err(|e| format!("{e}"))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

/// `A_n(pattern)` and `F_n` for `n = 1..=n_max`.
pub fn growth_json(pattern: &str, n_max: usize) -> Result<String, String> {
    let tau = parse(pattern)?;
    let k = tau.n();
    if k == 0 {
        return Err("pattern must be nonempty".into());
    }
    let formula = k >= 2 && (tau.num_blocks() == 1 || tau.num_blocks() == k);
    let limit = if formula { MAX_FORMULA_N } else { MAX_ENUM_N };
    if n_max == 0 || n_max > limit {
        return Err(format!("n must be between 1 and {limit} for this pattern"));
    }
    let counts = if formula && tau.num_blocks() == 1 {
        formulas::block_recursion(k, n_max).map_err(|e| e.to_string())?
    } else if formula {
        (1..=n_max)
            .map(|n| formulas::singleton_count(k, n).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?
    } else {
        (1..=n_max)
            .map(|n| count_avoiders(&tau, n).map(|r| r.count).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?
    };
    let points = counts
        .into_iter()
        .zip(1..)
        .map(|(count, n)| {
            let rec = CountRecord { tau: tau.clone(), n, count };
            GrowthPoint { n, f: f_ratio(&rec).ok(), count: rec.count.to_string() }
        })
        .collect();
    let pm = tau.permeability().value;
    Ok(to_json(&Growth {
        pattern: tau.to_string(),
        pm,
        target: (pm > 0).then(|| 1.0 - 1.0 / pm as f64),
        exact_formula: formula,
        points,
    }))
}

pub fn check_json(host: &str, pattern: &str) -> Result<String, String> {
    let host = parse(host)?;
    let pattern = parse(pattern)?;
    let witness = find_occurrence(&host, &pattern).map(|o| o.map().to_vec());
    Ok(to_json(&Check {
        host: host.to_string(),
        pattern: pattern.to_string(),
        contains: witness.is_some(),
        witness,
    }))
}

pub fn permeability_json(pattern: &str) -> Result<String, String> {
    let tau = parse(pattern)?;
    let pm = tau.permeability();
    Ok(to_json(&Cuts {
        pattern: tau.to_string(),
        pm: pm.value,
        cuts: pm.witness.cuts().to_vec(),
        intervals: pm.witness.intervals(),
        labels: tau.labels().iter().map(|l| l + 1).collect(),
        sba: tau.sba(),
        layered: tau.layered_shape().map(|s| s.to_string()),
    }))
}

#[wasm_bindgen]
pub fn growth(pattern: &str, n_max: usize) -> Result<String, JsValue> {
    growth_json(pattern, n_max).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn check(host: &str, pattern: &str) -> Result<String, JsValue> {
    check_json(host, pattern).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn permeability(pattern: &str) -> Result<String, JsValue> {
    permeability_json(pattern).map_err(|e| JsValue::from_str(&e))
}
