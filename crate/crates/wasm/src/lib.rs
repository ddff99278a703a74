//! Browser bindings: eigenfunction profiles, σ_r curves and deficit sweeps.
//!
//! Each export is a thin wrapper over a plain function so the numerics can be
//! tested natively.

use radlab::experiments::{direction_sweep, Direction};
use radlab::radsets::{sigma_r, RadialSet};
use radlab::spectral::build_basis;
use radlab::Dimension;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest basis index offered by the page.
pub const MAX_M: usize = 12;

fn dim(d: u32) -> Result<Dimension, String> {
    Dimension::new(d).map_err(|e| e.to_string())
}

/// ψ_m(r) at `n` evenly spaced radii in [0, r_max].
pub fn eigenfunction_values(d: u32, m: usize, r_max: f64, n: usize) -> Result<Vec<f64>, String> {
    if m > MAX_M {
        return Err(format!("m must be at most {MAX_M}"));
    }
    if !(r_max > 0.0) || n < 2 {
        return Err("need r_max > 0 and at least 2 points".into());
    }
    let sys = build_basis(dim(d)?, m.max(1)).map_err(|e| e.to_string())?;
    let psi = sys.psi(m);
    Ok((0..n)
        .map(|i| psi.eval(r_max * i as f64 / (n - 1) as f64).re)
        .collect())
}

/// λ_{d,m} for m = 0..=max_m.
pub fn eigenvalue_list(d: u32, max_m: usize) -> Result<Vec<f64>, String> {
    let d = dim(d)?;
    Ok((0..=max_m.min(MAX_M))
        .map(|m| radlab::scalars::eigenvalue_lambda(d, m as u32))
        .collect())
}

/// σ_r(A×B) for the annuli A = {a0 ≤ |x| ≤ a1}, B = {b0 ≤ |y| ≤ b1} at `n`
/// radii in (0, r_max].
pub fn sigma_values(d: u32, a: [f64; 2], b: [f64; 2], r_max: f64, n: usize) -> Result<Vec<f64>, String> {
    let d = dim(d)?;
    let sa = RadialSet::annulus(d, a[0], a[1]).map_err(|e| e.to_string())?;
    let sb = RadialSet::annulus(d, b[0], b[1]).map_err(|e| e.to_string())?;
    if !(r_max > 0.0) || n < 1 {
        return Err("need r_max > 0 and at least 1 point".into());
    }
    (1..=n)
        .map(|i| sigma_r(&sa, &sb, r_max * i as f64 / n as f64).map_err(|e| e.to_string()))
        .collect()
}

#[derive(Serialize)]
struct SweepView {
    eps: Vec<f64>,
    one_minus_phi: Vec<f64>,
    ratio_phi: Vec<Option<f64>>,
    c2: f64,
    c3: f64,
    predicted_c2: f64,
    limiting_ratio_phi: f64,
    passed: bool,
}

/// Sweep of 1 − Φ along ψ_m as JSON.
pub fn sweep_json(d: u32, m: usize, symmetric: bool, eps_max: f64) -> Result<String, String> {
    if !(eps_max > 0.0 && eps_max <= 0.2) {
        return Err("eps_max must lie in (0, 0.2]".into());
    }
    let eps: Vec<f64> = (1..=5).map(|k| eps_max * k as f64 / 5.0).collect();
    let r = direction_sweep(dim(d)?, Direction { m, symmetric }, &eps).map_err(|e| e.to_string())?;
    let view = SweepView {
        eps: r.points.iter().map(|p| p.eps).collect(),
        one_minus_phi: r.points.iter().map(|p| p.one_minus_phi).collect(),
        ratio_phi: r.points.iter().map(|p| p.ratio_phi).collect(),
        c2: r.c2,
        c3: r.c3,
        predicted_c2: r.predicted_c2,
        limiting_ratio_phi: r.limiting_ratio_phi,
        passed: r.passed(),
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

fn js(e: String) -> JsValue {
    JsValue::from_str(&e)
}

#[wasm_bindgen]
pub fn eigenfunction(d: u32, m: usize, r_max: f64, n: usize) -> Result<Vec<f64>, JsValue> {
    eigenfunction_values(d, m, r_max, n).map_err(js)
}

#[wasm_bindgen]
pub fn eigenvalues(d: u32, max_m: usize) -> Result<Vec<f64>, JsValue> {
    eigenvalue_list(d, max_m).map_err(js)
}

#[wasm_bindgen]
pub fn sigma_curve(d: u32, a0: f64, a1: f64, b0: f64, b1: f64, r_max: f64, n: usize) -> Result<Vec<f64>, JsValue> {
    sigma_values(d, [a0, a1], [b0, b1], r_max, n).map_err(js)
}

#[wasm_bindgen]
pub fn deficit_sweep(d: u32, m: usize, symmetric: bool, eps_max: f64) -> Result<String, JsValue> {
    sweep_json(d, m, symmetric, eps_max).map_err(js)
}
