//! Browser bindings for a few core operations. Every export returns a JSON
//! string so the page can render it without extra glue.

use num_complex::Complex64;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use twisted_core::exact::int;
use twisted_core::harmonics::harmonic_basis;
use twisted_core::laguerre::{eval_phi, laguerre_coeffs, phi_radial};
use twisted_core::spectral::spectral_projections;
use twisted_core::twisted::{GridSpec, PhiField};
use twisted_core::weyl::{verify_harmonic_batch, LadderConvention};

fn err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Exact coefficients of `L_k^{n-1}` and samples of `phi_k` on `[0, r_max]`.
pub fn laguerre_json(k: usize, n: usize, r_max: f64, samples: usize) -> Result<Value, String> {
    if n == 0 || k > 40 || samples < 2 || samples > 2000 || !(r_max > 0.0) {
        return Err("need n >= 1, k <= 40, 2 <= samples <= 2000 and r_max > 0".into());
    }
    let coeffs: Vec<String> = laguerre_coeffs(k, &int(n as i64 - 1)).iter().map(|c| c.to_string()).collect();
    let pts: Vec<[f64; 2]> = (0..samples)
        .map(|i| {
            let r = r_max * i as f64 / (samples - 1) as f64;
            [r, phi_radial(k, (n - 1) as f64, r)]
        })
        .collect();
    Ok(json!({ "k": k, "n": n, "coefficients": coeffs, "samples": pts }))
}

/// Runs the exact ladder identity on every basis element of `H_{p,q}(C^n)`.
pub fn ladder_json(n: usize, p: usize, q: usize, k: usize, lambda: i8) -> Result<Value, String> {
    if !(1..=3).contains(&n) || p + q > 4 || k > 6 || lambda.abs() != 1 {
        return Err("need 1 <= n <= 3, p + q <= 4, k <= 6 and lambda = +-1".into());
    }
    let basis = harmonic_basis(n, p, q);
    let reports = verify_harmonic_batch(&basis.elements, k, lambda, LadderConvention::Consistent).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = basis
        .elements
        .iter()
        .zip(&reports)
        .map(|(e, r)| json!({ "symbol": e.poly().to_string(), "status": r.status, "residual_terms": r.residual_terms.len(), "note": r.note }))
        .collect();
    Ok(json!({ "identity": reports.first().map(|r| r.identity.clone()), "rows": rows }))
}

/// Numeric `f x phi_k` at `z` for `f = phi_j` on C^1, against `2 pi delta_jk phi_k(z)`.
pub fn projection_json(j: usize, k: usize, x: f64, y: f64, steps: usize) -> Result<Value, String> {
    if j > 8 || k > 8 || !(16..=160).contains(&steps) || x.hypot(y) > 6.0 {
        return Err("need j, k <= 8, 16 <= steps <= 160 and |z| <= 6".into());
    }
    let grid = GridSpec::new(1, 12.0, steps).map_err(|e| e.to_string())?;
    let z = vec![Complex64::new(x, y)];
    let got = spectral_projections(&PhiField { k: j, n: 1 }, &[k], &grid, std::slice::from_ref(&z)).map_err(|e| e.to_string())?[0][0];
    let want = Complex64::new(if j == k { 2.0 * std::f64::consts::PI * eval_phi(k, 1, &z) } else { 0.0 }, 0.0);
    Ok(json!({ "numeric": [got.re, got.im], "closed_form": [want.re, want.im], "error": (got - want).norm() }))
}

#[wasm_bindgen]
pub fn laguerre(k: usize, n: usize, r_max: f64, samples: usize) -> Result<String, JsValue> {
    laguerre_json(k, n, r_max, samples).map(|v| v.to_string()).map_err(err)
}

#[wasm_bindgen]
pub fn ladder(n: usize, p: usize, q: usize, k: usize, lambda: i8) -> Result<String, JsValue> {
    ladder_json(n, p, q, k, lambda).map(|v| v.to_string()).map_err(err)
}

#[wasm_bindgen]
pub fn projection(j: usize, k: usize, x: f64, y: f64, steps: usize) -> Result<String, JsValue> {
    projection_json(j, k, x, y, steps).map(|v| v.to_string()).map_err(err)
}
