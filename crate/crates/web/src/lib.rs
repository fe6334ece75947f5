//! WebAssembly bindings for the demo page in `www/`.
//!
//! Curves come back as flat `Float64Array`s of `(a, value, remainder)`
//! triples so the page can plot them without any marshalling.

use ltcert::empirical::semiclassical_sequence;
use ltcert::sphere::h_s2_closed_form;
use ltcert::torus::LatticeShellTable;
use wasm_bindgen::prelude::*;

/// Points per curve are capped to keep the page responsive.
pub const MAX_POINTS: usize = 4000;

fn sample_points(a_max: f64, count: usize) -> Result<Vec<f64>, String> {
    if !(a_max > 0.0 && a_max.is_finite()) {
        return Err(format!("a_max must be positive, got {a_max}"));
    }
    if !(2..=MAX_POINTS).contains(&count) {
        return Err(format!(
            "point count must lie in 2..={MAX_POINTS}, got {count}"
        ));
    }
    Ok((1..=count)
        .map(|i| a_max * i as f64 / count as f64)
        .collect())
}

/// `(a, H_S2(a), (H − 1 + 8/(3πa))a³)` on `count` points of `(0, a_max]`.
pub fn sphere_curve_points(a_max: f64, count: usize) -> Result<Vec<f64>, String> {
    let mut out = Vec::with_capacity(3 * count);
    for a in sample_points(a_max, count)? {
        // closed form is O(1) per point
        let h = h_s2_closed_form(a).map_err(|e| e.to_string())?.value;
        out.extend([
            a,
            h,
            (h - 1.0 + 8.0 / (3.0 * std::f64::consts::PI * a)) * a.powi(3),
        ]);
    }
    Ok(out)
}

/// `(a, H_T2(a), R(a))` on `count` points of `(0, a_max]`.
pub fn torus_curve_points(a_max: f64, count: usize) -> Result<Vec<f64>, String> {
    if a_max > 200.0 {
        return Err(format!("torus curves stop at a = 200, got {a_max}"));
    }
    let tol = 1e-9;
    let points = sample_points(a_max, count)?;
    let table = LatticeShellTable::build(LatticeShellTable::required_norm(a_max.powi(4), tol))
        .map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * count);
    for a in points {
        let h = table.h_t2(a, tol).map_err(|e| e.to_string())?.value;
        let r = table.remainder(a, tol).map_err(|e| e.to_string())?.r;
        out.extend([a, h, r]);
    }
    Ok(out)
}

/// `(N, measured ratio, (N² − 1)/(2πN²))` for `N = 2..=n_max`.
pub fn semiclassical_points(n_max: usize) -> Result<Vec<f64>, String> {
    if n_max > 24 {
        return Err(format!("N up to 24 in the browser, got {n_max}"));
    }
    let seq = semiclassical_sequence(n_max).map_err(|e| e.to_string())?;
    Ok(seq
        .into_iter()
        .flat_map(|p| [p.n as f64, p.ratio, p.closed_form])
        .collect())
}

#[wasm_bindgen(js_name = sphereCurve)]
pub fn sphere_curve(a_max: f64, count: usize) -> Result<Vec<f64>, JsError> {
    sphere_curve_points(a_max, count).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = torusCurve)]
pub fn torus_curve(a_max: f64, count: usize) -> Result<Vec<f64>, JsError> {
    torus_curve_points(a_max, count).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = semiclassicalRatios)]
pub fn semiclassical_ratios(n_max: usize) -> Result<Vec<f64>, JsError> {
    semiclassical_points(n_max).map_err(|e| JsError::new(&e))
}

/// `3π/32`, the constant the measured ratios stay below.
#[wasm_bindgen(js_name = ltConstant)]
pub fn lt_constant() -> f64 {
    ltcert::LT_CONSTANT
}
