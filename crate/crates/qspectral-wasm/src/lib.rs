//! wasm-bindgen surface for the browser demo: matrix generation, S-spectrum,
//! pseudo-resolvent norm fields over a slice half-plane, and resolvent
//! growth probes. Everything takes and returns JSON strings or flat float
//! buffers so the page needs no framework.
//!
//! The logic lives in plain functions returning `Result<_, String>`; the
//! `#[wasm_bindgen]` wrappers only translate errors, so the crate also
//! compiles and tests on native targets.

use qspectral::perturb::{self, Arc, ArcSpectrumEnsemble, SegmentProbe};
use qspectral::quat::{Quaternion, SpherePoint, E1};
use qspectral::sampling;
use qspectral::spectrum;
use qspectral::QMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

fn parse_matrix(json: &str) -> Result<QMatrix, String> {
    serde_json::from_str(json).map_err(|e| format!("bad matrix JSON: {e}"))
}

fn spectrum_json_impl(matrix_json: &str) -> Result<String, String> {
    let t = parse_matrix(matrix_json)?;
    let spec = spectrum::s_spectrum(&t).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&spec).expect("spectrum serializes"))
}

fn resolvent_field_impl(
    matrix_json: &str,
    u_min: f64,
    u_max: f64,
    v_min: f64,
    v_max: f64,
    nu: u32,
    nv: u32,
) -> Result<Vec<f64>, String> {
    if nu < 2 || nv < 2 || nu * nv > 1_000_000 {
        return Err("grid must be at least 2×2 and at most 1e6 points".into());
    }
    let t = parse_matrix(matrix_json)?;
    let mut out = Vec::with_capacity((nu * nv) as usize);
    for iv in 0..nv {
        let v = v_max - (v_max - v_min) * iv as f64 / (nv - 1) as f64;
        for iu in 0..nu {
            let u = u_min + (u_max - u_min) * iu as f64 / (nu - 1) as f64;
            let s = Quaternion::from_real(u) + E1 * v;
            let smin = spectrum::pencil_smallest_singular_value(&t, &s)
                .map_err(|e| e.to_string())?
                .max(1e-300);
            out.push(-smin.log10());
        }
    }
    Ok(out)
}

fn random_matrix_impl(kind: &str, n: u32, seed: u32, param: f64) -> Result<String, String> {
    if !(1..=16).contains(&n) {
        return Err("n must lie in 1..=16".into());
    }
    let n = n as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    let t = match kind {
        "gaussian" => sampling::gaussian_matrix(&mut rng, n),
        "halfcircle" | "halfcircle-perturbed" => {
            let (a, _) = ArcSpectrumEnsemble::new(Arc::HalfCircle { radius: 1.0 }, n, seed as u64)
                .generate();
            if kind == "halfcircle" || param == 0.0 {
                a
            } else {
                let b = perturb::schatten_perturbation(&mut rng, n, 2, param);
                a.add(&b)
            }
        }
        "triangular" => sampling::gaussian_block_triangular(&mut rng, n, n.div_ceil(2)),
        other => return Err(format!("unknown matrix kind `{other}`")),
    };
    Ok(serde_json::to_string(&t).expect("matrix serializes"))
}

fn growth_json_impl(n: u32, k: u32, bnorm: f64, seed: u32, probe_t: f64) -> Result<String, String> {
    if !(2..=16).contains(&n) || k < 1 || !(0.0..1.0).contains(&bnorm) {
        return Err("want 2 <= n <= 16, k >= 1, 0 <= bnorm < 1".into());
    }
    if !(probe_t > 0.0 && probe_t < 1.0) {
        return Err("probe_t must lie in (0, 1)".into());
    }
    let arc = Arc::HalfCircle { radius: 1.0 };
    let (a, _) = ArcSpectrumEnsemble::new(arc, n as usize, seed as u64).generate();
    let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
    let b = perturb::schatten_perturbation(&mut rng, n as usize, k as usize, bnorm);
    let th = std::f64::consts::PI * probe_t;
    let probe = SegmentProbe::from_arc(
        &arc,
        probe_t,
        (th.cos(), th.sin()),
        SegmentProbe::default_distances(),
    )
    .map_err(|e| e.to_string())?;
    let report =
        perturb::growth_experiment(&a, &b, k as usize, &probe).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&report).expect("report serializes"))
}

fn spectrum_distance_impl(matrix_json: &str, u: f64, v: f64) -> Result<f64, String> {
    let t = parse_matrix(matrix_json)?;
    let spec = spectrum::s_spectrum(&t).map_err(|e| e.to_string())?;
    Ok(spec.min_distance(SpherePoint::new(u, v)))
}

/// S-spectrum of a matrix given as JSON; returns
/// `{"spheres":[{"u":..,"v":..,"mult":..}, ..]}`.
#[wasm_bindgen]
pub fn spectrum_json(matrix_json: &str) -> Result<String, JsError> {
    spectrum_json_impl(matrix_json).map_err(|m| JsError::new(&m))
}

/// `log10 ‖Q_{u+Jv}(T)‖` sampled on an `nu × nv` grid of the slice
/// half-plane, row-major with `v` descending (image order). The norm is
/// `1/σ_min` of the pencil, capped at the numerical floor.
#[wasm_bindgen]
pub fn resolvent_field(
    matrix_json: &str,
    u_min: f64,
    u_max: f64,
    v_min: f64,
    v_max: f64,
    nu: u32,
    nv: u32,
) -> Result<Vec<f64>, JsError> {
    resolvent_field_impl(matrix_json, u_min, u_max, v_min, v_max, nu, nv)
        .map_err(|m| JsError::new(&m))
}

/// Demo matrix generators. Kinds: `gaussian`, `halfcircle` (normal ensemble
/// on the unit half-circle), `halfcircle-perturbed` (plus a Schatten-2
/// perturbation of norm `param`), `triangular` (invariant leading block of
/// size n/2).
#[wasm_bindgen]
pub fn random_matrix(kind: &str, n: u32, seed: u32, param: f64) -> Result<String, JsError> {
    random_matrix_impl(kind, n, seed, param).map_err(|m| JsError::new(&m))
}

/// Growth probe for the half-circle ensemble with a Schatten-`k`
/// perturbation: anchors at arc parameter `probe_t`, probes radially, and
/// returns the full report (rows, fitted constant, slopes) as JSON.
#[wasm_bindgen]
pub fn growth_json(n: u32, k: u32, bnorm: f64, seed: u32, probe_t: f64) -> Result<String, JsError> {
    growth_json_impl(n, k, bnorm, seed, probe_t).map_err(|m| JsError::new(&m))
}

/// Distance from the class of `u + Jv` to the S-spectrum of the matrix;
/// handy for hover readouts.
#[wasm_bindgen]
pub fn spectrum_distance(matrix_json: &str, u: f64, v: f64) -> Result<f64, JsError> {
    spectrum_distance_impl(matrix_json, u, v).map_err(|m| JsError::new(&m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_json_roundtrip() {
        let m = random_matrix_impl("halfcircle", 6, 7, 0.0).unwrap();
        let spec = spectrum_json_impl(&m).unwrap();
        assert!(spec.starts_with(r#"{"spheres":["#));
        let parsed: serde_json::Value = serde_json::from_str(&spec).unwrap();
        let spheres = parsed["spheres"].as_array().unwrap();
        let total: u64 = spheres.iter().map(|s| s["mult"].as_u64().unwrap()).sum();
        assert_eq!(total, 6);
    }

    #[test]
    fn field_shape_and_peaks() {
        let m = random_matrix_impl("halfcircle", 4, 3, 0.0).unwrap();
        let field = resolvent_field_impl(&m, -1.5, 1.5, 0.0, 1.5, 40, 30).unwrap();
        assert_eq!(field.len(), 1200);
        // The spectrum sits on the unit half-circle, so the field must peak
        // well above its far-corner value.
        let far = field[0];
        let max = field.iter().cloned().fold(f64::MIN, f64::max);
        assert!(max > far + 1.0, "field should peak near the spectrum");
    }

    #[test]
    fn growth_report_parses() {
        let rep = growth_json_impl(6, 2, 0.05, 7, 0.5).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&rep).unwrap();
        assert!(parsed["rows"].as_array().unwrap().len() > 4);
        assert!(parsed["slope_loglog_q"].is_number());
    }

    #[test]
    fn distance_readout() {
        let m = random_matrix_impl("halfcircle", 5, 2, 0.0).unwrap();
        // Points of the unit half-circle lie on the spectrum.
        let on = spectrum_distance_impl(&m, 0.0, 1.0).unwrap();
        assert!(on < 1e-8, "distance on the arc: {on}");
        let off = spectrum_distance_impl(&m, 0.0, 2.0).unwrap();
        assert!((off - 1.0).abs() < 1e-6, "distance from (0,2): {off}");
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(random_matrix_impl("nope", 4, 1, 0.0).is_err());
        assert!(random_matrix_impl("gaussian", 0, 1, 0.0).is_err());
        assert!(spectrum_json_impl("{]").is_err());
        assert!(growth_json_impl(6, 0, 0.05, 7, 0.5).is_err());
    }
}
