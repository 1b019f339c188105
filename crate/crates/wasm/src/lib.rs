//! Browser bindings: cell constants, a field image and a k sweep with the
//! predicted resonance peak. Results cross the boundary as JSON strings or
//! flat float arrays so the page needs no glue beyond wasm-bindgen's.

use cagecalc::cellsolve::{far_field_constants, CellOptions};
use cagecalc::discrete::{solve_helmholtz, DiscreteOptions};
use cagecalc::geometry::{build_cage, CageConfig, CageGeometry, Curve, WireModel, WireShape};
use cagecalc::resonance::{circle_report, find_resonances, CellInputs};
use num_complex::Complex64;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn shape_of(name: &str) -> Result<WireShape, JsError> {
    match name {
        "disk" => Ok(WireShape::Disk),
        "perpendicular" => Ok(WireShape::PerpendicularSegment),
        "tangential" => Ok(WireShape::TangentialSegment),
        "square" => Ok(WireShape::Square),
        _ => Err(JsError::new(&format!("unknown wire shape {name:?}"))),
    }
}

fn err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn cage(m: usize, delta: f64) -> Result<(CageConfig, CageGeometry), JsError> {
    let cfg = CageConfig::new(Curve::UnitCircle, m, delta, WireShape::Disk, WireModel::Model1);
    let g = build_cage(&cfg).map_err(err)?;
    Ok((cfg, g))
}

fn options() -> DiscreteOptions {
    DiscreteOptions::with_p(8)
}

/// Far-field constants of one periodic cell, as JSON.
#[wasm_bindgen]
pub fn cell_constants(shape: &str, delta: f64) -> Result<String, JsError> {
    let c = far_field_constants(shape_of(shape)?, delta, WireModel::Model1, &CellOptions::default()).map_err(err)?;
    serde_json::to_string(&c).map_err(err)
}

/// |φ| of the discrete solution on an n×n grid over [-half, half]², row by
/// row from the top; NaN inside wires. The source sits at (x0, 0).
#[wasm_bindgen]
pub fn field_image(m: usize, delta: f64, k: f64, x0: f64, half: f64, n: usize) -> Result<Vec<f32>, JsError> {
    let (_, g) = cage(m, delta)?;
    let sol = solve_helmholtz(&g, k, Complex64::new(x0, 0.0), &options()).map_err(err)?;
    let n = n.clamp(2, 400);
    let step = 2.0 * half / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        let y = half - i as f64 * step;
        for j in 0..n {
            let z = Complex64::new(-half + j as f64 * step, y);
            out.push(sol.evaluate(z).map(|v| v.norm() as f32).unwrap_or(f32::NAN));
        }
    }
    Ok(out)
}

/// Discrete |φ(0)| at `count` wavenumbers in [k_lo, k_hi], with the
/// resonance prediction for the circular mode nearest the window centre.
#[wasm_bindgen]
pub fn k_sweep(m: usize, delta: f64, x0: f64, k_lo: f64, k_hi: f64, count: usize) -> Result<String, JsError> {
    let (cfg, g) = cage(m, delta)?;
    let z0 = Complex64::new(x0, 0.0);
    let origin = Complex64::new(0.0, 0.0);
    let count = count.clamp(2, 2000);
    let ks: Vec<f64> = (0..count).map(|i| k_lo + (k_hi - k_lo) * i as f64 / (count - 1) as f64).collect();
    let discrete: Vec<Option<f64>> = ks
        .iter()
        .map(|&k| solve_helmholtz(&g, k, z0, &options()).and_then(|s| s.evaluate(origin)).map(|v| v.norm()).ok())
        .collect();

    let mid = 0.5 * (k_lo + k_hi);
    let mode = find_resonances(Curve::UnitCircle, 0.1, mid + 4.0)
        .map_err(err)?
        .into_iter()
        .filter(|md| !md.degenerate)
        .min_by(|a, b| (a.k_star - mid).abs().total_cmp(&(b.k_star - mid).abs()));
    let prediction = match mode {
        Some(mode) => {
            let c = far_field_constants(WireShape::Disk, delta, WireModel::Model1, &CellOptions::default()).map_err(err)?;
            let inputs = CellInputs {
                sigma_minus: c.sigma_minus,
                sigma_tilde_minus: c.sigma_tilde_minus.unwrap_or(0.0),
                tau_plus: c.tau_plus,
                tau_minus: c.tau_minus,
                epsilon: cfg.epsilon(),
            };
            match circle_report(&mode, inputs, z0) {
                Ok(r) => json!({
                    "k_star": mode.k_star,
                    "k_peak": r.k_peak,
                    "fwhm": r.fwhm,
                    "curve": ks.iter().map(|&k| r.field(k, origin)).collect::<Vec<_>>(),
                }),
                Err(e) => json!({ "error": e.to_string() }),
            }
        }
        None => serde_json::Value::Null,
    };
    Ok(json!({ "k": ks, "discrete": discrete, "prediction": prediction }).to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_constants_are_json() {
        let v: serde_json::Value = serde_json::from_str(&cell_constants("perpendicular", 0.25).unwrap()).unwrap();
        assert!((v["sigma_plus"].as_f64().unwrap() + 0.02233365979875236).abs() < 1e-9);
    }

    #[test]
    fn field_image_shape() {
        let img = field_image(12, 0.05, 1.0, 2.0, 1.0, 21).unwrap();
        assert_eq!(img.len(), 21 * 21);
        // Centre pixel is the origin; the pixel at (1, 0) is the centre of a wire.
        assert!(img[10 * 21 + 10].is_finite());
        assert!(img[10 * 21 + 20].is_nan());
    }

    #[test]
    fn sweep_brackets_the_first_peak() {
        let v: serde_json::Value = serde_json::from_str(&k_sweep(30, 0.1, 2.0, 2.3, 2.45, 31).unwrap()).unwrap();
        let d: Vec<f64> = v["discrete"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        let ks: Vec<f64> = v["k"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        let i = (0..d.len()).max_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap();
        assert!((ks[i] - 2.376).abs() < 0.01, "{}", ks[i]);
        let kp = v["prediction"]["k_peak"].as_f64().unwrap();
        assert!((kp - 2.3764).abs() < 1e-3);
    }
}
