//! Evaluation of each model at one sample of a sweep.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use anyhow::{anyhow, Result};
use cagecalc::cellsolve::{far_field_constants, CellOptions, FarFieldConstants};
use cagecalc::discrete::{solve_helmholtz, solve_laplace, DiscreteOptions};
use cagecalc::geometry::{build_cage, CageConfig, CageGeometry, Curve, WireModel, WireShape};
use cagecalc::homogenized::{
    alpha_of, helmholtz_thick_interior, helmholtz_thin_interior, laplace_thick_interior, laplace_thin_interior,
    neumann_shell, Equation, OuterSeries,
};
use cagecalc::resonance::{circle_report, find_resonances, square_report, CellInputs, ModeSpec, ResonanceReport};
use cagecalc::Error;
use num_complex::Complex64;

use crate::config::Model;

/// Far-field constants, computed once per (shape, δ, model).
#[derive(Default)]
pub struct CellCache {
    map: Mutex<HashMap<(WireShape, u64, WireModel), Arc<FarFieldConstants>>>,
}

impl CellCache {
    pub fn get(&self, shape: WireShape, delta: f64, model: WireModel) -> Result<Arc<FarFieldConstants>> {
        let key = (shape, delta.to_bits(), model);
        if let Some(c) = self.map.lock().unwrap().get(&key) {
            return Ok(c.clone());
        }
        let c = Arc::new(far_field_constants(shape, delta, model, &CellOptions::default())?);
        self.map.lock().unwrap().insert(key, c.clone());
        Ok(c)
    }
}

/// One sample: cage, source and probes.
pub struct Sample<'a> {
    pub cage: CageConfig,
    pub equation: Equation,
    pub k: f64,
    pub z0: Complex64,
    pub probes: &'a [Complex64],
    pub solver: DiscreteOptions,
}

/// Values at each probe, NaN where the model does not apply, plus a flag.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelOutput {
    pub values: Vec<f64>,
    pub flag: Option<String>,
    pub report: Option<ResonanceReport>,
}

impl ModelOutput {
    fn values(values: Vec<f64>) -> Self {
        Self { values, flag: None, report: None }
    }

    fn flagged(n: usize, flag: impl Into<String>) -> Self {
        Self { values: vec![f64::NAN; n], flag: Some(flag.into()), report: None }
    }
}

/// Solver failures abort the sweep; regime problems only flag the row.
pub enum Outcome {
    Done(ModelOutput),
    Failed(anyhow::Error),
}

pub fn geometry(cage: &CageConfig) -> Result<CageGeometry> {
    if cage.m == 0 {
        return Ok(CageGeometry::free_space());
    }
    Ok(build_cage(cage)?)
}

fn regime_flag(e: &Error) -> Option<&'static str> {
    match e {
        Error::InvalidRegime { .. } => Some("invalid-regime"),
        Error::NearResonance { .. } => Some("near-resonance"),
        Error::DegenerateMode => Some("degenerate-mode"),
        Error::ZeroDamping => Some("zero-damping"),
        Error::NotImplemented(_) => Some("unsupported"),
        Error::Domain(_) => Some("out-of-domain"),
        Error::WireOverlap { .. } => Some("wire-overlap"),
        _ => None,
    }
}

pub fn evaluate(model: Model, s: &Sample, cells: &CellCache) -> Outcome {
    let n = s.probes.len();
    let r = match model {
        Model::Discrete => discrete(s),
        Model::Thin => thin(s),
        Model::Thick => thick(s, cells),
        Model::Resonance => resonance(s, cells),
        Model::NeumannShell => shell(s, cells),
    };
    match r {
        Ok(out) => Outcome::Done(out),
        Err(e) => match e.downcast_ref::<Error>().and_then(regime_flag) {
            Some(flag) => Outcome::Done(ModelOutput::flagged(n, flag)),
            None => Outcome::Failed(e),
        },
    }
}

fn discrete(s: &Sample) -> Result<ModelOutput> {
    let n = s.probes.len();
    if s.cage.m > 0 && s.cage.shape != WireShape::Disk {
        return Ok(ModelOutput::flagged(n, "unsupported"));
    }
    let g = geometry(&s.cage)?;
    let sol = match s.equation {
        Equation::Laplace => solve_laplace(&g, s.z0, &s.solver)?,
        Equation::Helmholtz => solve_helmholtz(&g, s.k, s.z0, &s.solver)?,
    };
    let mut flag = None;
    let values = s
        .probes
        .iter()
        .map(|&z| {
            let v = match s.equation {
                Equation::Laplace => sol.gradient_norm(z),
                Equation::Helmholtz => sol.evaluate(z).map(|v| v.norm()),
            };
            v.unwrap_or_else(|_| {
                flag = Some("inside-wire".to_string());
                f64::NAN
            })
        })
        .collect();
    Ok(ModelOutput { values, flag, report: None })
}

/// Probe quantity from an interior series: |∇φ| for Laplace, |φ| for Helmholtz.
fn series_values(series: &OuterSeries, probes: &[Complex64]) -> ModelOutput {
    let mut flag = None;
    let values = probes
        .iter()
        .map(|&z| {
            if z.norm() >= 1.0 {
                flag = Some("exterior-probe".to_string());
                return f64::NAN;
            }
            match series.equation {
                Equation::Helmholtz => series.value_at(z.norm(), z.arg()).norm(),
                Equation::Laplace if z.norm() == 0.0 => series.gradient_at_origin(),
                Equation::Laplace => {
                    let h = 1e-6;
                    let v = |w: Complex64| series.value_at(w.norm(), w.arg());
                    let gx = (v(z + h) - v(z - h)) / (2.0 * h);
                    let gy = (v(z + Complex64::new(0.0, h)) - v(z - Complex64::new(0.0, h))) / (2.0 * h);
                    (gx.norm_sqr() + gy.norm_sqr()).sqrt()
                }
            }
        })
        .collect();
    ModelOutput { values, flag, report: None }
}

fn circle_only(s: &Sample) -> Option<ModelOutput> {
    (s.cage.curve != Curve::UnitCircle || s.cage.m == 0).then(|| ModelOutput::flagged(s.probes.len(), "unsupported"))
}

fn thin(s: &Sample) -> Result<ModelOutput> {
    if let Some(out) = circle_only(s) {
        return Ok(out);
    }
    let alpha = alpha_of(s.cage.delta, s.cage.shape.a0(), s.cage.epsilon())?;
    let series = match s.equation {
        Equation::Laplace => laplace_thin_interior(s.z0, alpha)?,
        Equation::Helmholtz => helmholtz_thin_interior(s.k, s.z0, alpha)?,
    };
    Ok(series_values(&series, s.probes))
}

fn thick(s: &Sample, cells: &CellCache) -> Result<ModelOutput> {
    if let Some(out) = circle_only(s) {
        return Ok(out);
    }
    let c = cells.get(s.cage.shape, s.cage.delta, s.cage.model)?;
    let eps = s.cage.epsilon();
    let series = match s.equation {
        Equation::Laplace => laplace_thick_interior(s.z0, c.tau_plus, eps)?,
        Equation::Helmholtz => helmholtz_thick_interior(s.k, s.z0, c.tau_plus, eps)?,
    };
    Ok(series_values(&series, s.probes))
}

pub fn cell_inputs(c: &FarFieldConstants, epsilon: f64) -> Result<CellInputs> {
    let stm = c
        .sigma_tilde_minus
        .ok_or_else(|| Error::NotImplemented(format!("second-order constants for {:?}", c.shape)))?;
    Ok(CellInputs { sigma_minus: c.sigma_minus, sigma_tilde_minus: stm, tau_plus: c.tau_plus, tau_minus: c.tau_minus, epsilon })
}

/// The simple Dirichlet mode whose k* is nearest k.
pub fn nearest_mode(curve: Curve, k: f64) -> Result<ModeSpec> {
    let modes = find_resonances(curve, 0.1, k + 4.0)?;
    modes
        .into_iter()
        .filter(|m| !m.degenerate)
        .min_by(|a, b| (a.k_star - k).abs().total_cmp(&(b.k_star - k).abs()))
        .ok_or_else(|| anyhow!("no simple mode below k = {}", k + 4.0))
}

pub fn report_for(mode: &ModeSpec, cage: &CageConfig, z0: Complex64, cells: &CellCache) -> Result<ResonanceReport> {
    let c = cells.get(cage.shape, cage.delta, cage.model)?;
    let inputs = cell_inputs(&c, cage.epsilon())?;
    let mut r = match mode.curve {
        Curve::UnitCircle => circle_report(mode, inputs, z0)?,
        Curve::UnitSquare => square_report(mode, inputs, z0)?,
    };
    for key in ["sigma_minus", "sigma_tilde_minus", "tau_plus", "tau_minus"] {
        r.provenance.insert(key.into(), "computed".into());
    }
    Ok(r)
}

fn resonance(s: &Sample, cells: &CellCache) -> Result<ModelOutput> {
    let n = s.probes.len();
    if s.equation != Equation::Helmholtz || s.cage.m == 0 {
        return Ok(ModelOutput::flagged(n, "unsupported"));
    }
    let mode = nearest_mode(s.cage.curve, s.k)?;
    let r = report_for(&mode, &s.cage, s.z0, cells)?;
    let values = s.probes.iter().map(|&z| r.field(s.k, z)).collect();
    Ok(ModelOutput { values, flag: None, report: Some(r) })
}

fn shell(s: &Sample, cells: &CellCache) -> Result<ModelOutput> {
    if let Some(out) = circle_only(s) {
        return Ok(out);
    }
    let c = cells.get(s.cage.shape, s.cage.delta, s.cage.model)?;
    let lambda = c.lambda.unwrap_or(f64::NAN);
    let est = neumann_shell(s.equation, s.k, s.z0, s.cage.epsilon() * lambda)?;
    let v = match s.equation {
        Equation::Laplace => est.interior_value.unwrap_or(f64::NAN),
        Equation::Helmholtz => est.correction_scale,
    };
    let mut out = ModelOutput::values(vec![v; s.probes.len()]);
    if est.regime_warning {
        out.flag = Some("regime-warning".into());
    }
    Ok(out)
}
