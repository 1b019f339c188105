//! Sweeps over k, δ or M, and peak tracking over (δ, M).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{anyhow, Result};
use cagecalc::discrete::{solve_helmholtz, DiscreteOptions};
use cagecalc::homogenized::Equation;
use cagecalc::resonance::{locate_peak, ResonanceReport};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Config, Model, SweepSection, Variable};
use crate::models::{evaluate, geometry, nearest_mode, report_for, CellCache, ModelOutput, Outcome, Sample};

/// Twelve significant digits; NaN stays "nan" so grids keep their shape.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.11e}")
    }
}

fn json_num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

pub fn quantity(model: Model, eq: Equation) -> &'static str {
    match (model, eq) {
        (Model::NeumannShell, Equation::Laplace) => "value",
        (Model::NeumannShell, Equation::Helmholtz) => "scale",
        (_, Equation::Laplace) => "grad",
        (_, Equation::Helmholtz) => "abs",
    }
}

pub struct SweepOutput {
    pub csv: String,
    pub summary: Value,
    /// (sample index, sweep value, message) of the first failed solve.
    pub failure: Option<(usize, f64, String)>,
}

fn sample_at<'a>(cfg: &Config, s: &SweepSection, v: f64, probes: &'a [Complex64]) -> Sample<'a> {
    let (mut m, mut delta, mut k) = (cfg.cage.m, cfg.cage.delta, cfg.source.k);
    match s.variable {
        Variable::K => k = v,
        Variable::Delta => delta = v,
        Variable::M => m = v as usize,
    }
    Sample {
        cage: cfg.cage.core(m, delta),
        equation: cfg.source.equation,
        k,
        z0: cfg.source.z0(),
        probes,
        solver: DiscreteOptions { p: cfg.solver.p, c: None, symmetry: cfg.solver.symmetry },
    }
}

pub fn run_sweep(cfg: &Config, hash: &str) -> Result<SweepOutput> {
    let s = cfg.sweep.as_ref().ok_or_else(|| anyhow!("the config has no [sweep] section"))?;
    let values = s.values();
    let probes = s.probes();
    let mut models = s.models.clone();
    models.sort();
    models.dedup();
    let cells = CellCache::default();

    let rows: Vec<Vec<Outcome>> = values
        .par_iter()
        .map(|&v| {
            let sample = sample_at(cfg, s, v, &probes);
            models.iter().map(|&m| evaluate(m, &sample, &cells)).collect()
        })
        .collect();

    let eq = cfg.source.equation;
    let mut header = vec![s.variable.name().to_string()];
    for &m in &models {
        for p in 0..probes.len() {
            header.push(format!("{}.p{p}.{}", m.name(), quantity(m, eq)));
        }
        header.push(format!("{}.flag", m.name()));
    }

    let mut csv = format!("# config-hash={hash}\n{}\n", header.join(","));
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    let mut flag_counts: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let mut reports: BTreeMap<String, ResonanceReport> = BTreeMap::new();
    for (i, (row, &v)) in rows.into_iter().zip(&values).enumerate() {
        let mut cells_out = vec![num(v)];
        let mut col = 1;
        for (outcome, &m) in row.into_iter().zip(&models) {
            let out: ModelOutput = match outcome {
                Outcome::Done(o) => o,
                Outcome::Failed(e) => {
                    let summary = json!({
                        "config_hash": hash,
                        "failure": { "sample": i, "value": v, "model": m.name(), "error": format!("{e:#}") },
                    });
                    return Ok(SweepOutput { csv: String::new(), summary, failure: Some((i, v, format!("{e:#}"))) });
                }
            };
            for x in &out.values {
                columns[col].push(*x);
                cells_out.push(num(*x));
                col += 1;
            }
            col += 1;
            if let Some(f) = &out.flag {
                *flag_counts.entry(m.name().into()).or_default().entry(f.clone()).or_default() += 1;
            }
            cells_out.push(out.flag.unwrap_or_default());
            if let Some(r) = out.report {
                reports.entry(format!("{:?}", r.mode.indices)).or_insert(r);
            }
        }
        columns[0].push(v);
        csv.push_str(&cells_out.join(","));
        csv.push('\n');
    }

    let mut peaks = serde_json::Map::new();
    for (name, col) in header.iter().zip(&columns).skip(1) {
        if name.ends_with(".flag") {
            continue;
        }
        let best = col.iter().enumerate().filter(|(_, x)| x.is_finite()).max_by(|a, b| a.1.total_cmp(b.1));
        if let Some((i, &x)) = best {
            peaks.insert(name.clone(), json!({ "argmax": values[i], "max": x }));
        }
    }
    let summary = json!({
        "config_hash": hash,
        "variable": s.variable.name(),
        "count": values.len(),
        "columns": header,
        "probes": probes.iter().enumerate().map(|(i, z)| json!({ "name": format!("p{i}"), "z": [z.re, z.im] })).collect::<Vec<_>>(),
        "peaks": peaks,
        "flags": flag_counts,
        "resonance_reports": reports.values().collect::<Vec<_>>(),
        "failure": Value::Null,
    });
    Ok(SweepOutput { csv, summary, failure: None })
}

struct TrackEntry {
    delta: f64,
    m: usize,
    epsilon: f64,
    discrete: (f64, f64),
    predicted: Option<(f64, f64)>,
    flag: String,
}

/// Discrete peak of |φ(p0)| in [start, stop] for every (δ, M), next to the
/// resonance prediction for the nearest simple mode.
pub fn run_track(cfg: &Config, hash: &str) -> Result<SweepOutput> {
    let s = cfg.sweep.as_ref().ok_or_else(|| anyhow!("the config has no [sweep] section"))?;
    let t = s.track.as_ref().ok_or_else(|| anyhow!("the config has no [sweep.track] section"))?;
    let probe = s.probes()[0];
    let z0 = cfg.source.z0();
    let opts = DiscreteOptions { p: cfg.solver.p, c: None, symmetry: cfg.solver.symmetry };
    let cells = CellCache::default();
    let jobs: Vec<(f64, usize)> = t.deltas.iter().flat_map(|&d| t.ms.iter().map(move |&m| (d, m))).collect();

    let entries: Vec<Result<TrackEntry>> = jobs
        .par_iter()
        .map(|&(delta, m)| {
            let cage = cfg.cage.core(m, delta);
            let g = geometry(&cage)?;
            let amp = |k: f64| {
                solve_helmholtz(&g, k, z0, &opts).and_then(|sol| sol.evaluate(probe)).map(|v| v.norm()).unwrap_or(f64::NAN)
            };
            let mid = 0.5 * (s.start + s.stop);
            let report = nearest_mode(cage.curve, mid).and_then(|mode| report_for(&mode, &cage, z0, &cells));
            let mut discrete = locate_peak(amp, s.start.min(s.stop), s.start.max(s.stop), s.count, 1e-7);
            // Narrow peaks can fall between scan points; look near the prediction too.
            if let Ok(r) = &report {
                let reach = 5.0 * r.fwhm + 0.01;
                let near = locate_peak(amp, r.k_peak - reach, r.k_peak + reach, 21, 1e-8);
                if near.1 > discrete.1 {
                    discrete = near;
                }
            }
            let (predicted, flag) = match report {
                Ok(r) => (Some((r.k_peak, r.field(r.k_peak, probe))), String::new()),
                Err(e) => (None, format!("{e:#}").replace(',', ";")),
            };
            Ok(TrackEntry { delta, m, epsilon: cage.epsilon(), discrete, predicted, flag })
        })
        .collect();

    let mut csv = format!(
        "# config-hash={hash}\ndelta,m,epsilon,discrete.p0.k_peak,discrete.p0.peak,resonance.p0.k_peak,resonance.p0.peak,resonance.flag\n"
    );
    let mut table = Vec::new();
    for (i, e) in entries.into_iter().enumerate() {
        let e = match e {
            Ok(e) => e,
            Err(err) => {
                let (d, m) = jobs[i];
                let summary = json!({ "config_hash": hash, "failure": { "sample": i, "delta": d, "m": m, "error": format!("{err:#}") } });
                return Ok(SweepOutput { csv: String::new(), summary, failure: Some((i, d, format!("{err:#}"))) });
            }
        };
        let (pk, pv) = e.predicted.unwrap_or((f64::NAN, f64::NAN));
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            num(e.delta),
            e.m,
            num(e.epsilon),
            num(e.discrete.0),
            num(e.discrete.1),
            num(pk),
            num(pv),
            e.flag
        )
        .unwrap();
        table.push(json!({
            "delta": e.delta,
            "m": e.m,
            "epsilon": e.epsilon,
            "discrete": { "k_peak": json_num(e.discrete.0), "peak": json_num(e.discrete.1) },
            "resonance": { "k_peak": json_num(pk), "peak": json_num(pv) },
        }));
    }
    let summary = json!({
        "config_hash": hash,
        "variable": "k",
        "probe": [probe.re, probe.im],
        "peak_table": table,
        "failure": Value::Null,
    });
    Ok(SweepOutput { csv, summary, failure: None })
}
