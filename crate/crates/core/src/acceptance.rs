//! End-to-end acceptance checks. Each check runs on its own and returns a
//! one-line verdict; `cagecalc selftest` and the `acceptance` test target
//! print them.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use crate::cellsolve::{
    cell_dirichlet_numeric, cell_neumann_higher, delta_for_tau, dirichlet_constants, far_field_constants, fv_neumann,
    gap_measure, mu_check_numeric, tau_plus, CellOptions,
};
use crate::cellsolve::analytic::{segment_dirichlet, segment_neumann, small_delta_limit};
use crate::discrete::{free_field, solve_helmholtz, solve_laplace, DiscreteOptions};
use crate::error::Result;
use crate::geometry::{build_cage, CageConfig, CageGeometry, Curve, WireModel, WireShape};
use crate::homogenized::{alpha_of, laplace_thick_interior, laplace_thin_interior, Equation};
use crate::resonance::{
    circle_report, half_max_width, locate_peak, square_i2_literature, square_report, CellInputs, ModeSpec,
};

#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {} ({:.1} s)", self.id, self.detail, self.seconds)
    }
}

type Check = fn() -> Result<(bool, String)>;

/// Every check in a fixed order, by id.
pub const CHECKS: &[(&str, Check)] = &[
    ("cell-closed-forms", cell_closed_forms),
    ("disk-cell-limits", disk_cell_limits),
    ("neumann-higher-identities", neumann_higher_identities),
    ("gap-thickness-table", gap_thickness_table),
    ("electrostatic-thin-thick", electrostatic_thin_thick),
    ("inverse-linear-shielding", inverse_linear_shielding),
    ("resonance-amplification", resonance_amplification),
    ("shifted-resonance", shifted_resonance),
    ("resonance-scaling", resonance_scaling),
    ("square-interior-source", square_interior_source),
    ("property-suite", property_suite),
];

pub fn run(id: &'static str, check: Check) -> Verdict {
    let t = Instant::now();
    let (passed, detail) = match check() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    Verdict { id, passed, detail, seconds: t.elapsed().as_secs_f64() }
}

pub fn run_all() -> Vec<Verdict> {
    CHECKS.iter().map(|&(id, c)| run(id, c)).collect()
}

fn circle(m: usize, delta: f64) -> Result<CageGeometry> {
    build_cage(&CageConfig::new(Curve::UnitCircle, m, delta, WireShape::Disk, WireModel::Model1))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn cell_closed_forms() -> Result<(bool, String)> {
    let t = Instant::now();
    let opts = CellOptions::default();
    let mut worst_s: f64 = 0.0;
    let mut worst_l: f64 = 0.0;
    for d in [0.1, 0.2, 0.3, 0.45] {
        let (_, c) = cell_dirichlet_numeric(WireShape::TangentialSegment, d, &opts)?;
        let (_, lam) = fv_neumann(WireShape::TangentialSegment, d, &opts)?;
        worst_s = worst_s.max((c.sigma_plus - segment_dirichlet(WireShape::TangentialSegment, d)?.0).abs());
        worst_l = worst_l.max((lam - segment_neumann(WireShape::TangentialSegment, d)?).abs());
    }
    let secs = t.elapsed().as_secs_f64();
    Ok((
        worst_s < 1e-3 && worst_l < 1e-3 && secs < 30.0,
        format!("tangential strip solver: max |sigma err| {worst_s:.2e}, max |lambda err| {worst_l:.2e} (tol 1e-3), {secs:.1} s (limit 30 s)"),
    ))
}

fn disk_cell_limits() -> Result<(bool, String)> {
    let opts = CellOptions::default();
    let half = dirichlet_constants(WireShape::Disk, 0.5, &opts)?;
    let small = dirichlet_constants(WireShape::Disk, 0.01, &opts)?;
    let lim = small_delta_limit(WireShape::Disk, 0.01);
    let (_, lam) = crate::cellsolve::cell_neumann(WireShape::Disk, 0.05, &opts)?;
    let area = PI * 0.05 * 0.05;
    let checks = [
        (half.sigma_plus - (-0.44)).abs() <= 0.01,
        half.tau_plus.abs() < 1e-3,
        rel(small.sigma_plus, lim) < 0.02,
        rel(small.tau_plus, lim) < 0.02,
        rel(lam, area) < 0.03,
    ];
    Ok((
        checks.iter().all(|&c| c),
        format!(
            "sigma(0.5) = {:.4} (want -0.44 +- 0.01), |tau(0.5)| = {:.1e}; delta=0.01: sigma {:.2}%, tau {:.2}% off the log limit (2%); lambda(0.05) {:.2}% off pi delta^2 (3%)",
            half.sigma_plus,
            half.tau_plus.abs(),
            100.0 * rel(small.sigma_plus, lim),
            100.0 * rel(small.tau_plus, lim),
            100.0 * rel(lam, area)
        ),
    ))
}

fn neumann_higher_identities() -> Result<(bool, String)> {
    let opts = CellOptions::default();
    let mut worst: f64 = 0.0;
    for shape in [WireShape::Disk, WireShape::Square] {
        for d in [0.1, 0.3] {
            worst = worst.max((mu_check_numeric(shape, d, &opts)? - 0.5 * shape.area(d)).abs());
        }
    }
    let (mt, mh, mc) = cell_neumann_higher(WireShape::TangentialSegment, 0.3, WireModel::Model2)?;
    let slit = mu_check_numeric(WireShape::TangentialSegment, 0.3, &opts)?;
    let tang = mt.abs().max(mh.abs()).max(mc.abs());
    Ok((
        worst < 1e-6 && tang < 1e-6 && slit.abs() < 1e-6,
        format!("disk/square |mu_check - area/2| <= {worst:.1e}; tangential model 2 max|mu| = {tang:.1e}, solved mu_check = {slit:.1e} (tol 1e-6)"),
    ))
}

fn gap_thickness_table() -> Result<(bool, String)> {
    let opts = CellOptions::default();
    let target = 0.01;
    let g = |shape| -> Result<f64> { Ok(gap_measure(shape, delta_for_tau(shape, target, &opts)?)) };
    let tan = g(WireShape::TangentialSegment)?;
    let disk = g(WireShape::Disk)?;
    let sq = g(WireShape::Square)?;
    let perp = g(WireShape::PerpendicularSegment)?;
    let ok = (tan - 0.223).abs() <= 0.005 && (disk - 0.54).abs() <= 0.03 && (sq - 0.61).abs() <= 0.03 && (perp - 1.10).abs() <= 0.03;
    Ok((ok, format!("tau+ = 0.01 at gap {tan:.4} (tangential), {disk:.4} (disk), {sq:.4} (square); perpendicular 2 delta = {perp:.4}")))
}

fn electrostatic_thin_thick() -> Result<(bool, String)> {
    let t = Instant::now();
    let z0 = Complex64::new(2.0, 0.0);
    let origin = Complex64::new(0.0, 0.0);
    let opts = DiscreteOptions::default();
    let mut thin_worst: f64 = 0.0;
    let mut thick_worst: f64 = 0.0;
    let mut thick_at = (0, 0.0);
    for m in [20, 40] {
        for d in [0.005, 0.01, 0.02] {
            let g = circle(m, d)?;
            let disc = solve_laplace(&g, z0, &opts)?.gradient_norm(origin)?;
            let thin = laplace_thin_interior(z0, alpha_of(d, 0.0, g.epsilon)?)?.gradient_at_origin();
            thin_worst = thin_worst.max(rel(thin, disc));
        }
        for d in [0.1, 0.2, 0.3, 0.4] {
            let g = circle(m, d)?;
            let disc = solve_laplace(&g, z0, &opts)?.gradient_norm(origin)?;
            let tp = tau_plus(WireShape::Disk, d, &CellOptions::default())?;
            let thick = laplace_thick_interior(z0, tp, g.epsilon)?.gradient_at_origin();
            if rel(thick, disc) > thick_worst {
                thick_worst = rel(thick, disc);
                thick_at = (m, d);
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    Ok((
        thin_worst < 0.1 && thick_worst < 0.1 && secs < 120.0,
        format!(
            "|grad phi(0)| vs thin-wire (delta <= 0.02): worst {:.1}%; vs thick-wire (delta 0.1..0.4): worst {:.1}% at M={}, delta={} (tol 10%)",
            100.0 * thin_worst,
            100.0 * thick_worst,
            thick_at.0,
            thick_at.1
        ),
    ))
}

fn inverse_linear_shielding() -> Result<(bool, String)> {
    // δ = 0.1 keeps α ≫ 2 for every M here, the regime where α ∝ M.
    let z0 = Complex64::new(2.0, 0.0);
    let mut grads = Vec::new();
    for m in [20, 40, 80] {
        let g = circle(m, 0.1)?;
        grads.push(solve_laplace(&g, z0, &DiscreteOptions::default())?.gradient_norm(Complex64::new(0.0, 0.0))?);
    }
    let r1 = grads[0] / grads[1];
    let r2 = grads[1] / grads[2];
    Ok((
        rel(r1, 2.0) < 0.1 && rel(r2, 2.0) < 0.1,
        format!("delta=0.1: |grad phi(0)| ratio {r1:.3} (M 20->40), {r2:.3} (M 40->80), want 2 +- 10%"),
    ))
}

fn origin_amplitude(g: &CageGeometry, z0: Complex64) -> impl Fn(f64) -> f64 + '_ {
    move |k| {
        solve_helmholtz(g, k, z0, &DiscreteOptions::default())
            .and_then(|s| s.evaluate(Complex64::new(0.0, 0.0)))
            .map(|v| v.norm())
            .unwrap_or(f64::NAN)
    }
}

fn resonance_amplification() -> Result<(bool, String)> {
    let z0 = Complex64::new(2.0, 0.0);
    let g = circle(30, 0.1)?;
    let (k, v) = locate_peak(origin_amplitude(&g, z0), 2.2, 2.6, 41, 1e-6);
    let free = free_field(Equation::Helmholtz, k, Complex64::new(0.0, 0.0), z0).norm();
    Ok((v / free > 2.0, format!("M=30, delta=0.1: max |phi(0)| = {v:.4} at k = {k:.5}, free field {free:.4}, ratio {:.1} (want > 2)", v / free)))
}

fn disk_inputs(delta: f64, epsilon: f64) -> Result<CellInputs> {
    let c = far_field_constants(WireShape::Disk, delta, WireModel::Model1, &CellOptions::default())?;
    Ok(CellInputs {
        sigma_minus: c.sigma_minus,
        sigma_tilde_minus: c.sigma_tilde_minus.unwrap_or(0.0),
        tau_plus: c.tau_plus,
        tau_minus: c.tau_minus,
        epsilon,
    })
}

fn shifted_resonance() -> Result<(bool, String)> {
    let z0 = Complex64::new(2.0, 0.0);
    let g = circle(30, 0.1)?;
    let mode = ModeSpec::circle(0, 1)?;
    let report = circle_report(&mode, disk_inputs(0.1, g.epsilon)?, z0)?;
    let (k, v) = locate_peak(origin_amplitude(&g, z0), 2.2, 2.6, 41, 1e-7);
    let pred = report.peak_field(Complex64::new(0.0, 0.0));
    let dk = (report.k_peak - k).abs();
    Ok((
        dk < 0.01 && rel(pred, v) < 0.2,
        format!(
            "M=30, delta=0.1: predicted k_peak {:.5} vs discrete {k:.5} (|diff| {dk:.1e}, tol 0.01); peak |phi(0)| {pred:.4} vs {v:.4} ({:.1}%, tol 20%)",
            report.k_peak,
            100.0 * rel(pred, v)
        ),
    ))
}

fn resonance_scaling() -> Result<(bool, String)> {
    let z0 = Complex64::new(2.0, 0.0);
    let mode = ModeSpec::circle(0, 1)?;
    let mut peaks = Vec::new();
    let mut widths = Vec::new();
    let mut pred = Vec::new();
    for m in [30, 60] {
        let g = circle(m, 0.1)?;
        let report = circle_report(&mode, disk_inputs(0.1, g.epsilon)?, z0)?;
        let f = origin_amplitude(&g, z0);
        let w = 6.0 * report.fwhm;
        let (k, v) = locate_peak(&f, report.k_peak - w, report.k_peak + w, 25, 1e-8);
        widths.push(half_max_width(&f, k, v, 4.0 * report.fwhm, 1e-3 * report.fwhm)?);
        peaks.push(v);
        pred.push((report.peak_field(Complex64::new(0.0, 0.0)), report.fwhm));
    }
    let amp = peaks[1] / peaks[0];
    let wid = widths[0] / widths[1];
    let amp_pred = pred[1].0 / pred[0].0;
    let wid_pred = pred[0].1 / pred[1].1;
    Ok((
        rel(amp, amp_pred) < 0.25 && rel(wid, wid_pred) < 0.25,
        format!("M 30->60: peak ratio {amp:.3} (predicted {amp_pred:.3}), width ratio {wid:.3} (predicted {wid_pred:.3}), tol 25%"),
    ))
}

fn square_interior_source() -> Result<(bool, String)> {
    let z0 = Complex64::new(-0.5, 0.0);
    let probe = Complex64::new(2.0, 0.0);
    let mode = ModeSpec::square(1, 1)?;
    let delta = 0.1;
    let mut rows = Vec::new();
    for m in [24, 32, 48] {
        let g = build_cage(&CageConfig::new(Curve::UnitSquare, m, delta, WireShape::Disk, WireModel::Model1))?;
        let inputs = disk_inputs(delta, g.epsilon)?;
        let report = square_report(&mode, inputs, z0)?;
        let f = |k: f64| {
            solve_helmholtz(&g, k, z0, &DiscreteOptions::default())
                .and_then(|s| s.evaluate(probe))
                .map(|v| v.norm())
                .unwrap_or(f64::NAN)
        };
        let w = 0.03;
        let (k, v) = locate_peak(f, report.k_peak - w, report.k_peak + w, 13, 1e-7);
        let lit = mode.k_star - g.epsilon * inputs.sigma_minus * square_i2_literature(&mode) / (2.0 * mode.k_star);
        let amp = report.amplitude / (g.epsilon * g.epsilon);
        rows.push((m, g.epsilon, k, v, report.k_peak, lit, amp));
    }
    let (_, e0, _, v0, ..) = rows[0];
    let mut ok = true;
    let mut parts = Vec::new();
    for &(m, e, k, v, kp, lit, amp) in &rows[1..] {
        let got = v / v0;
        let want = e0 / e;
        ok &= rel(got, want) < 0.25;
        parts.push(format!("M={m}: probe peak ratio {got:.3} vs 1/eps ratio {want:.3}, k {k:.4} (pred {kp:.4}, literature I2 {lit:.4}), I8/(tau tau eps^2 Im I4) = {amp:.1}"));
    }
    Ok((ok, format!("square cage, source -0.5, probe z=2: {} (tol 25%)", parts.join("; "))))
}

fn property_suite() -> Result<(bool, String)> {
    let mut failed = Vec::new();
    let mut note = |name: &str, ok: bool| {
        if !ok {
            failed.push(name.to_string());
        }
    };
    note("least-squares orthogonality", properties::lstsq_orthogonality() < 1e-12);
    note("bessel recurrence", properties::bessel_recurrence() < 1e-13);
    note("bessel wronskian", properties::bessel_wronskian() < 1e-13);
    note("reciprocity", properties::reciprocity()? < 1e-6);
    note("gradient vs finite difference", properties::gradient_fd()? < 1e-6);
    note("cell symmetry", properties::cell_symmetry()? < 1e-6);
    note("lorentzian half width", properties::lorentzian_half_width()? < 1e-12);
    note("psi rescaling", properties::psi_rescaling()? < 1e-9);
    Ok((failed.is_empty(), if failed.is_empty() { "all 8 properties hold".into() } else { format!("failed: {}", failed.join(", ")) }))
}

/// The individual property checks; each returns its worst discrepancy.
pub mod properties {
    use super::*;
    use crate::numerics::bessel::{j_seq, jy_seq};
    use crate::numerics::linalg::{lstsq, Matrix};

    /// ‖Aᵀr‖ / (‖A‖‖b‖) for a fixed, well-mixed 40×7 problem.
    pub fn lstsq_orthogonality() -> f64 {
        let a = Matrix::from_fn(40, 7, |i, j| ((i * 7 + j * 13) as f64 * 0.37).sin() + if i == j { 2.0 } else { 0.0 });
        let b: Vec<f64> = (0..40).map(|i| (i as f64 * 0.91).cos()).collect();
        let x = lstsq(&a, &b).expect("full rank").x;
        let ax = a.mul_vec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let atr = a.adjoint_mul_vec(&r);
        atr.iter().map(|v| v.abs()).fold(0.0, f64::max) / (40.0 * 7.0f64.sqrt())
    }

    /// max |J_{n−1} + J_{n+1} − (2n/x)J_n| relative to the largest term.
    pub fn bessel_recurrence() -> f64 {
        let mut worst: f64 = 0.0;
        for x in [0.3, 1.7, 5.2, 12.5, 31.0] {
            let (j, y) = jy_seq(20, x);
            for n in 1..20 {
                for f in [&j, &y] {
                    let scale = f[n - 1].abs().max(f[n + 1].abs()).max(1e-300);
                    worst = worst.max((f[n - 1] + f[n + 1] - 2.0 * n as f64 / x * f[n]).abs() / scale);
                }
            }
        }
        worst
    }

    /// max |J_{n+1}Y_n − J_nY_{n+1} − 2/(πx)| · πx/2.
    pub fn bessel_wronskian() -> f64 {
        let mut worst: f64 = 0.0;
        for x in [0.2, 1.0, 3.3, 9.9, 40.0] {
            let (_, y) = jy_seq(12, x);
            let j = j_seq(12, x);
            for n in 0..12 {
                let w = j[n + 1] * y[n] - j[n] * y[n + 1];
                worst = worst.max((w * PI * x / 2.0 - 1.0).abs());
            }
        }
        worst
    }

    /// Swapping source and receiver, Helmholtz and Laplace (normalized).
    pub fn reciprocity() -> Result<f64> {
        let g = circle(20, 0.1)?;
        let za = Complex64::new(0.3, 0.0);
        let zb = Complex64::new(2.0, 0.0);
        let opts = DiscreteOptions::default();
        let ha = solve_helmholtz(&g, 2.0, za, &opts)?;
        let hb = solve_helmholtz(&g, 2.0, zb, &opts)?;
        let h = (ha.evaluate(zb)? - hb.evaluate(za)?).norm();
        let la = solve_laplace(&g, za, &opts)?;
        let lb = solve_laplace(&g, zb, &opts)?;
        let l = (la.normalized_value(zb)? - lb.normalized_value(za)?).norm();
        Ok(h.max(l))
    }

    /// Relative error of the analytic gradient against central differences (h = 1e−5).
    pub fn gradient_fd() -> Result<f64> {
        let g = circle(20, 0.1)?;
        let z0 = Complex64::new(2.0, 0.3);
        let opts = DiscreteOptions::default();
        let sols = [solve_laplace(&g, z0, &opts)?, solve_helmholtz(&g, 2.0, z0, &opts)?];
        let h = 1e-5;
        let mut worst: f64 = 0.0;
        for s in &sols {
            for i in 0..10 {
                let t = 0.7 * i as f64 + 0.2;
                let r = [0.3, 0.8, 0.93, 1.07, 1.5][i % 5];
                let z = Complex64::from_polar(r, t);
                if g.wire_containing(z).is_some() {
                    continue;
                }
                let an = s.evaluate_gradient(z)?;
                let dx = (s.evaluate(z + h)? - s.evaluate(z - h)?) / (2.0 * h);
                let iy = Complex64::new(0.0, h);
                let dy = (s.evaluate(z + iy)? - s.evaluate(z - iy)?) / (2.0 * h);
                let err = ((an[0] - dx).norm_sqr() + (an[1] - dy).norm_sqr()).sqrt();
                let size = (an[0].norm_sqr() + an[1].norm_sqr()).sqrt();
                worst = worst.max(err / size);
            }
        }
        Ok(worst)
    }

    /// |σ₊ − σ₋| + |τ₊ − τ₋| for the ξ-symmetric shapes.
    pub fn cell_symmetry() -> Result<f64> {
        let opts = CellOptions::default();
        let mut worst: f64 = 0.0;
        for (shape, d) in [(WireShape::Disk, 0.2), (WireShape::Disk, 0.4), (WireShape::Square, 0.3)] {
            let c = dirichlet_constants(shape, d, &opts)?;
            worst = worst.max((c.sigma_plus - c.sigma_minus).abs() + (c.tau_plus - c.tau_minus).abs());
        }
        Ok(worst)
    }

    /// | |C₋₁|(k_peak ± √3|a|ε²) − |A|/2 | / |A|.
    pub fn lorentzian_half_width() -> Result<f64> {
        let g = circle(30, 0.1)?;
        let r = circle_report(&ModeSpec::circle(0, 1)?, disk_inputs(0.1, g.epsilon)?, Complex64::new(2.0, 0.0))?;
        let dk = 0.5 * r.fwhm;
        let lo = (r.c_minus1(r.k_peak - dk) - 0.5 * r.amplitude).abs();
        let hi = (r.c_minus1(r.k_peak + dk) - 0.5 * r.amplitude).abs();
        Ok(lo.max(hi) / r.amplitude)
    }

    /// Change in k_peak and in the physical peak field when ψ → 3ψ.
    pub fn psi_rescaling() -> Result<f64> {
        let g = circle(30, 0.1)?;
        let inputs = disk_inputs(0.1, g.epsilon)?;
        let z0 = Complex64::new(2.0, 0.0);
        let probe = Complex64::new(0.2, 0.1);
        let mode = ModeSpec::circle(0, 1)?;
        let a = circle_report(&mode, inputs, z0)?;
        let b = circle_report(&mode.with_scale(3.0), inputs, z0)?;
        Ok((a.k_peak - b.k_peak).abs().max(rel(b.peak_field(probe), a.peak_field(probe))))
    }
}
