//! Boundary-layer cell problems on the periodic strip and their far-field
//! constants.
//!
//! With Z = N + iS the inner variable (N normal, S tangential, period 1),
//! the Dirichlet problems are
//!
//! * Φ⁺ = 0 on δK, Φ⁺ ~ N + σ₊ as N → +∞, Φ⁺ → τ₊ as N → −∞;
//! * Φ⁻ = 0 on δK, Φ⁻ ~ −N + σ₋ as N → −∞, Φ⁻ → τ₋ as N → +∞;
//!
//! and the Neumann (blockage) problem is ∂Ψ/∂ν = 0 on δK, Ψ ~ N ± λ.
//!
//! Segments have closed forms. Disks are solved with periodic multipoles
//! (spectrally accurate), squares and slits with graded finite volumes and
//! Richardson extrapolation.

pub mod analytic;
pub mod fv;
pub mod multipole;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCondition, WireModel, WireShape};
use crate::numerics::linalg::{lstsq, Matrix};
use crate::numerics::roots::brent;

pub use fv::{GridParams, Obstacle, Problem};

/// Far-field constants of one wire shape at one δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarFieldConstants {
    pub shape: WireShape,
    pub delta: f64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
    pub tau_plus: f64,
    pub tau_minus: f64,
    pub lambda: Option<f64>,
    pub sigma_tilde_minus: Option<f64>,
    pub tau_tilde_minus: Option<f64>,
    /// σ̃₋ under the other wire model, for comparison.
    pub sigma_tilde_minus_alt: Option<f64>,
    pub mu_tilde: Option<f64>,
    pub mu_hat: Option<f64>,
    pub mu_check: Option<f64>,
    pub a0: Option<f64>,
    pub model: Option<WireModel>,
}

impl FarFieldConstants {
    fn dirichlet(shape: WireShape, delta: f64, d: [f64; 4]) -> Self {
        Self {
            shape,
            delta,
            sigma_plus: d[0],
            sigma_minus: d[1],
            tau_plus: d[2],
            tau_minus: d[3],
            lambda: None,
            sigma_tilde_minus: None,
            tau_tilde_minus: None,
            sigma_tilde_minus_alt: None,
            mu_tilde: None,
            mu_hat: None,
            mu_check: None,
            a0: Some(shape.a0()),
            model: None,
        }
    }
}

/// Resolution and tolerance of the numerical cell solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellOptions {
    pub grid: GridParams,
    /// Number of grid levels for Richardson extrapolation.
    pub levels: usize,
    /// Allowed change of extrapolated constants between the finest levels.
    pub tol: f64,
    /// Spacing of the sampled [`CellSolution`] for disks.
    pub sample_h: f64,
}

impl Default for CellOptions {
    fn default() -> Self {
        Self { grid: GridParams::default(), levels: 3, tol: 1e-3, sample_h: 1.0 / 32.0 }
    }
}

/// Sampled cell solution on a tensor grid of the strip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSolution {
    pub shape: WireShape,
    pub delta: f64,
    pub bc: BoundaryCondition,
    pub n: Vec<f64>,
    pub s: Vec<f64>,
    /// Cell widths in N and S (quadrature weights of the S-mean).
    pub dn: Vec<f64>,
    pub ds: Vec<f64>,
    /// Row-major (N outer), NaN inside the wire.
    pub values: Vec<f64>,
    /// Smallest grid spacing.
    pub h: f64,
    pub n_max: f64,
}

impl CellSolution {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.s.len() + j]
    }

    fn from_fv(shape: WireShape, delta: f64, bc: BoundaryCondition, sol: &fv::FvSolution, n_max: f64) -> Self {
        let g = &sol.grid;
        Self {
            shape,
            delta,
            bc,
            n: (0..g.nn()).map(|i| g.n_center(i)).collect(),
            s: (0..g.ns()).map(|j| g.s_center(j)).collect(),
            dn: (0..g.nn()).map(|i| g.dn(i)).collect(),
            ds: (0..g.ns()).map(|j| g.ds(j)).collect(),
            values: sol.values.clone(),
            h: g.min_spacing(),
            n_max,
        }
    }

    /// Sample `f` at the centres of a uniform grid of spacing ≈ h.
    pub fn sample(
        shape: WireShape,
        delta: f64,
        bc: BoundaryCondition,
        n_max: f64,
        h: f64,
        f: impl Fn(Complex64) -> f64,
    ) -> Self {
        let nn = (2.0 * n_max / h).round() as usize;
        let ns = (1.0 / h).round().max(2.0) as usize;
        let hn = 2.0 * n_max / nn as f64;
        let hs = 1.0 / ns as f64;
        let n: Vec<f64> = (0..nn).map(|i| -n_max + (i as f64 + 0.5) * hn).collect();
        let s: Vec<f64> = (0..ns).map(|j| -0.5 + (j as f64 + 0.5) * hs).collect();
        let mut values = Vec::with_capacity(nn * ns);
        for &x in &n {
            for &y in &s {
                let z = Complex64::new(x, y);
                let inside = shape.contains_local(z / delta.max(1e-300));
                values.push(if inside { f64::NAN } else { f(z) });
            }
        }
        Self { shape, delta, bc, dn: vec![hn; nn], ds: vec![hs; ns], n, s, values, h: hn.min(hs), n_max }
    }

    /// S-weighted mean of row i.
    pub fn row_mean(&self, i: usize) -> f64 {
        let ns = self.s.len();
        (0..ns).map(|j| self.values[i * ns + j] * self.ds[j]).sum::<f64>() / self.ds.iter().sum::<f64>()
    }

    /// CSV dump with columns N, S, value.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,S,value\n");
        for (i, n) in self.n.iter().enumerate() {
            for (j, s) in self.s.iter().enumerate() {
                out.push_str(&format!("{n:.12e},{s:.12e},{:.12e}\n", self.value(i, j)));
            }
        }
        out
    }
}

/// Which end of the strip a fit looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

/// Polynomial fit of the S-averaged far-field profile.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldFit {
    /// Coefficients of 1, N, N², ...
    pub coeffs: Vec<f64>,
    pub residual: f64,
}

pub(crate) fn poly_fit(pts: &[(f64, f64)], order: usize) -> (Vec<f64>, f64) {
    let a = Matrix::from_fn(pts.len(), order + 1, |i, j| pts[i].0.powi(j as i32));
    let b: Vec<f64> = pts.iter().map(|p| p.1).collect();
    match lstsq(&a, &b) {
        Ok(s) => {
            let r = pts
                .iter()
                .map(|&(x, y)| (y - s.x.iter().rev().fold(0.0, |acc, c| acc * x + c)).abs())
                .fold(0.0, f64::max);
            (s.x, r)
        }
        Err(_) => (vec![f64::NAN; order + 1], f64::INFINITY),
    }
}

/// Fit the S-averaged profile on the window [N_max − 1, N_max] (or its mirror).
pub fn far_field_fit(sol: &CellSolution, side: Side, order: usize) -> Result<FarFieldFit> {
    let (lo, hi) = match side {
        Side::Plus => (sol.n_max - 1.0, sol.n_max),
        Side::Minus => (-sol.n_max, -sol.n_max + 1.0),
    };
    let pts: Vec<(f64, f64)> = (0..sol.n.len())
        .filter(|&i| sol.n[i] >= lo && sol.n[i] <= hi)
        .map(|i| (sol.n[i], sol.row_mean(i)))
        .collect();
    if pts.len() <= order {
        return Err(Error::WindowTooClose { residual: f64::INFINITY });
    }
    let (coeffs, residual) = poly_fit(&pts, order);
    let scale = sol.values.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
    if !(residual <= 1e-4 * scale.max(1e-300)) {
        return Err(Error::WindowTooClose { residual });
    }
    Ok(FarFieldFit { coeffs, residual })
}

fn intercept(sol: &CellSolution, side: Side) -> Result<f64> {
    Ok(far_field_fit(sol, side, 1)?.coeffs[0])
}

/// Closed-form Dirichlet constants for segments.
pub fn cell_dirichlet_analytic(shape: WireShape, delta: f64) -> Result<FarFieldConstants> {
    let (s, t) = analytic::segment_dirichlet(shape, delta)?;
    Ok(FarFieldConstants::dirichlet(shape, delta, [s, s, t, t]))
}

const TOUCH_TOL: f64 = 1e-12;

fn check_delta(shape: WireShape, delta: f64) -> Result<()> {
    let ok = delta > 0.0 && (delta < shape.delta_max() || (shape == WireShape::Disk && (delta - 0.5).abs() < TOUCH_TOL));
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!("delta = {delta} outside (0, {}) for {shape:?}", shape.delta_max())))
    }
}

/// Finest level the adaptive driver will go to (memory grows 4× per level).
const MAX_LEVELS: usize = 4;

/// Solve `problem` on successively refined grids and extrapolate the
/// constants returned by `extract`. Levels are added beyond `opts.levels`
/// (up to [`MAX_LEVELS`]) while any constant has not settled to `opts.tol`.
fn fv_converge(
    ob: &Obstacle,
    opts: &CellOptions,
    problem: Problem,
    names: &[&str],
    extract: impl Fn(&fv::FvSolution) -> Result<Vec<f64>>,
) -> Result<(fv::FvSolution, Vec<f64>)> {
    let min_levels = opts.levels.max(1);
    let max_levels = min_levels.max(MAX_LEVELS);
    let mut grid = fv::Grid::new(ob, &opts.grid);
    let mut history: Vec<Vec<f64>> = Vec::new();
    loop {
        if !history.is_empty() {
            grid = grid.refined();
        }
        let sol = fv::solve(&grid, ob, problem)?;
        history.push(extract(&sol)?);
        if history.len() < min_levels {
            continue;
        }
        let mut out = Vec::with_capacity(names.len());
        let mut worst: Option<(usize, f64)> = None;
        for k in 0..names.len() {
            let seq: Vec<f64> = history.iter().map(|h| h[k]).collect();
            let (v, change) = fv::richardson(&seq);
            if seq.len() >= 2 && !(change <= opts.tol) && worst.map_or(true, |w| change > w.1) {
                worst = Some((k, change));
            }
            out.push(v);
        }
        match worst {
            None => return Ok((sol, out)),
            Some((k, change)) if history.len() >= max_levels => {
                return Err(Error::NoConvergence(format!("{}: extrapolants differ by {change:e}", names[k])));
            }
            Some(_) => {}
        }
    }
}

/// Numerical Dirichlet constants and the Φ⁺ solution.
///
/// Disks use the periodic multipole solver (δ = ½ exactly switches to the
/// touching-chain solver); other shapes use finite volumes.
pub fn cell_dirichlet_numeric(shape: WireShape, delta: f64, opts: &CellOptions) -> Result<(CellSolution, FarFieldConstants)> {
    check_delta(shape, delta)?;
    let n_max = opts.grid.n_max;
    if shape == WireShape::Disk {
        if (delta - 0.5).abs() < TOUCH_TOL {
            let sigma = multipole::touching_disk_sigma()?;
            let sol = CellSolution::sample(shape, delta, BoundaryCondition::Dirichlet, n_max, opts.sample_h, |z| {
                if z.re > 0.0 {
                    f64::NAN
                } else {
                    0.0
                }
            });
            return Ok((sol, FarFieldConstants::dirichlet(shape, delta, [sigma, sigma, 0.0, 0.0])));
        }
        let (plus, minus) = multipole::disk_dirichlet(delta)?;
        let c = [plus.plus_constant(), minus.minus_constant(), plus.minus_constant(), minus.plus_constant()];
        let sol = CellSolution::sample(shape, delta, BoundaryCondition::Dirichlet, n_max, opts.sample_h, |z| {
            plus.jet(z).value
        });
        return Ok((sol, FarFieldConstants::dirichlet(shape, delta, c)));
    }
    let ob = Obstacle::from_shape(shape, delta)?;
    let to_cell = |s: &fv::FvSolution| CellSolution::from_fv(shape, delta, BoundaryCondition::Dirichlet, s, n_max);
    let (plus, pc) = fv_converge(&ob, opts, Problem::DirichletPlus, &["sigma+", "tau+"], |s| {
        let c = to_cell(s);
        Ok(vec![intercept(&c, Side::Plus)?, intercept(&c, Side::Minus)?])
    })?;
    let (_, mc) = fv_converge(&ob, opts, Problem::DirichletMinus, &["sigma-", "tau-"], |s| {
        let c = to_cell(s);
        Ok(vec![intercept(&c, Side::Minus)?, intercept(&c, Side::Plus)?])
    })?;
    Ok((to_cell(&plus), FarFieldConstants::dirichlet(shape, delta, [pc[0], mc[0], pc[1], mc[1]])))
}

/// Dirichlet constants by the best available method.
pub fn dirichlet_constants(shape: WireShape, delta: f64, opts: &CellOptions) -> Result<FarFieldConstants> {
    match shape {
        WireShape::PerpendicularSegment | WireShape::TangentialSegment => cell_dirichlet_analytic(shape, delta),
        _ => Ok(cell_dirichlet_numeric(shape, delta, opts)?.1),
    }
}

/// Blockage coefficient λ, with the Ψ solution when one was computed.
pub fn cell_neumann(shape: WireShape, delta: f64, opts: &CellOptions) -> Result<(Option<CellSolution>, f64)> {
    check_delta(shape, delta)?;
    match shape {
        WireShape::PerpendicularSegment | WireShape::TangentialSegment => {
            Ok((None, analytic::segment_neumann(shape, delta)?))
        }
        WireShape::Disk => {
            if delta >= 0.5 {
                return Ok((None, f64::INFINITY));
            }
            let (psi, lambda) = multipole::disk_neumann(delta)?;
            let sol = CellSolution::sample(shape, delta, BoundaryCondition::Neumann, opts.grid.n_max, opts.sample_h, |z| {
                psi.jet(z).value
            });
            Ok((Some(sol), lambda))
        }
        WireShape::Square => {
            let (sol, lambda) = fv_neumann(shape, delta, opts)?;
            Ok((Some(sol), lambda))
        }
    }
}

/// λ from finite volumes (any grid-aligned shape).
pub fn fv_neumann(shape: WireShape, delta: f64, opts: &CellOptions) -> Result<(CellSolution, f64)> {
    let ob = Obstacle::from_shape(shape, delta)?;
    let to_cell = |s: &fv::FvSolution| CellSolution::from_fv(shape, delta, BoundaryCondition::Neumann, s, opts.grid.n_max);
    let (sol, c) = fv_converge(&ob, opts, Problem::Neumann, &["lambda"], |s| {
        let c = to_cell(s);
        Ok(vec![0.5 * (intercept(&c, Side::Plus)? - intercept(&c, Side::Minus)?)])
    })?;
    Ok((to_cell(&sol), c[0]))
}

/// Second-order Dirichlet constants [σ̃₊, τ̃₊, σ̃₋, τ̃₋] (disks only).
pub fn cell_dirichlet_tilde(shape: WireShape, delta: f64, model: WireModel) -> Result<[f64; 4]> {
    if shape != WireShape::Disk {
        return Err(Error::NotImplemented(format!("second-order Dirichlet constants for {shape:?}")));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Domain(format!("delta = {delta} outside (0, 1/2)")));
    }
    let (plus, minus) = multipole::disk_dirichlet(delta)?;
    multipole::disk_sigma_tilde(delta, model == WireModel::Model1, &plus, &minus)
}

/// (μ̃, μ̂, μ̌) of the higher-order Neumann problems.
pub fn cell_neumann_higher(shape: WireShape, delta: f64, model: WireModel) -> Result<(f64, f64, f64)> {
    match (shape, model) {
        (WireShape::TangentialSegment, WireModel::Model2) => Ok((0.0, 0.0, 0.0)),
        (WireShape::Disk, _) if delta > 0.0 && delta < 0.5 => {
            let (psi, lambda) = multipole::disk_neumann(delta)?;
            let mu_tilde = multipole::disk_mu_tilde_formula(delta, model == WireModel::Model1, &psi, lambda);
            let mu_hat = multipole::disk_mu_hat(delta, &psi);
            Ok((mu_tilde, mu_hat, 0.5 * shape.area(delta)))
        }
        _ => Err(Error::NotImplemented(format!("higher-order Neumann constants for {shape:?}, {model:?}"))),
    }
}

/// μ̌ by actually solving ΔΨ̌ = −1 (disk: multipoles, others: finite volumes).
pub fn mu_check_numeric(shape: WireShape, delta: f64, opts: &CellOptions) -> Result<f64> {
    if shape == WireShape::Disk {
        return multipole::disk_mu_check_solve(delta);
    }
    let ob = Obstacle::from_shape(shape, delta)?;
    let n_max = opts.grid.n_max;
    let (_, c) = fv_converge(&ob, opts, Problem::NeumannCheck, &["mu_check"], |s| {
        let (cp, _) = s.profile_fit(n_max - 1.0, n_max, 2);
        let (cm, _) = s.profile_fit(-n_max, -n_max + 1.0, 2);
        Ok(vec![0.5 * (cp[1] - cm[1])])
    })?;
    Ok(c[0])
}

/// Every constant available for (shape, δ); the higher-order ones are
/// filled in where a solver exists.
pub fn far_field_constants(shape: WireShape, delta: f64, model: WireModel, opts: &CellOptions) -> Result<FarFieldConstants> {
    let mut c = dirichlet_constants(shape, delta, opts)?;
    c.model = Some(model);
    c.lambda = Some(cell_neumann(shape, delta, opts)?.1);
    if shape == WireShape::Disk && delta < 0.5 {
        let other = match model {
            WireModel::Model1 => WireModel::Model2,
            WireModel::Model2 => WireModel::Model1,
        };
        let t = cell_dirichlet_tilde(shape, delta, model)?;
        c.sigma_tilde_minus = Some(t[2]);
        c.tau_tilde_minus = Some(t[3]);
        c.sigma_tilde_minus_alt = Some(cell_dirichlet_tilde(shape, delta, other)?[2]);
    }
    if let Ok((mt, mh, mc)) = cell_neumann_higher(shape, delta, model) {
        c.mu_tilde = Some(mt);
        c.mu_hat = Some(mh);
        c.mu_check = Some(mc);
    } else {
        c.mu_check = Some(0.5 * shape.area(delta));
    }
    Ok(c)
}

/// τ₊(δ) by the best available method.
pub fn tau_plus(shape: WireShape, delta: f64, opts: &CellOptions) -> Result<f64> {
    Ok(dirichlet_constants(shape, delta, opts)?.tau_plus)
}

/// The δ at which τ₊ equals `target`.
pub fn delta_for_tau(shape: WireShape, target: f64, opts: &CellOptions) -> Result<f64> {
    let q = (-2.0 * PI * target).exp();
    match shape {
        WireShape::TangentialSegment => Ok(q.asin() / PI),
        WireShape::PerpendicularSegment => Ok(q.atanh() / PI),
        WireShape::Disk => brent(|d| tau_plus(shape, d, opts).unwrap_or(f64::NAN) - target, 0.05, 0.45, 1e-7),
        WireShape::Square => brent(|d| tau_plus(shape, d, opts).unwrap_or(f64::NAN) - target, 0.15, 0.55, 1e-6),
    }
}

/// Fraction of each period left open between neighbouring wires (for
/// perpendicular segments, the full length 2δ instead).
pub fn gap_measure(shape: WireShape, delta: f64) -> f64 {
    match shape {
        WireShape::Disk | WireShape::TangentialSegment => 1.0 - 2.0 * delta,
        WireShape::Square => 1.0 - 2.0 * FRAC_1_SQRT_2 * delta,
        WireShape::PerpendicularSegment => 2.0 * delta,
    }
}
