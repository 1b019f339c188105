//! Many-wire reference solver: multipole expansions about every wire,
//! fitted to φ = 0 on the wire boundaries by least squares.
//!
//! The wires are numbered so that a rotation of the cage by one cell of its
//! symmetry group maps wire g·K + o to wire (g+1)·K + o. The collocation
//! matrix is then block circulant and a discrete Fourier transform over the
//! group splits it into G independent systems of size K·C by K·(2P+1).
//! A cage without symmetry is the case G = 1.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{CageGeometry, WireShape};
use crate::homogenized::Equation;
use crate::numerics::bessel::h1_seq;
use crate::numerics::linalg::{Matrix, QrFactor};

/// Largest acceptable condition estimate of a mode system.
pub const MAX_CONDITION: f64 = 1e15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteOptions {
    /// Multipole truncation.
    pub p: usize,
    /// Collocation points per wire; `None` means 3(2P+1).
    pub c: Option<usize>,
    /// Use the cage's rotation group to block-diagonalize the system.
    #[serde(default = "yes")]
    pub symmetry: bool,
}

fn yes() -> bool {
    true
}

impl Default for DiscreteOptions {
    fn default() -> Self {
        Self { p: 10, c: None, symmetry: true }
    }
}

impl DiscreteOptions {
    pub fn with_p(p: usize) -> Self {
        Self { p, ..Self::default() }
    }

    pub fn collocation(&self) -> usize {
        self.c.unwrap_or(3 * (2 * self.p + 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub max: f64,
    pub rms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscreteSolution {
    pub equation: Equation,
    pub k: f64,
    pub geometry: CageGeometry,
    pub z0: Complex64,
    /// Source strength; f = −strength·δ_{z₀}.
    pub strength: f64,
    pub p: usize,
    pub c: usize,
    /// Per wire. Laplace: [a₀, a₁..a_P, b₁..b_P] as real parts, the basis
    /// being log|w|, Re w⁻ⁿ, Im w⁻ⁿ with w the wire-local coordinate in
    /// units of the wire radius. Helmholtz: c_n for n = −P..P on
    /// H_n(kρ)e^{inϑ}.
    pub coeffs: Vec<Vec<Complex64>>,
    /// Additive constant (Laplace only).
    pub constant: f64,
    pub collocation_residual: Residual,
    pub cond_estimate: f64,
}

/// Free-space field of the unit source at z₀.
pub fn free_field(equation: Equation, k: f64, z: Complex64, z0: Complex64) -> Complex64 {
    let d = (z - z0).norm();
    match equation {
        Equation::Laplace => Complex64::new(-d.ln() / (2.0 * PI), 0.0),
        Equation::Helmholtz => Complex64::new(0.0, 0.25) * h1_seq(0, k * d)[0],
    }
}

/// Gradient (∂x, ∂y) of [`free_field`].
pub fn free_field_gradient(equation: Equation, k: f64, z: Complex64, z0: Complex64) -> [Complex64; 2] {
    let dz = z - z0;
    let d = dz.norm();
    let radial = match equation {
        Equation::Laplace => Complex64::new(-1.0 / (2.0 * PI * d), 0.0),
        Equation::Helmholtz => Complex64::new(0.0, 0.25) * (-k * h1_seq(1, k * d)[1]),
    };
    [radial * (dz.re / d), radial * (dz.im / d)]
}

struct Basis<'a> {
    equation: Equation,
    k: f64,
    p: usize,
    geom: &'a CageGeometry,
}

impl Basis<'_> {
    fn width(&self) -> usize {
        2 * self.p + 1
    }

    /// Rigid local coordinate of z about wire j, in units of r.
    fn local(&self, j: usize, z: Complex64) -> Complex64 {
        Complex64::from_polar(1.0, -self.geom.normal_angles[j]) * (z - self.geom.centers[j]) / self.geom.wire_radius
    }

    fn row(&self, j: usize, z: Complex64, out: &mut [Complex64]) {
        let w = self.local(j, z);
        let p = self.p;
        match self.equation {
            Equation::Laplace => {
                out[0] = Complex64::new(w.norm().ln(), 0.0);
                let winv = w.inv();
                let mut pw = winv;
                for n in 1..=p {
                    out[n] = Complex64::new(pw.re, 0.0);
                    out[p + n] = Complex64::new(pw.im, 0.0);
                    pw *= winv;
                }
            }
            Equation::Helmholtz => {
                let rho = w.norm() * self.geom.wire_radius;
                let h = h1_seq(p, self.k * rho);
                let e = w / w.norm();
                let mut ep = Complex64::new(1.0, 0.0);
                out[p] = h[0];
                for n in 1..=p {
                    ep *= e;
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    out[p + n] = h[n] * ep;
                    out[p - n] = h[n] * ep.conj() * sign;
                }
            }
        }
    }

    fn value(&self, j: usize, coeffs: &[Complex64], z: Complex64) -> Complex64 {
        let mut row = vec![Complex64::new(0.0, 0.0); self.width()];
        self.row(j, z, &mut row);
        row.iter().zip(coeffs).map(|(a, b)| a * b).sum()
    }

    fn gradient(&self, j: usize, coeffs: &[Complex64], z: Complex64) -> [Complex64; 2] {
        let w = self.local(j, z);
        let r = self.geom.wire_radius;
        let rot = Complex64::from_polar(1.0, self.geom.normal_angles[j]);
        let p = self.p;
        match self.equation {
            Equation::Laplace => {
                // φ = Re F, F = a₀ log w + Σ (a_n − i b_n) w⁻ⁿ, ∇φ = (Re F', −Im F').
                let winv = w.inv();
                let mut df = winv * coeffs[0].re;
                let mut pw = winv;
                for n in 1..=p {
                    pw *= winv;
                    df -= Complex64::new(coeffs[n].re, -coeffs[p + n].re) * pw * n as f64;
                }
                let df = df * rot.conj() / r;
                [Complex64::new(df.re, 0.0), Complex64::new(-df.im, 0.0)]
            }
            Equation::Helmholtz => {
                // (∂ξ ± i∂η) shift the order of Z_n e^{inϑ} by ±1.
                let k = self.k;
                let h = h1_seq(p + 1, k * w.norm() * r);
                let e = w / w.norm();
                let hz = |n: i64| -> Complex64 {
                    let a = n.unsigned_abs() as usize;
                    let s = if n < 0 && a % 2 == 1 { -1.0 } else { 1.0 };
                    h[a] * s * e.powi(n as i32)
                };
                let mut dp = Complex64::new(0.0, 0.0);
                let mut dm = Complex64::new(0.0, 0.0);
                for (idx, c) in coeffs.iter().enumerate() {
                    let n = idx as i64 - p as i64;
                    dp -= c * hz(n + 1) * k;
                    dm += c * hz(n - 1) * k;
                }
                let gp = rot * dp;
                let gm = rot.conj() * dm;
                [(gp + gm) / 2.0, (gp - gm) / Complex64::new(0.0, 2.0)]
            }
        }
    }
}

fn check_geometry(geom: &CageGeometry, z0: Complex64) -> Result<()> {
    if geom.is_empty() {
        return Ok(());
    }
    if geom.config.shape != WireShape::Disk {
        return Err(Error::NotImplemented(format!("discrete solver for {:?} wires", geom.config.shape)));
    }
    let dmax = geom.config.shape.delta_max();
    if geom.config.delta >= dmax {
        return Err(Error::WireOverlap { delta: geom.config.delta, delta_max: dmax });
    }
    if let Some(j) = geom.wire_containing(z0) {
        return Err(Error::InsideWire(j));
    }
    Ok(())
}

fn boundary_points(geom: &CageGeometry, j: usize, n: usize, offset: f64) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            let t = 2.0 * PI * (i as f64 + offset) / n as f64;
            geom.local_to_global(j, geom.config.shape.boundary_point(t))
        })
        .collect()
}

#[cfg(feature = "parallel")]
fn par_map<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, F: Fn(usize) -> T>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

fn solve(
    equation: Equation,
    k: f64,
    geom: &CageGeometry,
    z0: Complex64,
    opts: &DiscreteOptions,
) -> Result<DiscreteSolution> {
    let p = opts.p;
    let c = opts.collocation();
    if c < 2 * p + 1 {
        return Err(Error::Domain(format!("need C >= 2P+1, got C = {c}, P = {p}")));
    }
    check_geometry(geom, z0)?;
    let empty = DiscreteSolution {
        equation,
        k,
        geometry: geom.clone(),
        z0,
        strength: 1.0,
        p,
        c,
        coeffs: Vec::new(),
        constant: 0.0,
        collocation_residual: Residual { max: 0.0, rms: 0.0 },
        cond_estimate: 1.0,
    };
    if geom.is_empty() {
        return Ok(empty);
    }
    if equation == Equation::Helmholtz {
        let kr = k * geom.wire_radius;
        // H_P(kr) grows like (2/kr)^P (P−1)!.
        let log_size = p as f64 * (2.0 / kr).ln() + (1..p).map(|i| (i as f64).ln()).sum::<f64>();
        if !(kr > 0.0) || log_size > 650.0 {
            return Err(Error::NearSingularBasis { kr });
        }
    }
    let basis = Basis { equation, k, p, geom };
    let nb = basis.width();
    let m = geom.len();
    let g = if opts.symmetry { geom.symmetry_order() } else { 1 };
    let kk = m / g;
    let rows = kk * c;
    let cols = kk * nb;

    let colloc: Vec<Vec<Complex64>> = (0..kk).map(|o| geom.wire_boundary(o, c)).collect();
    // blocks[d] is the rows × cols interaction of cell 0's points with cell d's wires.
    let blocks: Vec<Matrix<Complex64>> = par_map(g, |d| {
        let mut b = Matrix::zeros(rows, cols);
        let mut row = vec![Complex64::new(0.0, 0.0); nb];
        for o2 in 0..kk {
            let j = d * kk + o2;
            for (o, pts) in colloc.iter().enumerate() {
                for (i, &z) in pts.iter().enumerate() {
                    basis.row(j, z, &mut row);
                    for (n, v) in row.iter().enumerate() {
                        b.set(o * c + i, o2 * nb + n, *v);
                    }
                }
            }
        }
        b
    });
    // Right-hand side per cell.
    let rhs: Vec<Vec<Complex64>> = (0..g)
        .map(|cell| {
            (0..kk)
                .flat_map(|o| geom.wire_boundary(cell * kk + o, c))
                .map(|z| -free_field(equation, k, z, z0))
                .collect()
        })
        .collect();

    let omega = |q: usize, d: usize| Complex64::from_polar(1.0, 2.0 * PI * ((q * d) % g) as f64 / g as f64);
    let laplace = equation == Equation::Laplace;
    let modes: Vec<Result<(Vec<Complex64>, f64)>> = par_map(g, |q| {
        let mut a = Matrix::zeros(rows, cols);
        for (d, b) in blocks.iter().enumerate() {
            let w = omega(q, d);
            for col in 0..cols {
                for (dst, src) in a.col_mut(col).iter_mut().zip(b.col(col)) {
                    *dst += src * w;
                }
            }
        }
        let bhat: Vec<Complex64> = (0..rows)
            .map(|i| (0..g).map(|cell| rhs[cell][i] * omega(q, cell).conj()).sum::<Complex64>() / g as f64)
            .collect();
        if laplace && q == 0 {
            // Zero net charge: a_{K−1,0} = −Σ_{o<K−1} a_{o,0}. Its column is
            // replaced by the global constant.
            let last = (kk - 1) * nb;
            let lastcol = a.col(last).to_vec();
            for o in 0..kk - 1 {
                for (v, l) in a.col_mut(o * nb).iter_mut().zip(&lastcol) {
                    *v -= l;
                }
            }
            for v in a.col_mut(last) {
                *v = Complex64::new(1.0, 0.0);
            }
        }
        let qr = QrFactor::new(&a, 1e-15)?;
        if qr.cond_estimate > MAX_CONDITION {
            return Err(Error::IllConditioned { cond: qr.cond_estimate });
        }
        let sol = qr.solve(&bhat)?;
        Ok((sol.x, qr.cond_estimate))
    });
    let mut xhat = Vec::with_capacity(g);
    let mut cond: f64 = 1.0;
    for r in modes {
        let (x, cnd) = r?;
        cond = cond.max(cnd);
        xhat.push(x);
    }
    let mut constant = 0.0;
    if laplace {
        let last = (kk - 1) * nb;
        constant = xhat[0][last].re;
        let s: Complex64 = (0..kk - 1).map(|o| xhat[0][o * nb]).sum();
        xhat[0][last] = -s;
    }
    let mut coeffs = vec![vec![Complex64::new(0.0, 0.0); nb]; m];
    for (cell, block) in coeffs.chunks_mut(kk).enumerate() {
        for (q, xq) in xhat.iter().enumerate() {
            let w = omega(q, cell);
            for (o, wire) in block.iter_mut().enumerate() {
                for (n, v) in wire.iter_mut().enumerate() {
                    *v += xq[o * nb + n] * w;
                }
            }
        }
    }
    if laplace {
        for v in coeffs.iter_mut().flatten() {
            *v = Complex64::new(v.re, 0.0);
        }
    }
    let mut sol = DiscreteSolution { coeffs, constant, cond_estimate: cond, ..empty };
    sol.collocation_residual = sol.residual_at(0.0, c);
    Ok(sol)
}

/// Laplace problem −Δφ = −δ_{z₀} outside the wires (unit source), φ = 0 on
/// every wire, zero net wire charge.
pub fn solve_laplace(geom: &CageGeometry, z0: Complex64, opts: &DiscreteOptions) -> Result<DiscreteSolution> {
    solve(Equation::Laplace, 0.0, geom, z0, opts)
}

/// Helmholtz problem with outgoing radiation, φ = 0 on every wire.
pub fn solve_helmholtz(geom: &CageGeometry, k: f64, z0: Complex64, opts: &DiscreteOptions) -> Result<DiscreteSolution> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("k = {k} must be positive")));
    }
    solve(Equation::Helmholtz, k, geom, z0, opts)
}

impl DiscreteSolution {
    fn basis(&self) -> Basis<'_> {
        Basis { equation: self.equation, k: self.k, p: self.p, geom: &self.geometry }
    }

    /// Field at z, skipping the in-wire check.
    fn sum(&self, z: Complex64) -> Complex64 {
        let basis = self.basis();
        let wires: Complex64 = self.coeffs.iter().enumerate().map(|(j, c)| basis.value(j, c, z)).sum();
        free_field(self.equation, self.k, z, self.z0) * self.strength + wires + self.constant
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        if let Some(j) = self.geometry.wire_containing(z) {
            return Err(Error::InsideWire(j));
        }
        Ok(self.sum(z))
    }

    /// φ(z) less the additive constant. For Laplace this is the symmetric
    /// Green's function: swapping z and z₀ leaves it unchanged.
    pub fn normalized_value(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.evaluate(z)? - self.constant)
    }

    /// (∂φ/∂x, ∂φ/∂y).
    pub fn evaluate_gradient(&self, z: Complex64) -> Result<[Complex64; 2]> {
        if let Some(j) = self.geometry.wire_containing(z) {
            return Err(Error::InsideWire(j));
        }
        let basis = self.basis();
        let mut g = free_field_gradient(self.equation, self.k, z, self.z0);
        g[0] *= self.strength;
        g[1] *= self.strength;
        for (j, c) in self.coeffs.iter().enumerate() {
            let d = basis.gradient(j, c, z);
            g[0] += d[0];
            g[1] += d[1];
        }
        Ok(g)
    }

    pub fn gradient_norm(&self, z: Complex64) -> Result<f64> {
        let g = self.evaluate_gradient(z)?;
        Ok((g[0].norm_sqr() + g[1].norm_sqr()).sqrt())
    }

    fn residual_at(&self, offset: f64, n: usize) -> Residual {
        let mut max: f64 = 0.0;
        let mut sq = 0.0;
        let mut count = 0;
        for j in 0..self.geometry.len() {
            for z in boundary_points(&self.geometry, j, n, offset) {
                let v = self.sum(z).norm();
                max = max.max(v);
                sq += v * v;
                count += 1;
            }
        }
        let rms = if count > 0 { (sq / count as f64).sqrt() } else { 0.0 };
        Residual { max, rms }
    }

    /// |φ| at 4C check points per wire, interleaved with the collocation points.
    pub fn boundary_residual(&self) -> Residual {
        self.residual_at(0.5, 4 * self.c)
    }
}

/// Field sampled on a rectangular grid; points inside wires are NaN.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major with y outer.
    pub values: Vec<Complex64>,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn field_grid(sol: &DiscreteSolution, x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> FieldGrid {
    let xs = linspace(x.0, x.1, nx);
    let ys = linspace(y.0, y.1, ny);
    let rows: Vec<Vec<Complex64>> = par_map(ys.len(), |iy| {
        xs.iter()
            .map(|&xv| {
                let z = Complex64::new(xv, ys[iy]);
                sol.evaluate(z).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
            })
            .collect()
    });
    FieldGrid { xs, ys, values: rows.concat() }
}

impl FieldGrid {
    /// `x,y,re,im,abs` rows with 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,re,im,abs\n");
        for (iy, &y) in self.ys.iter().enumerate() {
            for (ix, &x) in self.xs.iter().enumerate() {
                let v = self.values[iy * self.xs.len() + ix];
                s.push_str(&format!("{x:.11e},{y:.11e},{:.11e},{:.11e},{:.11e}\n", v.re, v.im, v.norm()));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_cage, CageConfig, Curve, WireModel};

    fn circle(m: usize, delta: f64) -> CageGeometry {
        build_cage(&CageConfig::new(Curve::UnitCircle, m, delta, WireShape::Disk, WireModel::Model1)).unwrap()
    }

    #[test]
    fn empty_cage_is_free_field() {
        let z0 = Complex64::new(2.0, 0.0);
        let sol = solve_laplace(&CageGeometry::free_space(), z0, &DiscreteOptions::default()).unwrap();
        let g = sol.gradient_norm(Complex64::new(0.0, 0.0)).unwrap();
        assert!((g - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert_eq!(sol.boundary_residual().max, 0.0);
    }

    #[test]
    fn laplace_residual_small() {
        let geom = circle(20, 0.1);
        let sol = solve_laplace(&geom, Complex64::new(2.0, 0.0), &DiscreteOptions { p: 10, c: Some(24), symmetry: true }).unwrap();
        assert!(sol.boundary_residual().max < 1e-8, "{:?}", sol.boundary_residual());
        let net: f64 = sol.coeffs.iter().map(|c| c[0].re).sum();
        assert!(net.abs() < 1e-14);
    }

    #[test]
    fn symmetric_and_dense_agree() {
        let z0 = Complex64::new(-0.5, 0.1);
        let z = Complex64::new(0.2, -0.3);
        for curve in [Curve::UnitSquare, Curve::UnitCircle] {
            let geom = build_cage(&CageConfig::new(curve, 16, 0.1, WireShape::Disk, WireModel::Model1)).unwrap();
            let fast = DiscreteOptions::with_p(6);
            let dense = DiscreteOptions { symmetry: false, ..fast };
            let a = solve_helmholtz(&geom, 2.0, z0, &fast).unwrap();
            let b = solve_helmholtz(&geom, 2.0, z0, &dense).unwrap();
            assert!((a.evaluate(z).unwrap() - b.evaluate(z).unwrap()).norm() < 1e-10);
            let a = solve_laplace(&geom, z0, &fast).unwrap();
            let b = solve_laplace(&geom, z0, &dense).unwrap();
            assert!((a.evaluate(z).unwrap() - b.evaluate(z).unwrap()).norm() < 1e-10);
        }
    }
}
