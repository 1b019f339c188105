//! Periodic multipole solutions of the disk cell problems.
//!
//! On the strip Z = N + iS, period 1 in S, the functions
//! g_n(Z) = Σ_k (Z − ik)^{−n} are harmonic away from the lattice and decay
//! for n ≥ 2 as N → ±∞, while g_1 = π coth πZ → ±π. Together with
//! L(Z) = (1/2π) log(2 sinh πZ) (which behaves like |N|/2) they give a
//! basis in which every far-field constant is read off exactly from the
//! coefficients. Boundary conditions on the disk |Z| = δ are fitted by
//! least squares.
//!
//! g_n = πⁿ (A_n(u) + c B_n(u)) with c = coth πZ, u = c² − 1 = 1/sinh² πZ;
//! the polynomials A_n, B_n follow from g_{n+1} = −g_n'/n and have
//! non-negative coefficients, so nothing cancels as u → 0 in the far field.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::linalg::{Matrix, QrFactor};

/// Evaluator for g_1..=g_nmax.
#[derive(Debug, Clone)]
pub struct PeriodicMultipole {
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
}

fn poly_deriv(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(k, v)| k as f64 * v).collect()
}

fn poly_eval(p: &[f64], u: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &v| acc * u + v)
}

impl PeriodicMultipole {
    pub fn new(nmax: usize) -> Self {
        let mut a = vec![vec![0.0]];
        let mut b = vec![vec![1.0]];
        for n in 1..nmax {
            let (an, bn) = (&a[n - 1], &b[n - 1]);
            let dbn = poly_deriv(bn);
            let dan = poly_deriv(an);
            // A_{n+1} = (u/n)(B + 2(1+u)B'),  B_{n+1} = (u/n) 2A'.
            let mut inner = vec![0.0; bn.len() + 1];
            for (k, v) in bn.iter().enumerate() {
                inner[k] += v;
            }
            for (k, v) in dbn.iter().enumerate() {
                inner[k] += 2.0 * v;
                inner[k + 1] += 2.0 * v;
            }
            let mut na = vec![0.0; inner.len() + 1];
            for (k, v) in inner.iter().enumerate() {
                na[k + 1] = v / n as f64;
            }
            let mut nb = vec![0.0; dan.len() + 1];
            for (k, v) in dan.iter().enumerate() {
                nb[k + 1] = 2.0 * v / n as f64;
            }
            if nb.is_empty() {
                nb.push(0.0);
            }
            a.push(na);
            b.push(nb);
        }
        Self { a, b }
    }

    pub fn order(&self) -> usize {
        self.a.len()
    }

    /// (coth πZ, 1/sinh² πZ), stable for large |Re Z|.
    fn c_u(z: Complex64) -> (Complex64, Complex64) {
        let w = z * PI;
        if z.re.abs() < 2.0 {
            let s = w.sinh();
            (w.cosh() / s, (s * s).inv())
        } else {
            let sign = z.re.signum();
            let q = (-2.0 * sign * w).exp();
            let one = Complex64::new(1.0, 0.0);
            ((one + q) / (one - q) * sign, q * 4.0 / ((one - q) * (one - q)))
        }
    }

    /// [g_1, ..., g_nmax](Z), each multiplied by scaleⁿ.
    pub fn eval_scaled(&self, z: Complex64, scale: f64) -> Vec<Complex64> {
        let (c, u) = Self::c_u(z);
        let mut f = 1.0;
        (0..self.order())
            .map(|n| {
                f *= PI * scale;
                (poly_eval(&self.a[n], u) + c * poly_eval(&self.b[n], u)) * f
            })
            .collect()
    }
}

/// (1/2π) log(2 sinh πZ) and its first two derivatives; the real part is
/// what matters, so the branch is irrelevant.
fn log_term(z: Complex64) -> (Complex64, Complex64, Complex64) {
    let w = z * PI;
    let (val, c) = if z.re.abs() < 2.0 {
        let s = w.sinh();
        ((s * 2.0).ln(), w.cosh() / s)
    } else {
        let sign = z.re.signum();
        let q = (-2.0 * sign * w).exp();
        let one = Complex64::new(1.0, 0.0);
        // 2 sinh w = ±e^{±w}(1 − q)
        (sign * w + (one - q).ln(), (one + q) / (one - q) * sign)
    };
    (val / (2.0 * PI), c * 0.5, -(c * c - 1.0) * (PI / 2.0))
}

/// Harmonic function on the strip,
/// u = Re{ lin·Z + log·L(Z) + Σ c_n δⁿ g_n(Z) } + d.
#[derive(Debug, Clone)]
pub struct StripField {
    pub lin: f64,
    pub log: f64,
    pub coeffs: Vec<f64>,
    pub constant: f64,
    pub delta: f64,
    basis: PeriodicMultipole,
}

/// Value, gradient (∂N, ∂S) and Hessian (NN, NS, SS) at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [f64; 3],
}

impl StripField {
    pub fn jet(&self, z: Complex64) -> Jet {
        let p = self.coeffs.len();
        let g = self.basis.eval_scaled(z, self.delta);
        let mut f0 = Complex64::new(self.lin, 0.0) * z;
        let mut f1 = Complex64::new(self.lin, 0.0);
        let mut f2 = Complex64::new(0.0, 0.0);
        if self.log != 0.0 {
            let (l0, l1, l2) = log_term(z);
            f0 += l0 * self.log;
            f1 += l1 * self.log;
            f2 += l2 * self.log;
        }
        // δⁿg_n' = −n δⁿ g_{n+1} = −(n/δ) (δ^{n+1} g_{n+1}).
        for (i, &cn) in self.coeffs.iter().enumerate() {
            let n = (i + 1) as f64;
            f0 += g[i] * cn;
            f1 -= g[i + 1] * (cn * n / self.delta);
            f2 += g[i + 2] * (cn * n * (n + 1.0) / (self.delta * self.delta));
        }
        debug_assert!(g.len() >= p + 2);
        Jet {
            value: f0.re + self.constant,
            grad: [f1.re, -f1.im],
            hess: [f2.re, -f2.im, -f2.re],
        }
    }

    /// lim u − (lin + log/2) N as N → +∞.
    pub fn plus_constant(&self) -> f64 {
        self.constant + PI * self.delta * self.coeffs.first().copied().unwrap_or(0.0)
    }

    /// lim u − (lin − log/2) N as N → −∞.
    pub fn minus_constant(&self) -> f64 {
        self.constant - PI * self.delta * self.coeffs.first().copied().unwrap_or(0.0)
    }
}

/// Which boundary condition a fit imposes on the disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    Value,
    NormalDerivative,
}

/// Unknowns besides the multipole coefficients.
#[derive(Debug, Clone, Copy)]
pub struct FitSpec {
    pub condition: Condition,
    pub lin: f64,
    /// Known coefficient of L, or `None` to fit it.
    pub log: Option<f64>,
    pub fit_constant: bool,
}

pub const MAX_ORDER: usize = 256;
const CONVERGENCE_TOL: f64 = 1e-11;

/// Fit on the disk |Z| = δ with boundary data `rhs(ϑ)` (value or ∂/∂ν,
/// ν pointing out of the disk). Multipole order doubles until the far-field
/// constants settle.
pub fn fit_disk(delta: f64, fit: FitSpec, rhs: &dyn Fn(f64) -> f64) -> Result<StripField> {
    let mut order = 4;
    let mut prev: Option<(f64, f64, f64)> = None;
    loop {
        let field = fit_disk_order(delta, fit, rhs, order)?;
        let key = (field.plus_constant(), field.minus_constant(), field.log);
        if let Some(p) = prev {
            let change = (key.0 - p.0).abs().max((key.1 - p.1).abs()).max((key.2 - p.2).abs());
            if change < CONVERGENCE_TOL {
                return Ok(field);
            }
        }
        if order >= MAX_ORDER {
            return Err(Error::NoConvergence(format!("disk multipole fit at delta = {delta}")));
        }
        prev = Some(key);
        order *= 2;
    }
}

/// Least-squares fit at a fixed multipole order. The disk problems are
/// symmetric in S, so only real coefficients and the upper half circle are used.
pub fn fit_disk_order(delta: f64, fit: FitSpec, rhs: &dyn Fn(f64) -> f64, order: usize) -> Result<StripField> {
    let basis = PeriodicMultipole::new(order + 2);
    let q = 2 * order + 16;
    let thetas: Vec<f64> = (0..q).map(|i| PI * (i as f64 + 0.5) / q as f64).collect();
    let extra = usize::from(fit.fit_constant) + usize::from(fit.log.is_none());
    let cols = order + extra;
    let mut a = Matrix::<f64>::zeros(q, cols);
    let mut b = vec![0.0; q];
    for (i, &t) in thetas.iter().enumerate() {
        let e = Complex64::from_polar(1.0, t);
        let z = e * delta;
        let g = basis.eval_scaled(z, delta);
        let (l0, l1, _) = log_term(z);
        let mut col = 0;
        let entry = |f0: Complex64, f1: Complex64| match fit.condition {
            Condition::Value => f0.re,
            Condition::NormalDerivative => (f1 * e).re,
        };
        if fit.fit_constant {
            a.set(i, col, if fit.condition == Condition::Value { 1.0 } else { 0.0 });
            col += 1;
        }
        if fit.log.is_none() {
            a.set(i, col, entry(l0, l1));
            col += 1;
        }
        for n in 0..order {
            let d1 = -g[n + 1] * ((n + 1) as f64 / delta);
            a.set(i, col + n, entry(g[n], d1));
        }
        let lin = Complex64::new(fit.lin, 0.0);
        let mut known = entry(lin * z, lin);
        if let Some(lg) = fit.log {
            known += lg * entry(l0, l1);
        }
        b[i] = rhs(t) - known;
    }
    let sol = QrFactor::new(&a, 1e-14)?.solve(&b)?;
    let mut col = 0;
    let constant = if fit.fit_constant {
        col += 1;
        sol.x[0]
    } else {
        0.0
    };
    let log = match fit.log {
        Some(v) => v,
        None => {
            col += 1;
            sol.x[col - 1]
        }
    };
    Ok(StripField { lin: fit.lin, log, coeffs: sol.x[col..].to_vec(), constant, delta, basis })
}

/// Dirichlet cell solutions Φ⁺ (lin = ½) and Φ⁻ (lin = −½) for a disk.
pub fn disk_dirichlet(delta: f64) -> Result<(StripField, StripField)> {
    let fit = |lin| FitSpec { condition: Condition::Value, lin, log: Some(1.0), fit_constant: true };
    Ok((fit_disk(delta, fit(0.5), &|_| 0.0)?, fit_disk(delta, fit(-0.5), &|_| 0.0)?))
}

/// Neumann cell solution Ψ ~ N ± λ for a disk; returns (Ψ, λ).
pub fn disk_neumann(delta: f64) -> Result<(StripField, f64)> {
    let fit = FitSpec { condition: Condition::NormalDerivative, lin: 1.0, log: Some(0.0), fit_constant: false };
    let psi = fit_disk(delta, fit, &|_| 0.0)?;
    let lambda = 0.5 * (psi.plus_constant() - psi.minus_constant());
    Ok((psi, lambda))
}

/// Normal-displacement coefficient d(ϑ) of Model 1 relative to Model 2 on
/// the unit circle, and the companion d̃ entering the Neumann condition.
pub fn model1_d(delta: f64, t: f64) -> f64 {
    -0.5 * delta * delta * t.cos() * t.sin().powi(2)
}

pub fn model1_d_tilde(delta: f64, t: f64) -> f64 {
    delta * t.sin() * (1.0 - 1.5 * t.sin().powi(2))
}

fn normal_second(j: &Jet, t: f64) -> f64 {
    let (c, s) = (t.cos(), t.sin());
    c * c * j.hess[0] + 2.0 * c * s * j.hess[1] + s * s * j.hess[2]
}

fn normal_first(j: &Jet, t: f64) -> f64 {
    t.cos() * j.grad[0] + t.sin() * j.grad[1]
}

fn tangential_first(j: &Jet, t: f64) -> f64 {
    -t.sin() * j.grad[0] + t.cos() * j.grad[1]
}

/// Second-order Dirichlet constants (σ̃₊, τ̃₊, σ̃₋, τ̃₋) for a disk.
///
/// Φ̃ = −½N²Φ_N + H with H harmonic and bounded; on the disk
/// H = −d Φ_ν + ½N²Φ_N, and the constants are the limits of H.
pub fn disk_sigma_tilde(delta: f64, model1: bool, plus: &StripField, minus: &StripField) -> Result<[f64; 4]> {
    let fit = FitSpec { condition: Condition::Value, lin: 0.0, log: Some(0.0), fit_constant: true };
    fn data<'a>(delta: f64, model1: bool, phi: &'a StripField) -> impl Fn(f64) -> f64 + 'a {
        move |t: f64| {
            let z = Complex64::from_polar(delta, t);
            let j = phi.jet(z);
            let d = if model1 { model1_d(delta, t) } else { 0.0 };
            -d * normal_first(&j, t) + 0.5 * z.re * z.re * j.grad[0]
        }
    }
    let hp = fit_disk(delta, fit, &data(delta, model1, plus))?;
    let hm = fit_disk(delta, fit, &data(delta, model1, minus))?;
    Ok([hp.plus_constant(), hp.minus_constant(), -hm.minus_constant(), -hm.plus_constant()])
}

/// μ̃ for a disk by the boundary-integral formula
/// μ̃ = λ − ½∮[(Ψ − 2NΨ_N)ν_N + dΨ_νν + d̃Ψ_ν⊥] dℓ.
pub fn disk_mu_tilde_formula(delta: f64, model1: bool, psi: &StripField, lambda: f64) -> f64 {
    let n = 512;
    let mut sum = 0.0;
    for i in 0..n {
        let t = 2.0 * PI * i as f64 / n as f64;
        let z = Complex64::from_polar(delta, t);
        let j = psi.jet(z);
        let (d, dt) = if model1 { (model1_d(delta, t), model1_d_tilde(delta, t)) } else { (0.0, 0.0) };
        let f = (j.value - 2.0 * z.re * j.grad[0]) * t.cos() + d * normal_second(&j, t) + dt * tangential_first(&j, t);
        sum += f * delta;
    }
    lambda - 0.5 * sum * 2.0 * PI / n as f64
}

/// μ̃ for a disk by solving for Ψ̃ = −½N²Ψ_N + H with the perturbed
/// Neumann condition ∂Ψ̃/∂ν = −dΨ_νν − d̃Ψ_ν⊥.
pub fn disk_mu_tilde_solve(delta: f64, model1: bool, psi: &StripField) -> Result<f64> {
    let fit = FitSpec { condition: Condition::NormalDerivative, lin: 0.0, log: None, fit_constant: false };
    let data = |t: f64| {
        let z = Complex64::from_polar(delta, t);
        let j = psi.jet(z);
        let (d, dt) = if model1 { (model1_d(delta, t), model1_d_tilde(delta, t)) } else { (0.0, 0.0) };
        let target = -d * normal_second(&j, t) - dt * tangential_first(&j, t);
        // ∇P for P = −½N²Ψ_N.
        let n = z.re;
        let pn = -n * j.grad[0] - 0.5 * n * n * j.hess[0];
        let ps = -0.5 * n * n * j.hess[1];
        target - (pn * t.cos() + ps * t.sin())
    };
    let h = fit_disk(delta, fit, &data)?;
    // H ~ ±(log/2)N.
    Ok(0.5 * h.log)
}

/// μ̌ for a disk by solving ΔΨ̌ = −1, ∂Ψ̌/∂ν = 0, with Ψ̌ = −½N² + H.
pub fn disk_mu_check_solve(delta: f64) -> Result<f64> {
    let fit = FitSpec { condition: Condition::NormalDerivative, lin: 0.0, log: None, fit_constant: false };
    let h = fit_disk(delta, fit, &|t: f64| delta * t.cos() * t.cos())?;
    Ok(0.5 * h.log)
}

/// μ̂ = ∮ Ψ ν_S dℓ.
pub fn disk_mu_hat(delta: f64, psi: &StripField) -> f64 {
    let n = 512;
    let mut sum = 0.0;
    for i in 0..n {
        let t = 2.0 * PI * i as f64 / n as f64;
        sum += psi.jet(Complex64::from_polar(delta, t)).value * t.sin() * delta;
    }
    sum * 2.0 * PI / n as f64
}

/// σ for touching disks (δ = ½), where τ = 0.
///
/// Once the gap 1 − 2δ is small the field inside it is exponentially small,
/// so σ(δ) is smooth up to δ = ½. It is extrapolated in h = ½ − δ from
/// multipole solutions at h = 0.01 … 0.04; degrees 3 and 4 must agree.
pub fn touching_disk_sigma() -> Result<f64> {
    let pts: Vec<(f64, f64)> = (0..7)
        .map(|i| {
            let h = 0.01 + 0.005 * i as f64;
            Ok((h, disk_dirichlet(0.5 - h)?.0.plus_constant()))
        })
        .collect::<Result<_>>()?;
    let at_zero = |deg: usize| -> Result<f64> {
        let a = Matrix::from_fn(pts.len(), deg + 1, |i, j| pts[i].0.powi(j as i32));
        let b: Vec<f64> = pts.iter().map(|p| p.1).collect();
        Ok(QrFactor::new(&a, 1e-15)?.solve(&b)?.x[0])
    };
    let (lo, hi) = (at_zero(3)?, at_zero(4)?);
    if (lo - hi).abs() > 1e-4 {
        return Err(Error::NoConvergence(format!("touching-disk extrapolation: {lo} vs {hi}")));
    }
    Ok(hi)
}
