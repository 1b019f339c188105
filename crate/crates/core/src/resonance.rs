//! Resonances of the enclosed region and their perturbation by the cage.
//!
//! Near a Dirichlet eigenvalue k*² of the interior, the interior field is
//! C₋₁ψ/ε (exterior source) or C₋₁ψ/ε² (interior source) with
//!
//!   |C₋₁| = |A| |a| / √((k̃̃ − k̃̃*)² + a²),   k = k* + εk̃* + ε²k̃̃,
//!
//! a Lorentzian in k of half-width √3|a|ε² at half maximum.
//!
//! Mode integrals, with ψ the eigenmode and ∂/∂n the outward normal:
//!   I₁ = ∫ψ², I₂ = ∮(∂ψ/∂n)², I₃ = ∮κ(∂ψ/∂n)²,
//!   I₄ = ∮∂φ̃₀⁺/∂n ∂ψ/∂n, I₅ = ∮∂φ̃₀⁻/∂n ∂ψ/∂n, I₆ = ∫φ̃₀⁻ψ,
//!   I₇ = ∮∂φ̂₀⁺/∂n ∂ψ/∂n, I₈ = ψ(z₀)
//! where φ̃₀⁺ is the outgoing exterior field equal to −∂ψ/∂n on Γ, φ̃₀⁻ a
//! particular interior solution of (∇² + k*²)φ̃ = (I₂/I₁)ψ with the same
//! boundary values, and φ̂₀⁺ the exterior source field vanishing on Γ.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryCondition, Curve};
use crate::numerics::bessel::{h1_seq, j_seq};
use crate::numerics::roots::{bessel_j_zeros, bessel_jp_zeros, golden_max};

/// Exterior Dirichlet integral for the (1,1) square mode, which needs a
/// corner-domain solver this crate does not have.
pub const SQUARE_I4_FIXTURE: Complex64 = Complex64::new(3.00, -16.02);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub curve: Curve,
    pub bc: BoundaryCondition,
    /// (m, q) on the circle: angular order and zero index. (l, m) on the square.
    pub indices: (usize, usize),
    pub k_star: f64,
    /// Another mode shares k*.
    pub degenerate: bool,
    /// Multiplier on the standard normalization.
    pub scale: f64,
}

fn j_m(m: usize, x: f64) -> f64 {
    j_seq(m, x)[m]
}

fn jp_m(m: usize, x: f64) -> f64 {
    let j = j_seq(m + 1, x);
    if m == 0 {
        -j[1]
    } else {
        0.5 * (j[m - 1] - j[m + 1])
    }
}

/// max over [0, 1] of |J_m(kρ)|, for k beyond the first maximum.
fn j_max(m: usize) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let x = bessel_jp_zeros(m, 0.0, m as f64 + 4.0 * (m as f64).cbrt() + 3.0).expect("first J' zero")[0];
    j_m(m, x).abs()
}

fn angular_norm(m: usize) -> f64 {
    if m == 0 {
        2.0 * PI
    } else {
        PI
    }
}

impl ModeSpec {
    /// Dirichlet mode J_m(k*ρ)cos mθ / max|J_m|, k* the q-th zero of J_m.
    pub fn circle(m: usize, q: usize) -> Result<Self> {
        let k_star = crate::numerics::roots::bessel_j_zero(m, q)?;
        Ok(Self { curve: Curve::UnitCircle, bc: BoundaryCondition::Dirichlet, indices: (m, q), k_star, degenerate: m > 0, scale: 1.0 })
    }

    /// Neumann mode J_m(k*ρ)cos mθ / max|J_m|, k* the q-th positive zero of J_m'.
    pub fn circle_neumann(m: usize, q: usize) -> Result<Self> {
        let hi = m as f64 + (q as f64 + 2.0) * PI + 2.0;
        let k_star = *bessel_jp_zeros(m, 0.0, hi)?
            .get(q - 1)
            .ok_or_else(|| Error::NoConvergence("J' zero not bracketed".into()))?;
        Ok(Self { curve: Curve::UnitCircle, bc: BoundaryCondition::Neumann, indices: (m, q), k_star, degenerate: m > 0, scale: 1.0 })
    }

    /// sin(lπ(x+1)/2) sin(mπ(y+1)/2) on [−1, 1]², so that I₁ = 1.
    pub fn square(l: usize, m: usize) -> Result<Self> {
        if l == 0 || m == 0 {
            return Err(Error::Domain("square mode indices start at 1".into()));
        }
        let n2 = l * l + m * m;
        let degenerate = (1..).take_while(|a| a * a < n2).any(|a| {
            let b2 = n2 - a * a;
            let b = (b2 as f64).sqrt().round() as usize;
            b * b == b2 && b > 0 && (a, b) != (l, m)
        });
        let k_star = 0.5 * PI * (n2 as f64).sqrt();
        Ok(Self { curve: Curve::UnitSquare, bc: BoundaryCondition::Dirichlet, indices: (l, m), k_star, degenerate, scale: 1.0 })
    }

    pub fn with_scale(self, scale: f64) -> Self {
        Self { scale, ..self }
    }

    pub fn normalization(&self) -> &'static str {
        match self.curve {
            Curve::UnitCircle => "max |psi| = 1 over the disk",
            Curve::UnitSquare => "integral of psi^2 = 1 over the square",
        }
    }

    /// ψ at z (zero outside the enclosed region).
    pub fn psi(&self, z: Complex64) -> f64 {
        let (a, b) = self.indices;
        match self.curve {
            Curve::UnitCircle => {
                let rho = z.norm();
                if rho > 1.0 {
                    return 0.0;
                }
                self.scale * j_m(a, self.k_star * rho) * (a as f64 * z.arg()).cos() / j_max(a)
            }
            Curve::UnitSquare => {
                if z.re.abs() > 1.0 || z.im.abs() > 1.0 {
                    return 0.0;
                }
                self.scale
                    * (a as f64 * PI * (z.re + 1.0) / 2.0).sin()
                    * (b as f64 * PI * (z.im + 1.0) / 2.0).sin()
            }
        }
    }

    /// ∂ψ/∂n on the unit circle at angle θ.
    pub fn normal_derivative(&self, theta: f64) -> f64 {
        let m = self.indices.0;
        self.scale * self.k_star * jp_m(m, self.k_star) * (m as f64 * theta).cos() / j_max(m)
    }
}

/// Every mode with k* in (k_min, k_max], ascending. Circle modes with m ≥ 1
/// come in cos/sin pairs and are flagged degenerate, as are square modes
/// sharing l² + m².
pub fn find_resonances(curve: Curve, k_min: f64, k_max: f64) -> Result<Vec<ModeSpec>> {
    if !(k_min > 0.0 && k_max > k_min) {
        return Err(Error::Domain(format!("need 0 < k_min < k_max, got {k_min}, {k_max}")));
    }
    let mut modes = Vec::new();
    match curve {
        Curve::UnitCircle => {
            // j_{m,1} > m, so orders up to k_max suffice.
            for m in 0..=(k_max as usize) {
                for (q, z) in bessel_j_zeros(m, 0.0, k_max)?.into_iter().enumerate() {
                    if z > k_min {
                        modes.push(ModeSpec::circle(m, q + 1)?);
                    }
                }
            }
        }
        Curve::UnitSquare => {
            let n = (2.0 * k_max / PI).ceil() as usize + 1;
            for l in 1..=n {
                for m in 1..=n {
                    let mode = ModeSpec::square(l, m)?;
                    if mode.k_star > k_min && mode.k_star <= k_max {
                        modes.push(mode);
                    }
                }
            }
        }
    }
    modes.sort_by(|a, b| a.k_star.total_cmp(&b.k_star).then(a.indices.cmp(&b.indices)));
    Ok(modes)
}

/// Neumann modes of the disk with k* in (k_min, k_max].
pub fn find_neumann_resonances(k_min: f64, k_max: f64) -> Result<Vec<ModeSpec>> {
    if !(k_min > 0.0 && k_max > k_min) {
        return Err(Error::Domain(format!("need 0 < k_min < k_max, got {k_min}, {k_max}")));
    }
    let mut modes = Vec::new();
    for m in 0..=(k_max as usize) {
        for (q, z) in bessel_jp_zeros(m, 0.0, k_max)?.into_iter().enumerate() {
            if z > k_min {
                modes.push(ModeSpec::circle_neumann(m, q + 1)?);
            }
        }
    }
    modes.sort_by(|a, b| a.k_star.total_cmp(&b.k_star));
    Ok(modes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasicIntegrals {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
}

/// I₁, I₂, I₃ in closed form. For Neumann modes I₂ is ∮ψ² instead.
pub fn mode_integrals_basic(mode: &ModeSpec) -> BasicIntegrals {
    let c2 = mode.scale * mode.scale;
    let k = mode.k_star;
    match (mode.curve, mode.bc) {
        (Curve::UnitCircle, BoundaryCondition::Dirichlet) => {
            let m = mode.indices.0;
            let norm = angular_norm(m) * c2 / j_max(m).powi(2);
            let jp = jp_m(m, k);
            let i2 = norm * (k * jp).powi(2);
            BasicIntegrals { i1: norm * 0.5 * jp * jp, i2, i3: i2 }
        }
        (Curve::UnitCircle, BoundaryCondition::Neumann) => {
            let m = mode.indices.0;
            let norm = angular_norm(m) * c2 / j_max(m).powi(2);
            let j = j_m(m, k);
            let i2 = norm * j * j;
            BasicIntegrals { i1: norm * 0.5 * (1.0 - (m * m) as f64 / (k * k)) * j * j, i2, i3: i2 }
        }
        (Curve::UnitSquare, _) => {
            // Each straight side carries (lπ/2)² or (mπ/2)²; curvature vanishes.
            let (l, m) = mode.indices;
            BasicIntegrals { i1: c2, i2: c2 * PI * PI * (l * l + m * m) as f64 / 2.0, i3: 0.0 }
        }
    }
}

/// The square's I₂ as printed in the source literature, (π/2)√(l²+m²).
/// It disagrees with ∮(∂ψ/∂n)² for the same ψ and is kept for comparison.
pub fn square_i2_literature(mode: &ModeSpec) -> f64 {
    mode.scale * mode.scale * mode.k_star
}

/// I₁ and I₂ by quadrature, for the circle modes.
pub fn mode_integrals_quadrature(mode: &ModeSpec, tol: f64) -> Result<BasicIntegrals> {
    use crate::numerics::quad::{quad_disk, trapezoid_periodic};
    if mode.curve != Curve::UnitCircle {
        return Err(Error::NotImplemented("quadrature integrals off the circle".into()));
    }
    let i1 = quad_disk(|x, y| mode.psi(Complex64::new(x, y)).powi(2), (0.0, 0.0), 1.0, tol)?;
    let n = 64 + 8 * mode.indices.0;
    let i2 = match mode.bc {
        BoundaryCondition::Dirichlet => {
            // One-sided derivative by a 5-point stencil inside the disk.
            let h = 1e-3;
            trapezoid_periodic(
                |t| {
                    let f = |r: f64| mode.psi(Complex64::from_polar(r, t));
                    let d = (25.0 * f(1.0) - 48.0 * f(1.0 - h) + 36.0 * f(1.0 - 2.0 * h) - 16.0 * f(1.0 - 3.0 * h)
                        + 3.0 * f(1.0 - 4.0 * h))
                        / (12.0 * h);
                    d * d
                },
                n,
            )
        }
        BoundaryCondition::Neumann => trapezoid_periodic(|t| mode.psi(Complex64::from_polar(1.0, t)).powi(2), n),
    };
    Ok(BasicIntegrals { i1, i2, i3: i2 })
}

/// k̃* = −σ₋ I₂ / (2k* I₁).
pub fn first_order_shift(sigma_minus: f64, mode: &ModeSpec, i1: f64, i2: f64) -> Result<f64> {
    if !(i1 > 0.0) {
        return Err(Error::Domain(format!("I1 = {i1} must be positive")));
    }
    Ok(-sigma_minus * i2 / (2.0 * mode.k_star * i1))
}

fn require_circle_dirichlet(mode: &ModeSpec) -> Result<()> {
    if mode.curve != Curve::UnitCircle || mode.bc != BoundaryCondition::Dirichlet {
        return Err(Error::NotImplemented(format!("{:?} {:?} modes", mode.curve, mode.bc)));
    }
    Ok(())
}

/// φ̃₀⁺ = c H_m(k*ρ) cos mθ with c = −(∂ψ/∂n amplitude)/H_m(k*).
#[derive(Debug, Clone, Copy)]
pub struct ExteriorTildeField {
    pub mode: ModeSpec,
    pub coeff: Complex64,
}

impl ExteriorTildeField {
    pub fn value(&self, z: Complex64) -> Complex64 {
        let m = self.mode.indices.0;
        let h = h1_seq(m, self.mode.k_star * z.norm())[m];
        self.coeff * h * (m as f64 * z.arg()).cos()
    }
}

/// The outgoing field φ̃₀⁺ and I₄.
pub fn exterior_tilde_field(mode: &ModeSpec) -> Result<(ExteriorTildeField, Complex64)> {
    require_circle_dirichlet(mode)?;
    let m = mode.indices.0;
    let k = mode.k_star;
    let h = h1_seq(m + 1, k);
    let hp = if m == 0 { -h[1] } else { 0.5 * (h[m - 1] - h[m + 1]) };
    let dn = mode.scale * k * jp_m(m, k) / j_max(m);
    let coeff = -dn / h[m];
    let i4 = coeff * k * hp * dn * angular_norm(m);
    Ok((ExteriorTildeField { mode: *mode, coeff }, i4))
}

/// φ̃₀⁻ = −(ρ∂ψ/∂ρ) + gauge·ψ, which solves (∇² + k*²)φ̃ = 2k*²ψ = (I₂/I₁)ψ.
#[derive(Debug, Clone, Copy)]
pub struct InteriorParticular {
    pub mode: ModeSpec,
    pub gauge: f64,
}

impl InteriorParticular {
    pub fn value(&self, z: Complex64) -> f64 {
        let m = self.mode.indices.0;
        let k = self.mode.k_star;
        let rho = z.norm();
        let radial = -self.mode.scale * k * rho * jp_m(m, k * rho) / j_max(m);
        radial * (m as f64 * z.arg()).cos() + self.gauge * self.mode.psi(z)
    }
}

/// φ̃₀⁻ with the given gauge, I₅ and I₆.
pub fn interior_particular_field(mode: &ModeSpec, gauge: f64) -> Result<(InteriorParticular, f64, f64)> {
    let b = mode_integrals_basic(mode);
    let (i5, i6) = match (mode.curve, mode.bc) {
        (Curve::UnitCircle, BoundaryCondition::Dirichlet) => {
            if mode.degenerate {
                return Err(Error::DegenerateMode);
            }
            // ∂/∂ρ(ρ ∂ψ/∂ρ) vanishes on ρ = 1 by Bessel's equation.
            (0.0, b.i1)
        }
        // On each side ∂/∂n(x·∇ψ) integrates to half of (∂ψ/∂n)².
        (Curve::UnitSquare, BoundaryCondition::Dirichlet) => (-0.5 * b.i2, b.i1),
        _ => return Err(Error::NotImplemented("particular solution for Neumann modes".into())),
    };
    Ok((InteriorParticular { mode: *mode, gauge }, i5 + gauge * b.i2, i6 + gauge * b.i1))
}

/// I₇ for a unit exterior source at z₀ (free field (i/4)H₀(k|z − z₀|)).
pub fn source_integral_i7(mode: &ModeSpec, z0: Complex64) -> Result<Complex64> {
    require_circle_dirichlet(mode)?;
    if !(z0.norm() > 1.0) {
        return Err(Error::Domain(format!("source {z0} must lie outside the unit circle")));
    }
    let m = mode.indices.0;
    let k = mode.k_star;
    let h0 = h1_seq(m, k * z0.norm())[m];
    let hk = h1_seq(m, k)[m];
    let weight = if m == 0 { 1.0 } else { 2.0 };
    let dn = mode.scale * k * jp_m(m, k) / j_max(m);
    Ok(weight * h0 / (2.0 * PI * hk) * dn * angular_norm(m) * (m as f64 * z0.arg()).cos())
}

/// ∂φ̂₀⁺/∂n on ρ = 1 at angle θ, summed mode by mode; the quadrature oracle for I₇.
pub fn exterior_source_normal_derivative(k: f64, z0: Complex64, theta: f64) -> Complex64 {
    let r0 = z0.norm();
    let mmax = (k * r0).ceil() as usize + 60;
    let h0 = h1_seq(mmax, k * r0);
    let hk = h1_seq(mmax, k);
    (0..=mmax)
        .map(|m| {
            let w = if m == 0 { 1.0 } else { 2.0 };
            w * h0[m] / (2.0 * PI * hk[m]) * (m as f64 * (theta - z0.arg())).cos()
        })
        .sum()
}

/// I₈ = ψ(z₀) for a unit point source inside the enclosed region.
pub fn source_integral_i8(mode: &ModeSpec, z0: Complex64) -> f64 {
    mode.psi(z0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Forcing {
    /// τ₊I₇ with I₇ from an exterior source.
    Exterior(Complex64),
    /// I₈ from an interior source.
    Interior(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellInputs {
    pub sigma_minus: f64,
    pub sigma_tilde_minus: f64,
    pub tau_plus: f64,
    pub tau_minus: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeIntegrals {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: Complex64,
    pub i5: f64,
    pub i6: f64,
    pub i7: Option<Complex64>,
    pub i8: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub mode: ModeSpec,
    pub normalization: String,
    pub integrals: ModeIntegrals,
    pub inputs: CellInputs,
    pub k_tilde_star: f64,
    pub k_tilde_tilde_star: f64,
    /// Signed; the Lorentzian width is |a|.
    pub a: f64,
    /// |A|.
    pub amplitude: f64,
    pub k_peak: f64,
    /// Full width at half maximum in k, 2√3|a|ε².
    pub fwhm: f64,
    /// 1 for an exterior source (field ∝ 1/ε), 2 for an interior one.
    pub epsilon_power: i32,
    /// Where each input came from: "computed", "fixture" or "closed form".
    pub provenance: BTreeMap<String, String>,
}

/// Assemble the second-order shift, width and amplitude.
pub fn second_order(mode: &ModeSpec, inputs: CellInputs, integrals: ModeIntegrals, forcing: Forcing) -> Result<ResonanceReport> {
    if mode.degenerate {
        return Err(Error::DegenerateMode);
    }
    let ModeIntegrals { i1, i2, i3, i4, i5, i6, .. } = integrals;
    if i4.im == 0.0 {
        return Err(Error::ZeroDamping);
    }
    let CellInputs { sigma_minus: sm, sigma_tilde_minus: stm, tau_plus: tp, tau_minus: tm, epsilon: eps } = inputs;
    let k = mode.k_star;
    let kt = first_order_shift(sm, mode, i1, i2)?;
    let ktt = -(i1 * kt * kt - stm * i3 - tp * tm * i4.re + sm * sm * i5 + 2.0 * k * kt * sm * i6) / (2.0 * i1 * k);
    let a = tp * tm * i4.im / (2.0 * i1 * k);
    let (f, power) = match forcing {
        Forcing::Exterior(i7) => ((tp * i7).norm(), 1),
        Forcing::Interior(i8) => (i8.abs(), 2),
    };
    let amplitude = f / (tp * tm * i4.im).abs();
    let vals = [kt, ktt, a, amplitude];
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite resonance inputs".into()));
    }
    Ok(ResonanceReport {
        mode: *mode,
        normalization: mode.normalization().to_string(),
        integrals,
        inputs,
        k_tilde_star: kt,
        k_tilde_tilde_star: ktt,
        a,
        amplitude,
        k_peak: k + eps * kt + eps * eps * ktt,
        fwhm: 2.0 * 3f64.sqrt() * a.abs() * eps * eps,
        epsilon_power: power,
        provenance: BTreeMap::new(),
    })
}

impl ResonanceReport {
    /// |C₋₁| at wavenumber k.
    pub fn c_minus1(&self, k: f64) -> f64 {
        let eps = self.inputs.epsilon;
        let ktt = (k - self.mode.k_star - eps * self.k_tilde_star) / (eps * eps);
        let d = ktt - self.k_tilde_tilde_star;
        self.amplitude * self.a.abs() / (d * d + self.a * self.a).sqrt()
    }

    /// Predicted interior |φ(z)| near resonance, |C₋₁||ψ(z)|/ε^p.
    pub fn field(&self, k: f64, z: Complex64) -> f64 {
        self.c_minus1(k) * self.mode.psi(z).abs() / self.inputs.epsilon.powi(self.epsilon_power)
    }

    pub fn peak_field(&self, z: Complex64) -> f64 {
        self.field(self.k_peak, z)
    }
}

/// Full report for a Dirichlet circle mode with a unit exterior source at z₀.
pub fn circle_report(mode: &ModeSpec, inputs: CellInputs, z0: Complex64) -> Result<ResonanceReport> {
    if mode.degenerate {
        return Err(Error::DegenerateMode);
    }
    let b = mode_integrals_basic(mode);
    let (_, i4) = exterior_tilde_field(mode)?;
    let (_, i5, i6) = interior_particular_field(mode, 0.0)?;
    let i7 = source_integral_i7(mode, z0)?;
    let integrals = ModeIntegrals { i1: b.i1, i2: b.i2, i3: b.i3, i4, i5, i6, i7: Some(i7), i8: None };
    let mut r = second_order(mode, inputs, integrals, Forcing::Exterior(i7))?;
    for key in ["i1", "i2", "i3", "i4", "i5", "i6", "i7"] {
        r.provenance.insert(key.into(), "closed form".into());
    }
    Ok(r)
}

/// Report for a square mode with an interior unit source, I₄ from the fixture.
pub fn square_report(mode: &ModeSpec, inputs: CellInputs, z0: Complex64) -> Result<ResonanceReport> {
    if mode.indices != (1, 1) {
        return Err(Error::NotImplemented("I4 is only available for the (1,1) square mode".into()));
    }
    let b = mode_integrals_basic(mode);
    let (_, i5, i6) = interior_particular_field(mode, 0.0)?;
    let i8 = source_integral_i8(mode, z0);
    let i4 = SQUARE_I4_FIXTURE * mode.scale * mode.scale;
    let integrals = ModeIntegrals { i1: b.i1, i2: b.i2, i3: b.i3, i4, i5, i6, i7: None, i8: Some(i8) };
    let mut r = second_order(mode, inputs, integrals, Forcing::Interior(i8))?;
    for key in ["i1", "i2", "i3", "i5", "i6", "i8"] {
        r.provenance.insert(key.into(), "closed form".into());
    }
    r.provenance.insert("i4".into(), "fixture".into());
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeumannResonance {
    pub mode: ModeSpec,
    pub i1: f64,
    /// ∮ψ² ds.
    pub i2: f64,
    pub eps_lambda: f64,
    pub shift: f64,
    pub k_shifted: f64,
    pub peak_scale: f64,
    /// ελ below 5: the expansion in 1/(ελ) is doubtful.
    pub regime_warning: bool,
}

/// Shift (1/ελ) I₂/(4k*I₁) of a Neumann mode behind a nearly solid shell.
pub fn neumann_resonance(mode: &ModeSpec, eps_lambda: f64) -> Result<NeumannResonance> {
    if mode.bc != BoundaryCondition::Neumann {
        return Err(Error::Domain("neumann_resonance needs a Neumann mode".into()));
    }
    if !(eps_lambda > 0.0) {
        return Err(Error::Domain(format!("eps*lambda = {eps_lambda} must be positive")));
    }
    let b = mode_integrals_basic(mode);
    let shift = b.i2 / (4.0 * mode.k_star * b.i1 * eps_lambda);
    Ok(NeumannResonance {
        mode: *mode,
        i1: b.i1,
        i2: b.i2,
        eps_lambda,
        shift,
        k_shifted: mode.k_star + shift,
        peak_scale: eps_lambda,
        regime_warning: eps_lambda < 5.0,
    })
}

/// Peak of a sampled response: coarse scan on `n` points, then golden section.
pub fn locate_peak(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize, tol: f64) -> (f64, f64) {
    let h = (hi - lo) / (n - 1) as f64;
    let mut best = (lo, f(lo));
    for i in 1..n {
        let k = lo + h * i as f64;
        let v = f(k);
        if v > best.1 {
            best = (k, v);
        }
    }
    golden_max(&f, (best.0 - h).max(lo), (best.0 + h).min(hi), tol)
}

/// Full width at half maximum of a single peak at `k_peak` with height `peak`,
/// by bisection on each side within `reach`.
pub fn half_max_width(f: impl Fn(f64) -> f64, k_peak: f64, peak: f64, reach: f64, tol: f64) -> Result<f64> {
    let half = 0.5 * peak;
    let side = |dir: f64| -> Result<f64> {
        let mut inner = 0.0;
        let mut outer = reach / 16.0;
        while f(k_peak + dir * outer) > half {
            inner = outer;
            outer *= 2.0;
            if outer > reach {
                return Err(Error::NoConvergence("half maximum not reached".into()));
            }
        }
        while outer - inner > tol {
            let mid = 0.5 * (inner + outer);
            if f(k_peak + dir * mid) > half {
                inner = mid;
            } else {
                outer = mid;
            }
        }
        Ok(0.5 * (inner + outer))
    };
    Ok(side(1.0)? + side(-1.0)?)
}

/// ψ(−0.5) of the (1,1) square mode, for reference.
pub const SQUARE_PSI_AT_MINUS_HALF: f64 = FRAC_1_SQRT_2;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_zeros_in_range() {
        let modes = find_resonances(Curve::UnitCircle, 0.5, 6.0).unwrap();
        let ks: Vec<f64> = modes.iter().map(|m| m.k_star).collect();
        for want in [2.404_825_557_695_773, 3.831_705_970_207_512, 5.135_622_301_840_683, 5.520_078_110_286_311] {
            assert!(ks.iter().any(|k| (k - want).abs() < 1e-12), "{want}");
        }
        assert!(find_resonances(Curve::UnitCircle, 0.5, 2.0).unwrap().is_empty());
        for m in &modes {
            assert!(j_m(m.indices.0, m.k_star).abs() < 1e-12);
        }
    }

    #[test]
    fn square_modes() {
        let modes = find_resonances(Curve::UnitSquare, 0.5, 4.0).unwrap();
        assert_eq!(modes[0].indices, (1, 1));
        assert!((modes[0].k_star - PI / 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!(!modes[0].degenerate);
        assert!(modes[1].degenerate);
        assert!((source_integral_i8(&modes[0], Complex64::new(-0.5, 0.0)) - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn c_minus1_is_lorentzian() {
        let mode = ModeSpec::circle(0, 1).unwrap();
        let inputs = CellInputs { sigma_minus: 0.05, sigma_tilde_minus: 0.005, tau_plus: 0.2, tau_minus: 0.2, epsilon: 0.2 };
        let r = circle_report(&mode, inputs, Complex64::new(2.0, 0.0)).unwrap();
        assert!((r.c_minus1(r.k_peak) - r.amplitude).abs() < 1e-12 * r.amplitude);
        let dk = 3f64.sqrt() * r.a.abs() * 0.04;
        for s in [-1.0, 1.0] {
            assert!((r.c_minus1(r.k_peak + s * dk) - 0.5 * r.amplitude).abs() < 1e-12 * r.amplitude);
        }
        assert!((r.a * 2.0 * r.integrals.i1 * mode.k_star - 0.04 * r.integrals.i4.im).abs() < 1e-14);
    }
}
