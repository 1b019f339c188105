//! Homogenized outer solutions for the unit-circle cage with a point source
//! f = −δ_{z₀}.
//!
//! Interior fields are modal series Σ c_m R_m(ρ) cos m(θ − θ₀), θ₀ = arg z₀,
//! with R_m = ρ^m (Laplace) or J_m(kρ) (Helmholtz). The Helmholtz modal
//! denominators use the Wronskian J_m H_m′ − J_m′ H_m = 2i/(πk), so
//!
//!   (J_m′/J_m − H_m′/H_m)⁻¹ = (iπk/2) J_m(k) H_m(k),
//!
//! which stays finite at the zeros of J_m.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::bessel::{h1_seq, j_seq};
use crate::numerics::roots::bessel_j_zeros;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ThinDirichlet,
    ThickDirichlet,
    NeumannShell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    Laplace,
    Helmholtz,
}

/// Interior modal series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterSeries {
    pub regime: Regime,
    pub equation: Equation,
    pub k: f64,
    pub z0: Complex64,
    /// c_0..=c_{m_max}.
    pub coeffs: Vec<Complex64>,
    pub alpha: Option<f64>,
    pub tau_plus: Option<f64>,
    pub epsilon: Option<f64>,
}

impl OuterSeries {
    pub fn m_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Interior value at polar (ρ, θ), ρ ≤ 1.
    pub fn value_at(&self, rho: f64, theta: f64) -> Complex64 {
        let th0 = self.z0.arg();
        let radial: Vec<f64> = match self.equation {
            Equation::Laplace => (0..=self.m_max()).map(|m| rho.powi(m as i32)).collect(),
            Equation::Helmholtz => j_seq(self.m_max(), self.k * rho),
        };
        self.coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * radial[m] * (m as f64 * (theta - th0)).cos())
            .sum()
    }

    pub fn value_at_origin(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// |∇φ(0)|; only the m = 1 term contributes.
    pub fn gradient_at_origin(&self) -> f64 {
        let c1 = self.coeffs.get(1).copied().unwrap_or_default();
        match self.equation {
            Equation::Laplace => c1.norm(),
            // J_1(kρ) ≈ kρ/2.
            Equation::Helmholtz => c1.norm() * self.k / 2.0,
        }
    }
}

/// Signed α = 2π / (ε (log(1/(2πδ)) + a₀)); infinite at δ = δ_∞.
pub fn alpha_signed(delta: f64, a0: f64, epsilon: f64) -> f64 {
    2.0 * PI / (epsilon * ((1.0 / (2.0 * PI * delta)).ln() + a0))
}

/// δ_∞ = e^{a₀}/(2π), where the thin-wire denominator vanishes.
pub fn delta_infinity(a0: f64) -> f64 {
    a0.exp() / (2.0 * PI)
}

/// α for the thin-wire regime, refused when it is not positive and finite.
pub fn alpha_of(delta: f64, a0: f64, epsilon: f64) -> Result<f64> {
    if !(delta > 0.0 && epsilon > 0.0) {
        return Err(Error::Domain(format!("need delta > 0 and epsilon > 0, got {delta}, {epsilon}")));
    }
    let alpha = alpha_signed(delta, a0, epsilon);
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidRegime { delta_inf: delta_infinity(a0) });
    }
    Ok(alpha)
}

fn check_exterior(z0: Complex64) -> Result<()> {
    if !(z0.norm() > 1.0) {
        return Err(Error::Domain(format!("source {z0} must lie outside the unit circle")));
    }
    Ok(())
}

/// Number of Laplace modes for a geometric tail below 1e−12 of the first.
fn laplace_m_max(z0: Complex64) -> usize {
    let q = 1.0 / z0.norm();
    ((1e-12f64.ln() / q.ln()).ceil() as usize).clamp(40, 4000)
}

/// Helmholtz modes: past m ≈ k|z₀| the terms fall off like |z₀|^{−m}.
fn helmholtz_m_max(k: f64, z0: Complex64) -> usize {
    (k * z0.norm()).ceil() as usize + laplace_m_max(z0).min(200) + 10
}

/// φ₀⁻ = (1/π) Σ_{m≥1} ρ^m cos mθ / ((α + 2m)|z₀|^m).
pub fn laplace_thin_interior(z0: Complex64, alpha: f64) -> Result<OuterSeries> {
    check_exterior(z0)?;
    if !(alpha >= 0.0) {
        return Err(Error::InvalidRegime { delta_inf: f64::NAN });
    }
    let r = z0.norm();
    let coeffs = (0..=laplace_m_max(z0))
        .map(|m| {
            if m == 0 {
                Complex64::default()
            } else {
                Complex64::from(1.0 / (PI * (alpha + 2.0 * m as f64) * r.powi(m as i32)))
            }
        })
        .collect();
    Ok(OuterSeries {
        regime: Regime::ThinDirichlet,
        equation: Equation::Laplace,
        k: 0.0,
        z0,
        coeffs,
        alpha: Some(alpha),
        tau_plus: None,
        epsilon: None,
    })
}

/// εφ₁⁻ = (τ₊ε/π) Σ_{m≥1} ρ^m cos mθ / |z₀|^m.
pub fn laplace_thick_interior(z0: Complex64, tau_plus: f64, epsilon: f64) -> Result<OuterSeries> {
    check_exterior(z0)?;
    let r = z0.norm();
    let coeffs = (0..=laplace_m_max(z0))
        .map(|m| {
            if m == 0 {
                Complex64::default()
            } else {
                Complex64::from(tau_plus * epsilon / (PI * r.powi(m as i32)))
            }
        })
        .collect();
    Ok(OuterSeries {
        regime: Regime::ThickDirichlet,
        equation: Equation::Laplace,
        k: 0.0,
        z0,
        coeffs,
        alpha: None,
        tau_plus: Some(tau_plus),
        epsilon: Some(epsilon),
    })
}

/// Free-field modal weights e_0 = (i/4)H_0(k|z₀|), e_m = (i/2)H_m(k|z₀|).
pub fn source_weights(k: f64, z0: Complex64, m_max: usize) -> Vec<Complex64> {
    let i = Complex64::i();
    h1_seq(m_max, k * z0.norm())
        .into_iter()
        .enumerate()
        .map(|(m, h)| if m == 0 { i * 0.25 * h } else { i * 0.5 * h })
        .collect()
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Domain(format!("wavenumber {k} must be positive")));
    }
    Ok(())
}

/// Thin-wire Helmholtz interior: c_m = e_m / (1 + (iπα/2) J_m(k) H_m(k)).
pub fn helmholtz_thin_interior(k: f64, z0: Complex64, alpha: f64) -> Result<OuterSeries> {
    check_k(k)?;
    check_exterior(z0)?;
    if !(alpha >= 0.0) {
        return Err(Error::InvalidRegime { delta_inf: f64::NAN });
    }
    let m_max = helmholtz_m_max(k, z0);
    let e = source_weights(k, z0, m_max);
    let j = j_seq(m_max, k);
    let h = h1_seq(m_max, k);
    let coeffs = (0..=m_max)
        .map(|m| {
            let d = Complex64::new(1.0, 0.0) + Complex64::i() * (PI * alpha / 2.0) * j[m] * h[m];
            if d.is_finite() {
                e[m] / d
            } else {
                Complex64::default()
            }
        })
        .collect();
    Ok(OuterSeries {
        regime: Regime::ThinDirichlet,
        equation: Equation::Helmholtz,
        k,
        z0,
        coeffs,
        alpha: Some(alpha),
        tau_plus: None,
        epsilon: None,
    })
}

/// Raise NearResonance when k is within the guard of a zero of J_m.
///
/// The guard is |J_m(k)| < 10⁻² max(1, ε|J_m′(k)|); only orders whose
/// zeros can lie near k are checked, since J_m(k) is small for m ≫ k
/// without any resonance.
pub fn resonance_guard(k: f64, epsilon: f64) -> Result<()> {
    let m_top = k.ceil() as usize + 2;
    let j = j_seq(m_top + 1, k);
    for m in 0..=m_top {
        let jp = if m == 0 { -j[1] } else { 0.5 * (j[m - 1] - j[m + 1]) };
        if j[m].abs() < 1e-2 * (epsilon * jp.abs()).max(1.0) {
            let zeros = bessel_j_zeros(m, k - 0.5, k + 0.5)?;
            if let Some(z) = zeros.into_iter().min_by(|a, b| (a - k).abs().total_cmp(&(b - k).abs())) {
                return Err(Error::NearResonance { k, m, k_zero: z });
            }
        }
    }
    Ok(())
}

/// Thick-wire Helmholtz interior, εφ₁⁻ with
/// c_m = kετ₊ e_m (J_m′/J_m − H_m′/H_m) = −2iετ₊ e_m / (π J_m(k) H_m(k)).
pub fn helmholtz_thick_interior(k: f64, z0: Complex64, tau_plus: f64, epsilon: f64) -> Result<OuterSeries> {
    check_k(k)?;
    check_exterior(z0)?;
    resonance_guard(k, epsilon)?;
    let m_max = helmholtz_m_max(k, z0);
    let e = source_weights(k, z0, m_max);
    let j = j_seq(m_max, k);
    let h = h1_seq(m_max, k);
    let coeffs = (0..=m_max)
        .map(|m| {
            let c = -Complex64::i() * 2.0 * epsilon * tau_plus * e[m] / (PI * j[m] * h[m]);
            if c.is_finite() {
                c
            } else {
                Complex64::default()
            }
        })
        .collect();
    Ok(OuterSeries {
        regime: Regime::ThickDirichlet,
        equation: Equation::Helmholtz,
        k,
        z0,
        coeffs,
        alpha: None,
        tau_plus: Some(tau_plus),
        epsilon: Some(epsilon),
    })
}

/// Interior estimate for the perforated Neumann shell with ελ ≫ 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeumannShellEstimate {
    pub equation: Equation,
    pub eps_lambda: f64,
    /// Laplace: the interior constant, i.e. the mean of the solid-shell
    /// exterior field over Γ.
    pub interior_value: Option<f64>,
    /// Size of the interior correction (gradient for Laplace, field for
    /// Helmholtz), 1/(ελ).
    pub correction_scale: f64,
    /// Set when ελ < 5, outside the regime the estimate is meant for.
    pub regime_warning: bool,
}

/// The exterior Laplace field of a solid Neumann shell,
/// −(1/2π)(log|z − z₀| + log|z − 1/z̄₀| − log|z|).
pub fn neumann_shell_exterior(z: Complex64, z0: Complex64) -> f64 {
    let img = 1.0 / z0.conj();
    -((z - z0).norm().ln() + (z - img).norm().ln() - z.norm().ln()) / (2.0 * PI)
}

pub fn neumann_shell(equation: Equation, k: f64, z0: Complex64, eps_lambda: f64) -> Result<NeumannShellEstimate> {
    check_exterior(z0)?;
    if !(eps_lambda > 0.0) {
        return Err(Error::Domain(format!("eps*lambda = {eps_lambda} must be positive")));
    }
    if equation == Equation::Helmholtz {
        check_k(k)?;
    }
    let interior_value = match equation {
        // Mean over |z| = 1 of the image field: only log|z − z₀| survives.
        Equation::Laplace => Some(-z0.norm().ln() / (2.0 * PI)),
        Equation::Helmholtz => None,
    };
    Ok(NeumannShellEstimate {
        equation,
        eps_lambda,
        interior_value,
        correction_scale: 1.0 / eps_lambda,
        regime_warning: eps_lambda < 5.0,
    })
}

/// ελ for tangential segments with exponentially small gaps
/// δ = ½ − A e^{−c/ε}: ελ ≈ c/π − (ε/π) log(πA).
pub fn tangential_shell_eps_lambda(a: f64, c: f64, epsilon: f64) -> f64 {
    c / PI - epsilon / PI * (PI * a).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_examples() {
        let a = alpha_of(0.01, 0.0, 2.0 * PI / 40.0).unwrap();
        assert!((a - 14.454).abs() < 1e-3);
        assert!((a - 14.454_558_397_517_73).abs() < 1e-11);
        assert!(matches!(alpha_of(1.0 / (2.0 * PI), 0.0, 0.1), Err(Error::InvalidRegime { .. })));
        // Segments: log(1/(2πδ)) + log 2 vanishes at δ = 1/π.
        let d = alpha_of(1.0 / PI, 2f64.ln(), 0.1);
        assert!(matches!(d, Err(Error::InvalidRegime { delta_inf }) if (delta_inf - 1.0 / PI).abs() < 1e-15));
        let a = alpha_of(1.0 / (4.0 * PI), 2f64.ln(), 0.1).unwrap();
        assert!((a - 2.0 * PI / (0.1 * 2.0 * 2f64.ln())).abs() < 1e-12);
        assert!(matches!(alpha_of(0.2, 0.0, 0.1), Err(Error::InvalidRegime { .. })));
    }

    #[test]
    fn laplace_gradients() {
        let z0 = Complex64::new(2.0, 0.0);
        let free = laplace_thin_interior(z0, 0.0).unwrap().gradient_at_origin();
        assert!((free - 1.0 / (4.0 * PI)).abs() < 1e-15);
        let g = laplace_thin_interior(z0, 14.454).unwrap().gradient_at_origin();
        assert!((g - 0.009_672).abs() < 1e-6);
        assert_eq!(laplace_thick_interior(z0, 0.0, 0.1).unwrap().gradient_at_origin(), 0.0);
    }

    #[test]
    fn thin_stable_denominator_matches_ratio_form() {
        let (k, alpha) = (1.3, 7.0);
        let z0 = Complex64::new(2.0, 0.0);
        let s = helmholtz_thin_interior(k, z0, alpha).unwrap();
        let j = j_seq(4, k);
        let h = h1_seq(4, k);
        let jp = 0.5 * (j[1] - j[3]);
        let hp = (h[1] - h[3]) * 0.5;
        let ratio = Complex64::from(jp / j[2]) - hp / h[2];
        let e = source_weights(k, z0, 2)[2];
        let direct = e / (Complex64::new(1.0, 0.0) + alpha / k / ratio);
        assert!((s.coeffs[2] - direct).norm() < 1e-13);
    }

    #[test]
    fn guard_fires_only_near_zeros() {
        assert!(matches!(resonance_guard(2.404_825_6, 0.2), Err(Error::NearResonance { m: 0, .. })));
        assert!(resonance_guard(1.0, 0.2).is_ok());
        assert!(resonance_guard(3.0, 0.2).is_ok());
    }
}
