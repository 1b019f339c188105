//! Closed-form cell constants for segment wires.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::WireShape;

fn check(delta: f64, shape: WireShape) -> Result<()> {
    if !(delta > 0.0) || delta > shape.delta_max() {
        return Err(Error::Domain(format!("delta = {delta} outside (0, {}]", shape.delta_max())));
    }
    Ok(())
}

/// (σ, τ) for a periodic array of segments, σ = σ₊ = σ₋, τ = τ₊ = τ₋.
pub fn segment_dirichlet(shape: WireShape, delta: f64) -> Result<(f64, f64)> {
    check(delta, shape)?;
    let k = 1.0 / (2.0 * PI);
    match shape {
        WireShape::PerpendicularSegment => {
            Ok((-k * ((2.0 * PI * delta).sinh() / 2.0).ln(), -k * (PI * delta).tanh().ln()))
        }
        WireShape::TangentialSegment => {
            let s = -k * (PI * delta).sin().ln();
            Ok((s, s))
        }
        _ => Err(Error::NotImplemented(format!("closed-form Dirichlet constants for {shape:?}"))),
    }
}

/// Blockage coefficient λ for segments.
pub fn segment_neumann(shape: WireShape, delta: f64) -> Result<f64> {
    check(delta, shape)?;
    match shape {
        WireShape::PerpendicularSegment => Ok(0.0),
        WireShape::TangentialSegment if delta < 0.5 => Ok(-(PI * delta).cos().ln() / PI),
        WireShape::TangentialSegment => Ok(f64::INFINITY),
        _ => Err(Error::NotImplemented(format!("closed-form Neumann constant for {shape:?}"))),
    }
}

/// Small-δ limit (1/2π)(log(1/(2πδ)) + a₀) shared by σ and τ.
pub fn small_delta_limit(shape: WireShape, delta: f64) -> f64 {
    ((1.0 / (2.0 * PI * delta)).ln() + shape.a0()) / (2.0 * PI)
}

/// Φ⁺ for tangential slits by conformal mapping.
///
/// ζ = e^{2πZ} sends the slits to an arc of |ζ| = 1, the Cayley map
/// t = i(1 − ζ)/(1 + ζ) sends the arc to [−b, b] with b = tan πδ, and the
/// Joukowski inverse s = (t + √(t² − b²))/b opens the segment to the unit
/// disk. Φ⁺ is the Dirichlet Green's function of |s| > 1 with its pole at
/// the image of N = +∞.
#[derive(Debug, Clone, Copy)]
pub struct TangentialSlitField {
    b: f64,
    s0: Complex64,
}

impl TangentialSlitField {
    pub fn new(delta: f64) -> Result<Self> {
        check(delta, WireShape::TangentialSegment)?;
        let b = (PI * delta).tan();
        let s0 = Self::open(Complex64::new(0.0, -1.0), b);
        Ok(Self { b, s0 })
    }

    fn open(t: Complex64, b: f64) -> Complex64 {
        let r = (t * t - b * b).sqrt();
        let s1 = (t + r) / b;
        let s2 = (t - r) / b;
        if s1.norm() >= s2.norm() {
            s1
        } else {
            s2
        }
    }

    /// Φ⁺ at Z = N + iS.
    pub fn value(&self, z: Complex64) -> f64 {
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::i();
        // t and t − t₀ (t₀ = −i) without cancellation on either side.
        let (t, dt) = if z.re > 0.0 {
            let w = (-z * 2.0 * PI).exp();
            (i * (w - one) / (w + one), i * 2.0 * w / (one + w))
        } else {
            let zeta = (z * 2.0 * PI).exp();
            (i * (one - zeta) / (one + zeta), i * 2.0 / (one + zeta))
        };
        let s = Self::open(t, self.b);
        let num = if dt.norm() < 0.1 {
            // s − s₀ = (t − t₀)(1 + (t + t₀)/(r + r₀))/b on the branch of s₀.
            let t0 = -i;
            let r0 = self.s0 * self.b - t0;
            let mut r = (t * t - self.b * self.b).sqrt();
            if (r - r0).norm() > (r + r0).norm() {
                r = -r;
            }
            dt * (one + (t + t0) / (r + r0)) / self.b
        } else {
            s - self.s0
        };
        let g = -(num / (one - self.s0.conj() * s)).norm().ln() / (2.0 * PI);
        if g.is_finite() {
            g
        } else {
            f64::INFINITY
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tangential_examples() {
        let (s, t) = segment_dirichlet(WireShape::TangentialSegment, 1.0 / 6.0).unwrap();
        assert!((s - 2f64.ln() / (2.0 * PI)).abs() < 1e-15);
        assert_eq!(s, t);
        let (s, _) = segment_dirichlet(WireShape::TangentialSegment, 0.5).unwrap();
        assert!(s.abs() < 1e-16);
        let l = segment_neumann(WireShape::TangentialSegment, 0.25).unwrap();
        assert!((l - 2f64.ln() / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn perpendicular_examples() {
        let (s, t) = segment_dirichlet(WireShape::PerpendicularSegment, 0.25).unwrap();
        assert!((s + 0.022_333_659_798_752_37).abs() < 1e-14);
        assert!((t - 0.067_148_784_275_695_91).abs() < 1e-14);
        assert_eq!(segment_neumann(WireShape::PerpendicularSegment, 0.7).unwrap(), 0.0);
        assert!(segment_dirichlet(WireShape::PerpendicularSegment, 0.0).is_err());
    }

    #[test]
    fn slit_field_limits() {
        for &d in &[0.1, 0.2, 0.37] {
            let f = TangentialSlitField::new(d).unwrap();
            let (sigma, _) = segment_dirichlet(WireShape::TangentialSegment, d).unwrap();
            let n = 5.0;
            assert!((f.value(Complex64::new(n, 0.3)) - n - sigma).abs() < 1e-11);
            assert!((f.value(Complex64::new(-n, 0.1)) - sigma).abs() < 1e-11);
            assert!(f.value(Complex64::new(0.0, 0.5 * d)).abs() < 1e-12);
        }
    }
}
