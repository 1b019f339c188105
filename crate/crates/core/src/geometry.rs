//! Cage geometry: the curve Γ, wire placement by arc length and the two
//! wire models.
//!
//! Wires are `K_j = z_j + e^{iθ_j} r K` under Model 1. Under Model 2 the
//! scaled reference shape `rK` is laid out in the curvilinear coordinates
//! (n, s) of Γ instead. Local coordinates put the outward normal ξ on the
//! real axis and the tangent η = iξ on the imaginary axis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Curve {
    /// |z| = 1.
    UnitCircle,
    /// Boundary of [-1, 1]²; arc length starts at (1, 0) and runs counterclockwise.
    UnitSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WireShape {
    Disk,
    /// K = [-1, 1] along the normal.
    PerpendicularSegment,
    /// K = [-i, i] along the tangent.
    TangentialSegment,
    /// Side √2, circumradius 1, sides aligned with the local axes.
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WireModel {
    #[serde(rename = "model1", alias = "1")]
    Model1,
    #[serde(rename = "model2", alias = "2")]
    Model2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl Curve {
    /// |Γ|.
    pub fn perimeter(self) -> f64 {
        match self {
            Curve::UnitCircle => 2.0 * PI,
            Curve::UnitSquare => 8.0,
        }
    }

    /// Point, outward normal angle and curvature at arc length `s`.
    pub fn frame(self, s: f64) -> (Complex64, f64, f64) {
        let s = s.rem_euclid(self.perimeter());
        match self {
            Curve::UnitCircle => (Complex64::from_polar(1.0, s), s, 1.0),
            Curve::UnitSquare => square_frame(s),
        }
    }

    /// (n, s) ↦ z.
    pub fn curvilinear_map(self, n: f64, s: f64) -> Complex64 {
        match self {
            Curve::UnitCircle => Complex64::from_polar(1.0 + n, s),
            Curve::UnitSquare => {
                let (z, theta, _) = square_frame(s.rem_euclid(8.0));
                z + Complex64::from_polar(n, theta)
            }
        }
    }

    /// z ↦ (n, s) with s in [0, |Γ|).
    pub fn curvilinear_inverse(self, z: Complex64) -> Result<(f64, f64)> {
        match self {
            Curve::UnitCircle => {
                let rho = z.norm();
                if rho < 1e-300 {
                    return Err(Error::OutOfReach);
                }
                Ok((rho - 1.0, z.arg().rem_euclid(2.0 * PI)))
            }
            Curve::UnitSquare => square_inverse(z),
        }
    }
}

const SQUARE_CORNER_TOL: f64 = 1e-12;

fn square_frame(s: f64) -> (Complex64, f64, f64) {
    // Corners sit at s = 1, 3, 5, 7; a corner takes the bisector normal.
    for (k, corner) in [1.0, 3.0, 5.0, 7.0].iter().enumerate() {
        if (s - corner).abs() < SQUARE_CORNER_TOL {
            let theta = PI / 4.0 + k as f64 * PI / 2.0;
            let z = Complex64::new(theta.cos().signum(), theta.sin().signum());
            return (z, theta, 0.0);
        }
    }
    let (z, theta) = if s < 1.0 {
        (Complex64::new(1.0, s), 0.0)
    } else if s < 3.0 {
        (Complex64::new(2.0 - s, 1.0), PI / 2.0)
    } else if s < 5.0 {
        (Complex64::new(-1.0, 4.0 - s), PI)
    } else if s < 7.0 {
        (Complex64::new(s - 6.0, -1.0), 1.5 * PI)
    } else {
        (Complex64::new(1.0, s - 8.0), 0.0)
    };
    (z, theta, 0.0)
}

fn square_inverse(z: Complex64) -> Result<(f64, f64)> {
    let (x, y) = (z.re, z.im);
    // Distances to the four side lines, signed positive outward.
    let d = [x - 1.0, y - 1.0, -1.0 - x, -1.0 - y];
    let inside = d.iter().all(|&v| v <= 0.0);
    let side = if inside {
        let mut best = 0;
        for k in 1..4 {
            if d[k] > d[best] {
                best = k;
            }
        }
        for k in 0..4 {
            if k != best && (d[k] - d[best]).abs() < 1e-14 {
                return Err(Error::OutOfReach);
            }
        }
        best
    } else {
        let outside: Vec<usize> = (0..4).filter(|&k| d[k] > 0.0).collect();
        if outside.len() != 1 {
            // Projection lands on a corner.
            return Err(Error::OutOfReach);
        }
        outside[0]
    };
    let n = d[side];
    let s = match side {
        0 => y.rem_euclid(8.0),
        1 => 2.0 - x,
        2 => 4.0 - y,
        _ => 6.0 + x,
    };
    Ok((n, s))
}

impl WireShape {
    /// Largest scaled radius before neighbouring wires touch.
    pub fn delta_max(self) -> f64 {
        match self {
            WireShape::Disk | WireShape::TangentialSegment => 0.5,
            WireShape::Square => FRAC_1_SQRT_2,
            WireShape::PerpendicularSegment => f64::INFINITY,
        }
    }

    /// Logarithmic-capacity constant a₀ of K (capacity e^{-a₀}).
    pub fn a0(self) -> f64 {
        match self {
            WireShape::Disk => 0.0,
            WireShape::PerpendicularSegment | WireShape::TangentialSegment => std::f64::consts::LN_2,
            // cap(square of side √2) = Γ(1/4)² √2 / (4π^{3/2}).
            WireShape::Square => -(gamma_quarter().powi(2) * 2f64.sqrt() / (4.0 * PI.powf(1.5))).ln(),
        }
    }

    /// Area of δK.
    pub fn area(self, delta: f64) -> f64 {
        match self {
            WireShape::Disk => PI * delta * delta,
            WireShape::Square => 2.0 * delta * delta,
            _ => 0.0,
        }
    }

    /// Is K symmetric under ξ ↦ -ξ?
    pub fn is_normal_symmetric(self) -> bool {
        true
    }

    /// Point of ∂K at parameter t ∈ [0, 2π). Segments are traversed along
    /// both faces with cosine spacing.
    pub fn boundary_point(self, t: f64) -> Complex64 {
        match self {
            WireShape::Disk => Complex64::from_polar(1.0, t),
            WireShape::PerpendicularSegment => Complex64::new(t.cos(), 0.0),
            WireShape::TangentialSegment => Complex64::new(0.0, t.cos()),
            WireShape::Square => {
                // Perimeter parametrized uniformly in arc length, starting at
                // the middle of the +ξ side.
                let h = FRAC_1_SQRT_2;
                let u = (t / (2.0 * PI)).rem_euclid(1.0) * 8.0;
                let p = if u < 1.0 {
                    (h, u * h)
                } else if u < 3.0 {
                    (h - (u - 1.0) * h, h)
                } else if u < 5.0 {
                    (-h, h - (u - 3.0) * h)
                } else if u < 7.0 {
                    (-h + (u - 5.0) * h, -h)
                } else {
                    (h, -h + (u - 7.0) * h)
                };
                Complex64::new(p.0, p.1)
            }
        }
    }

    /// Is the local point w (in units of r) inside K?
    pub fn contains_local(self, w: Complex64) -> bool {
        match self {
            WireShape::Disk => w.norm_sqr() <= 1.0,
            WireShape::Square => w.re.abs() <= FRAC_1_SQRT_2 && w.im.abs() <= FRAC_1_SQRT_2,
            _ => false,
        }
    }
}

fn gamma_quarter() -> f64 {
    3.625_609_908_221_908
}

/// User-facing description of a cage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CageConfig {
    pub curve: Curve,
    pub m: usize,
    pub delta: f64,
    pub shape: WireShape,
    pub model: WireModel,
    #[serde(default = "default_bc")]
    pub bc: BoundaryCondition,
    /// Arc-length offset of the first wire, in units of ε.
    #[serde(default)]
    pub phase: f64,
}

fn default_bc() -> BoundaryCondition {
    BoundaryCondition::Dirichlet
}

impl CageConfig {
    pub fn new(curve: Curve, m: usize, delta: f64, shape: WireShape, model: WireModel) -> Self {
        Self { curve, m, delta, shape, model, bc: BoundaryCondition::Dirichlet, phase: 0.0 }
    }

    pub fn epsilon(&self) -> f64 {
        self.curve.perimeter() / self.m as f64
    }
}

/// A built cage: wire centers, frames and derived scales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CageGeometry {
    pub config: CageConfig,
    pub centers: Vec<Complex64>,
    pub normal_angles: Vec<f64>,
    pub arclength: Vec<f64>,
    pub epsilon: f64,
    pub wire_radius: f64,
}

pub fn build_cage(config: &CageConfig) -> Result<CageGeometry> {
    if config.m < 3 {
        return Err(Error::InvalidCount(config.m));
    }
    let delta_max = config.shape.delta_max();
    if !(config.delta > 0.0) || config.delta >= delta_max {
        return Err(Error::WireOverlap { delta: config.delta, delta_max });
    }
    let eps = config.epsilon();
    let mut centers = Vec::with_capacity(config.m);
    let mut normal_angles = Vec::with_capacity(config.m);
    let mut arclength = Vec::with_capacity(config.m);
    for j in 0..config.m {
        let s = ((j as f64 + config.phase) * eps).rem_euclid(config.curve.perimeter());
        let (z, theta, _) = config.curve.frame(s);
        centers.push(z);
        normal_angles.push(theta);
        arclength.push(s);
    }
    Ok(CageGeometry { config: *config, centers, normal_angles, arclength, epsilon: eps, wire_radius: config.delta * eps })
}

impl CageGeometry {
    /// No wires: the free-space problem.
    pub fn free_space() -> Self {
        Self {
            config: CageConfig::new(Curve::UnitCircle, 0, 0.0, WireShape::Disk, WireModel::Model1),
            centers: Vec::new(),
            normal_angles: Vec::new(),
            arclength: Vec::new(),
            epsilon: 0.0,
            wire_radius: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Order of the rotation group that permutes the wires together with
    /// their local frames.
    pub fn symmetry_order(&self) -> usize {
        let m = self.len();
        match self.config.curve {
            _ if m == 0 => 1,
            Curve::UnitCircle => m,
            Curve::UnitSquare if m % 4 == 0 => 4,
            Curve::UnitSquare => 1,
        }
    }

    /// Map a local point w (units of r) of wire j to the plane.
    pub fn local_to_global(&self, j: usize, w: Complex64) -> Complex64 {
        let r = self.wire_radius;
        match (self.config.model, self.config.curve) {
            (WireModel::Model2, Curve::UnitCircle) => {
                self.config.curve.curvilinear_map(r * w.re, self.arclength[j] + r * w.im)
            }
            // The square's sides are straight, so both models coincide there.
            _ => self.centers[j] + Complex64::from_polar(1.0, self.normal_angles[j]) * (r * w),
        }
    }

    /// Inverse of [`local_to_global`](Self::local_to_global).
    pub fn global_to_local(&self, j: usize, z: Complex64) -> Complex64 {
        let r = self.wire_radius;
        match (self.config.model, self.config.curve) {
            (WireModel::Model2, Curve::UnitCircle) => {
                let n = z.norm() - 1.0;
                let ds = (z.arg() - self.arclength[j] + PI).rem_euclid(2.0 * PI) - PI;
                Complex64::new(n, ds) / r
            }
            _ => Complex64::from_polar(1.0, -self.normal_angles[j]) * (z - self.centers[j]) / r,
        }
    }

    /// `n_pts` points on ∂K_j, equispaced in the shape parameter.
    pub fn wire_boundary(&self, j: usize, n_pts: usize) -> Vec<Complex64> {
        (0..n_pts)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n_pts as f64;
                self.local_to_global(j, self.config.shape.boundary_point(t))
            })
            .collect()
    }

    /// Index of the wire containing z, if any.
    pub fn wire_containing(&self, z: Complex64) -> Option<usize> {
        let reach = 1.5 * self.wire_radius;
        (0..self.len()).find(|&j| {
            (z - self.centers[j]).norm() <= reach && self.config.shape.contains_local(self.global_to_local(j, z))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(m: usize, delta: f64) -> CageGeometry {
        build_cage(&CageConfig::new(Curve::UnitCircle, m, delta, WireShape::Disk, WireModel::Model1)).unwrap()
    }

    #[test]
    fn four_wires_on_circle() {
        let g = circle(4, 0.1);
        let expect = [Complex64::new(1.0, 0.0), Complex64::i(), Complex64::new(-1.0, 0.0), -Complex64::i()];
        for (z, e) in g.centers.iter().zip(expect) {
            assert!((z - e).norm() < 1e-15);
        }
        for (j, th) in g.normal_angles.iter().enumerate() {
            assert!((th - j as f64 * PI / 2.0).abs() < 1e-15);
        }
        assert!((g.epsilon - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn epsilon_is_perimeter_over_count() {
        assert!((circle(40, 0.1).epsilon - 2.0 * PI / 40.0).abs() < 1e-15);
        let sq = build_cage(&CageConfig::new(Curve::UnitSquare, 32, 0.1, WireShape::Disk, WireModel::Model1)).unwrap();
        assert_eq!(sq.epsilon, 0.25);
    }

    #[test]
    fn errors() {
        let mut c = CageConfig::new(Curve::UnitCircle, 2, 0.1, WireShape::Disk, WireModel::Model1);
        assert_eq!(build_cage(&c), Err(Error::InvalidCount(2)));
        c.m = 10;
        c.delta = 0.5;
        assert!(matches!(build_cage(&c), Err(Error::WireOverlap { .. })));
        c.shape = WireShape::PerpendicularSegment;
        c.delta = 3.0;
        assert!(build_cage(&c).is_ok());
    }

    #[test]
    fn curvilinear_examples() {
        let c = Curve::UnitCircle;
        assert!((c.curvilinear_map(0.0, 0.0) - 1.0).norm() < 1e-15);
        assert!((c.curvilinear_map(0.5, PI / 2.0) - Complex64::new(0.0, 1.5)).norm() < 1e-15);
        assert_eq!(c.curvilinear_inverse(Complex64::new(0.0, 0.0)), Err(Error::OutOfReach));
    }

    #[test]
    fn square_corner_uses_bisector() {
        let g = build_cage(&CageConfig::new(Curve::UnitSquare, 8, 0.1, WireShape::Disk, WireModel::Model1)).unwrap();
        assert!((g.centers[1] - Complex64::new(1.0, 1.0)).norm() < 1e-15);
        assert!((g.normal_angles[1] - PI / 4.0).abs() < 1e-15);
        assert_eq!(g.symmetry_order(), 4);
    }

    #[test]
    fn disk_boundary_is_a_circle() {
        let g = circle(20, 0.05 / (2.0 * PI / 20.0));
        for z in g.wire_boundary(0, 17) {
            assert!(((z - 1.0).norm() - 0.05).abs() < 1e-14);
        }
    }

    #[test]
    fn tangential_model2_is_an_arc() {
        let cfg = CageConfig::new(Curve::UnitCircle, 20, 0.25, WireShape::TangentialSegment, WireModel::Model2);
        let g = build_cage(&cfg).unwrap();
        let pts = g.wire_boundary(3, 40);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for z in &pts {
            assert!((z.norm() - 1.0).abs() < 1e-14);
            let ds = (z.arg() - g.arclength[3] + PI).rem_euclid(2.0 * PI) - PI;
            lo = lo.min(ds);
            hi = hi.max(ds);
        }
        assert!((hi - lo - 2.0 * 0.25 * g.epsilon).abs() < 1e-14);
    }

    #[test]
    fn perpendicular_models_coincide() {
        let mut cfg = CageConfig::new(Curve::UnitCircle, 20, 0.3, WireShape::PerpendicularSegment, WireModel::Model1);
        let a = build_cage(&cfg).unwrap().wire_boundary(5, 31);
        cfg.model = WireModel::Model2;
        let b = build_cage(&cfg).unwrap().wire_boundary(5, 31);
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).norm() < 1e-14);
        }
    }

    #[test]
    fn square_cell_capacity_constant() {
        // Capacity of the unit-side square is 0.590170...; K has side √2.
        let cap = (-WireShape::Square.a0()).exp();
        assert!((cap - 0.590_170_299_508_048_1 * 2f64.sqrt()).abs() < 1e-12);
    }
}
