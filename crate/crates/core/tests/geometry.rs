use cagecalc::geometry::{build_cage, CageConfig, Curve, WireModel, WireShape};
use cagecalc::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn cage(curve: Curve, m: usize, delta: f64, shape: WireShape, model: WireModel) -> cagecalc::geometry::CageGeometry {
    build_cage(&CageConfig::new(curve, m, delta, shape, model)).unwrap()
}

#[test]
fn four_wires_sit_on_the_axes() {
    let g = cage(Curve::UnitCircle, 4, 0.1, WireShape::Disk, WireModel::Model1);
    let want = [Complex64::new(1.0, 0.0), Complex64::i(), Complex64::new(-1.0, 0.0), -Complex64::i()];
    for (j, w) in want.iter().enumerate() {
        assert!((g.centers[j] - w).norm() < 1e-15);
        assert!((g.normal_angles[j] - j as f64 * PI / 2.0).abs() < 1e-15);
    }
    assert!((g.epsilon - PI / 2.0).abs() < 1e-15);
}

#[test]
fn epsilon_is_perimeter_over_count() {
    let g = cage(Curve::UnitCircle, 40, 0.1, WireShape::Disk, WireModel::Model1);
    assert!((g.epsilon - 0.157_079_632_679_489_66).abs() < 1e-15);
    // The square is [-1, 1]^2, perimeter 8.
    let g = cage(Curve::UnitSquare, 32, 0.1, WireShape::Disk, WireModel::Model1);
    assert_eq!(g.epsilon, 0.25);
}

#[test]
fn invalid_configurations() {
    let bad = |m, d, s| build_cage(&CageConfig::new(Curve::UnitCircle, m, d, s, WireModel::Model1));
    assert!(matches!(bad(2, 0.1, WireShape::Disk), Err(Error::InvalidCount(2))));
    assert!(matches!(bad(10, 0.5, WireShape::Disk), Err(Error::WireOverlap { .. })));
    assert!(matches!(bad(10, 0.71, WireShape::Square), Err(Error::WireOverlap { .. })));
    assert!(bad(10, 3.0, WireShape::PerpendicularSegment).is_ok());
}

#[test]
fn disk_boundary_and_tangential_arc() {
    let g = cage(Curve::UnitCircle, 20, 0.25, WireShape::Disk, WireModel::Model1);
    for z in g.wire_boundary(0, 16) {
        assert!(((z - 1.0).norm() - g.wire_radius).abs() < 1e-15);
    }
    let g = cage(Curve::UnitCircle, 20, 0.25, WireShape::TangentialSegment, WireModel::Model2);
    let pts = g.wire_boundary(3, 64);
    let half = pts.iter().map(|z| (z.arg() - g.arclength[3]).abs()).fold(0.0, f64::max);
    assert!(pts.iter().all(|z| (z.norm() - 1.0).abs() < 1e-14));
    assert!((half - 0.25 * g.epsilon).abs() < 1e-12);
}

#[test]
fn perpendicular_models_coincide() {
    let a = cage(Curve::UnitCircle, 12, 0.3, WireShape::PerpendicularSegment, WireModel::Model1);
    let b = cage(Curve::UnitCircle, 12, 0.3, WireShape::PerpendicularSegment, WireModel::Model2);
    for (p, q) in a.wire_boundary(5, 20).iter().zip(b.wire_boundary(5, 20)) {
        assert!((p - q).norm() < 1e-14);
    }
}

#[test]
fn curvilinear_examples() {
    assert!((Curve::UnitCircle.curvilinear_map(0.0, 0.0) - 1.0).norm() < 1e-15);
    assert!((Curve::UnitCircle.curvilinear_map(0.5, PI / 2.0) - Complex64::new(0.0, 1.5)).norm() < 1e-15);
}

#[test]
fn rotating_the_phase_permutes_centers() {
    let mut cfg = CageConfig::new(Curve::UnitCircle, 9, 0.2, WireShape::Disk, WireModel::Model1);
    let a = build_cage(&cfg).unwrap();
    cfg.phase = 1.0;
    let b = build_cage(&cfg).unwrap();
    for j in 0..9 {
        assert!((b.centers[j] - a.centers[(j + 1) % 9]).norm() < 1e-14);
    }
}

#[test]
fn wires_are_disjoint() {
    for m in [10, 50, 200] {
        let g = cage(Curve::UnitCircle, m, 0.49, WireShape::Disk, WireModel::Model1);
        let a = g.wire_boundary(0, 64);
        let b = g.wire_boundary(1, 64);
        let d = a.iter().flat_map(|p| b.iter().map(move |q| (p - q).norm())).fold(f64::INFINITY, f64::min);
        assert!(d > 0.0);
    }
}

#[test]
fn model_difference_is_second_order() {
    let mut ratios = Vec::new();
    for m in [20, 40, 80] {
        let a = cage(Curve::UnitCircle, m, 0.3, WireShape::Disk, WireModel::Model1);
        let b = cage(Curve::UnitCircle, m, 0.3, WireShape::Disk, WireModel::Model2);
        // Model 1 is an exact disk, so the distance to it is closed form.
        let haus = b
            .wire_boundary(0, 400)
            .iter()
            .map(|p| ((p - a.centers[0]).norm() - a.wire_radius).abs())
            .fold(0.0, f64::max);
        ratios.push(haus / (a.epsilon * a.epsilon));
    }
    assert!(ratios.iter().all(|r| *r < 1.0), "{ratios:?}");
    assert!((ratios[2] / ratios[0] - 1.0).abs() < 0.05, "{ratios:?}");
}

proptest! {
    #[test]
    fn curvilinear_round_trip(r in 0.5f64..2.0, t in -PI..PI) {
        let z = Complex64::from_polar(r, t);
        let (n, s) = Curve::UnitCircle.curvilinear_inverse(z).unwrap();
        prop_assert!((Curve::UnitCircle.curvilinear_map(n, s) - z).norm() < 1e-14);
    }

    #[test]
    fn wire_containing_finds_boundary_interior(m in 5usize..60, j in 0usize..5, delta in 0.05f64..0.45) {
        let g = cage(Curve::UnitCircle, m, delta, WireShape::Disk, WireModel::Model1);
        let j = j % m;
        prop_assert_eq!(g.wire_containing(g.centers[j]), Some(j));
        let outside = g.centers[j] * (1.0 + 1.01 * g.wire_radius);
        prop_assert_eq!(g.wire_containing(outside), None);
    }
}
