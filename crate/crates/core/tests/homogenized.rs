use cagecalc::cellsolve::{dirichlet_constants, CellOptions};
use cagecalc::discrete::{free_field, solve_helmholtz, solve_laplace, DiscreteOptions};
use cagecalc::geometry::{build_cage, CageConfig, Curve, WireModel, WireShape};
use cagecalc::homogenized::*;
use cagecalc::numerics::bessel::{bessel_j, hankel1};
use cagecalc::numerics::quad::quad_1d;
use cagecalc::Error;
use num_complex::Complex64;
use std::f64::consts::PI;

fn z2() -> Complex64 {
    Complex64::new(2.0, 0.0)
}

fn disk_cage(m: usize, delta: f64) -> cagecalc::geometry::CageGeometry {
    build_cage(&CageConfig::new(Curve::UnitCircle, m, delta, WireShape::Disk, WireModel::Model1)).unwrap()
}

fn tau(delta: f64) -> f64 {
    dirichlet_constants(WireShape::Disk, delta, &CellOptions::default()).unwrap().tau_plus
}

#[test]
fn alpha_values_and_invalid_regime() {
    let eps = 2.0 * PI / 40.0;
    assert!((alpha_of(0.01, 0.0, eps).unwrap() - 14.454).abs() < 1e-3);
    match alpha_of(1.0 / (2.0 * PI), 0.0, eps) {
        Err(Error::InvalidRegime { delta_inf }) => assert!((delta_inf - 0.159_154_943).abs() < 1e-9),
        other => panic!("{other:?}"),
    }
    // With a0 = log 2 the denominator vanishes at delta = 1/pi.
    assert!(alpha_of(1.0 / PI, 2f64.ln(), eps).is_err());
}

#[test]
fn thin_laplace_gradient() {
    let g = laplace_thin_interior(z2(), 0.0).unwrap().gradient_at_origin();
    assert!((g - 1.0 / (4.0 * PI)).abs() < 1e-14);
    let g = laplace_thin_interior(z2(), 14.454).unwrap().gradient_at_origin();
    assert!((g - 0.009_672).abs() < 1e-6);
    assert!(laplace_thin_interior(z2(), 1e12).unwrap().gradient_at_origin() < 1e-12);
}

#[test]
fn thick_laplace_limits() {
    let s = laplace_thick_interior(z2(), 0.0, 0.1).unwrap();
    assert!(s.coeffs.iter().all(|c| c.norm() == 0.0));
    let (eps, alpha) = (0.05, 500.0);
    let thick = laplace_thick_interior(z2(), 1.0 / (eps * alpha), eps).unwrap().gradient_at_origin();
    let thin = laplace_thin_interior(z2(), alpha).unwrap().gradient_at_origin();
    assert!((thick / thin - 1.0).abs() <= 2.0 / alpha + 1e-12);
}

#[test]
fn thick_laplace_against_discrete() {
    let g = disk_cage(40, 0.3);
    let d = solve_laplace(&g, z2(), &DiscreteOptions::default()).unwrap().gradient_norm(Complex64::default()).unwrap();
    let h = laplace_thick_interior(z2(), tau(0.3), g.epsilon).unwrap().gradient_at_origin();
    assert!((h / d - 1.0).abs() < 0.10, "{h} vs {d}");
}

#[test]
fn thin_helmholtz_without_wires_is_free_field() {
    let s = helmholtz_thin_interior(1.3, z2(), 0.0).unwrap();
    let mut seed = 11u64;
    for _ in 0..20 {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let rho = (seed >> 40) as f64 / (1u64 << 24) as f64 * 0.95;
        let th = (seed & 0xffff) as f64 / 65536.0 * 2.0 * PI;
        let z = Complex64::from_polar(rho, th);
        let want = free_field(Equation::Helmholtz, 1.3, z, z2());
        assert!((s.value_at(rho, th) - want).norm() < 1e-8);
    }
}

#[test]
fn thin_helmholtz_origin_against_direct_sum() {
    let (k, alpha) = (1.0, 14.454);
    let got = helmholtz_thin_interior(k, z2(), alpha).unwrap().value_at_origin();
    // Only m = 0 reaches the origin; evaluate it from single-order Bessel calls.
    let i = Complex64::i();
    let e0 = i * 0.25 * hankel1(0, 2.0 * k).unwrap();
    let jj = bessel_j(0, k).unwrap();
    let d = 1.0 + i * (PI * alpha / 2.0) * jj * hankel1(0, k).unwrap();
    assert!((got - e0 / d).norm() < 1e-10);
    assert!(helmholtz_thin_interior(k, z2(), 1e12).unwrap().value_at_origin().norm() < 1e-9);
}

#[test]
fn thick_helmholtz_guard_and_zero() {
    assert!(matches!(helmholtz_thick_interior(2.404_83, z2(), 0.1, 0.1), Err(Error::NearResonance { m: 0, .. })));
    let s = helmholtz_thick_interior(1.0, z2(), 0.0, 0.1).unwrap();
    assert_eq!(s.value_at_origin().norm(), 0.0);
}

#[test]
fn thick_helmholtz_against_discrete() {
    let (m, delta, k) = (30, 0.1, 1.5);
    let g = disk_cage(m, delta);
    let d = solve_helmholtz(&g, k, z2(), &DiscreteOptions::default()).unwrap().evaluate(Complex64::default()).unwrap();
    let h = helmholtz_thick_interior(k, z2(), tau(delta), g.epsilon).unwrap().value_at_origin();
    assert!((h.norm() / d.norm() - 1.0).abs() < 0.10, "{} vs {}", h.norm(), d.norm());
}

#[test]
fn thin_and_thick_overlap_for_small_wires() {
    let eps = 2.0 * PI / 40.0;
    for delta in [0.005, 0.01, 0.02] {
        let thin = helmholtz_thin_interior(1.0, z2(), alpha_of(delta, 0.0, eps).unwrap()).unwrap().value_at_origin();
        let thick = helmholtz_thick_interior(1.0, z2(), tau(delta), eps).unwrap().value_at_origin();
        assert!((thick.norm() / thin.norm() - 1.0).abs() < 0.15, "delta {delta}");
    }
}

#[test]
fn shielding_improves_with_alpha() {
    let mut last = (f64::INFINITY, f64::INFINITY);
    for i in 0..=40 {
        let alpha = 10f64.powf(i as f64 / 20.0);
        let l = laplace_thin_interior(z2(), alpha).unwrap().gradient_at_origin();
        let h = helmholtz_thin_interior(1.0, z2(), alpha).unwrap().value_at_origin().norm();
        assert!(l < last.0 && h < last.1);
        last = (l, h);
    }
}

#[test]
fn series_tail_is_negligible() {
    for s in [laplace_thin_interior(z2(), 5.0).unwrap(), helmholtz_thin_interior(1.0, z2(), 5.0).unwrap()] {
        let half = s.m_max() / 2;
        let mut cut = s.clone();
        cut.coeffs.truncate(half + 1);
        let (a, b) = (s.value_at(0.5, 0.3), cut.value_at(0.5, 0.3));
        assert!((a - b).norm() < 1e-9 * a.norm());
    }
}

#[test]
fn thin_gradient_halves_when_wires_double() {
    let grad = |m: usize| {
        let alpha = alpha_of(0.01, 0.0, 2.0 * PI / m as f64).unwrap();
        laplace_thin_interior(z2(), alpha).unwrap().gradient_at_origin()
    };
    let r = grad(40) / grad(80);
    assert!((r / 2.0 - 1.0).abs() < 0.10, "{r}");
}

#[test]
fn neumann_shell_mean_matches_quadrature() {
    let est = neumann_shell(Equation::Laplace, 0.0, z2(), 20.0).unwrap();
    let mean = quad_1d(|t| neumann_shell_exterior(Complex64::from_polar(1.0, t), z2()), 0.0, 2.0 * PI, 1e-13).unwrap()
        / (2.0 * PI);
    assert!((est.interior_value.unwrap() - mean).abs() < 1e-8);
    assert!(!est.regime_warning);
    assert!(neumann_shell(Equation::Helmholtz, 1.0, z2(), 2.0).unwrap().regime_warning);
    assert!(neumann_shell(Equation::Laplace, 0.0, z2(), 1e12).unwrap().correction_scale < 1e-11);
}

#[test]
fn tangential_shell_blockage() {
    let (a, c, eps) = (1.0f64, 1.0f64, 0.1f64);
    let delta = 0.5 - a * (-c / eps).exp();
    let exact = eps * -(PI * delta).cos().ln() / PI;
    let approx = tangential_shell_eps_lambda(a, c, eps);
    assert!((approx / exact - 1.0).abs() < 0.02);
}
