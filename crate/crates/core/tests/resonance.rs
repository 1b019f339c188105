use cagecalc::cellsolve::{cell_dirichlet_analytic, dirichlet_constants, CellOptions};
use cagecalc::geometry::{Curve, WireShape};
use cagecalc::homogenized::{alpha_of, helmholtz_thin_interior, tangential_shell_eps_lambda};
use cagecalc::numerics::bessel::bessel_j;
use cagecalc::numerics::quad::trapezoid_periodic;
use cagecalc::resonance::*;
use cagecalc::Error;
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

const ORIGIN: Complex64 = Complex64::new(0.0, 0.0);

fn z2() -> Complex64 {
    Complex64::new(2.0, 0.0)
}

fn first() -> ModeSpec {
    ModeSpec::circle(0, 1).unwrap()
}

fn disk_inputs(epsilon: f64) -> CellInputs {
    CellInputs {
        sigma_minus: 0.058_666_9,
        sigma_tilde_minus: 0.005,
        tau_plus: 0.089_082_2,
        tau_minus: 0.089_082_2,
        epsilon,
    }
}

#[test]
fn circle_modes_in_range() {
    let ks: Vec<f64> = find_resonances(Curve::UnitCircle, 0.5, 6.0).unwrap().iter().map(|m| m.k_star).collect();
    for want in [2.404_83, 3.831_71, 5.135_62, 5.520_08] {
        assert!(ks.iter().any(|k| (k - want).abs() < 1e-5), "{want} missing from {ks:?}");
    }
    for m in find_resonances(Curve::UnitCircle, 0.5, 12.0).unwrap() {
        assert!(bessel_j(m.indices.0, m.k_star).unwrap().abs() < 1e-12);
        assert_eq!(m.degenerate, m.indices.0 > 0);
    }
    assert!(find_resonances(Curve::UnitCircle, 0.5, 2.4).unwrap().is_empty());
}

#[test]
fn square_modes_in_range() {
    let modes = find_resonances(Curve::UnitSquare, 0.5, 4.0).unwrap();
    assert_eq!(modes[0].indices, (1, 1));
    assert!((modes[0].k_star - PI / 2.0 * 2f64.sqrt()).abs() < 1e-15);
    assert!(!modes[0].degenerate);
    assert!(modes[1..].iter().all(|m| m.degenerate));
}

#[test]
fn circle_integrals_by_quadrature() {
    let mode = first();
    let k = mode.k_star;
    let j1 = bessel_j(1, k).unwrap();
    let b = mode_integrals_basic(&mode);
    assert!((b.i1 - PI * j1 * j1).abs() < 1e-14);
    assert!((b.i2 - 2.0 * PI * k * k * j1 * j1).abs() < 1e-13);
    assert_eq!(b.i3, b.i2);
    let q = mode_integrals_quadrature(&mode, 1e-11).unwrap();
    assert!((q.i1 - b.i1).abs() < 1e-9);
    assert!((q.i2 / b.i2 - 1.0).abs() < 1e-6);
    // The mode ratio used by the first-order shift.
    assert!((q.i2 / (2.0 * k * q.i1) - k).abs() < 1e-5);
}

#[test]
fn square_integrals() {
    let mode = ModeSpec::square(1, 1).unwrap();
    let b = mode_integrals_basic(&mode);
    assert_eq!(b.i1, 1.0);
    // ∮(∂ψ/∂n)² for ψ = sin sin on [-1, 1]² is π²; the literature quotes (π/2)√2.
    assert!((b.i2 - PI * PI).abs() < 1e-14);
    assert!((square_i2_literature(&mode) - PI / 2.0 * 2f64.sqrt()).abs() < 1e-15);
    let side = trapezoid_periodic(|t| (PI / 2.0 * (t / (2.0 * PI) * 2.0 - 1.0 + 1.0)).sin().powi(2), 256);
    assert!((4.0 * (PI / 2.0).powi(2) * side / PI - b.i2).abs() < 1e-12);
    assert!((source_integral_i8(&mode, Complex64::new(-0.5, 0.0)) - FRAC_1_SQRT_2).abs() < 1e-15);
    assert_eq!(SQUARE_PSI_AT_MINUS_HALF, FRAC_1_SQRT_2);
}

#[test]
fn first_order_shift_signs() {
    let mode = first();
    let b = mode_integrals_basic(&mode);
    let s = 0.04;
    let kt = first_order_shift(s, &mode, b.i1, b.i2).unwrap();
    assert!((kt + s * mode.k_star).abs() < 1e-12);
    assert_eq!(first_order_shift(0.0, &mode, b.i1, b.i2).unwrap(), 0.0);
    let disk = dirichlet_constants(WireShape::Disk, 0.2, &CellOptions::default()).unwrap().sigma_minus;
    assert!(first_order_shift(disk, &mode, b.i1, b.i2).unwrap() > 0.0);
    for d in [0.05, 0.25, 0.45] {
        let t = cell_dirichlet_analytic(WireShape::TangentialSegment, d).unwrap().sigma_minus;
        assert!(first_order_shift(t, &mode, b.i1, b.i2).unwrap() < 0.0);
    }
    assert!(first_order_shift(0.1, &mode, 0.0, 1.0).is_err());
}

#[test]
fn first_order_shift_ignores_normalization() {
    for mode in [first(), ModeSpec::square(1, 1).unwrap()] {
        let shift = |c: f64| {
            let m = mode.with_scale(c);
            let b = mode_integrals_basic(&m);
            first_order_shift(0.05, &m, b.i1, b.i2).unwrap()
        };
        assert!((shift(1.0) - shift(2.5)).abs() < 1e-14);
    }
}

#[test]
fn exterior_field_radiates() {
    let (f, i4) = exterior_tilde_field(&first()).unwrap();
    assert!(i4.im != 0.0);
    let amp = |r: f64| f.value(Complex64::new(r, 0.0)).norm() * r.sqrt();
    assert!((amp(50.0) / amp(10.0) - 1.0).abs() < 0.01);
    // On the circle the field cancels ∂ψ/∂n.
    assert!((f.value(Complex64::new(1.0, 0.0)) + first().normal_derivative(0.0)).norm() < 1e-13);
}

#[test]
fn exterior_integral_by_quadrature() {
    let mode = first();
    let (f, i4) = exterior_tilde_field(&mode).unwrap();
    let h = 1e-4;
    let dn = |t: f64| {
        let z = |r: f64| f.value(Complex64::from_polar(r, t));
        (z(1.0 + h) - z(1.0 - h)) / (2.0 * h)
    };
    let q = trapezoid_periodic(|t| dn(t) * mode.normal_derivative(t), 64);
    assert!((q - i4).norm() < 1e-6 * i4.norm());
}

fn fd_helmholtz(f: &impl Fn(Complex64) -> f64, z: Complex64, k: f64, h: f64) -> f64 {
    let lap = |h: f64| {
        (f(z + h) + f(z - h) + f(z + Complex64::new(0.0, h)) + f(z - Complex64::new(0.0, h)) - 4.0 * f(z)) / (h * h)
    };
    // Richardson on the five-point stencil.
    (4.0 * lap(h) - lap(2.0 * h)) / 3.0 + k * k * f(z)
}

#[test]
fn interior_particular_solves_the_forced_equation() {
    let mode = first();
    let k = mode.k_star;
    let b = mode_integrals_basic(&mode);
    let (p, _, _) = interior_particular_field(&mode, 0.0).unwrap();
    let f = |z: Complex64| p.value(z);
    for i in 1..10 {
        let z = Complex64::from_polar(0.09 * i as f64, 0.4 * i as f64);
        let r = fd_helmholtz(&f, z, k, 2e-3) - b.i2 / b.i1 * mode.psi(z);
        assert!(r.abs() < 1e-6, "residual {r} at {z}");
    }
    for i in 0..32 {
        let t = 2.0 * PI * i as f64 / 32.0;
        assert!((p.value(Complex64::from_polar(1.0, t)) + mode.normal_derivative(t)).abs() < 1e-8);
    }
}

#[test]
fn interior_integrals_by_quadrature() {
    let mode = first();
    let b = mode_integrals_basic(&mode);
    let (p, i5, i6) = interior_particular_field(&mode, 0.0).unwrap();
    assert_eq!(i5, 0.0);
    assert!((i6 - b.i1).abs() < 1e-14);
    let q6 = cagecalc::numerics::quad::quad_disk(|x, y| p.value(Complex64::new(x, y)) * mode.psi(Complex64::new(x, y)), (0.0, 0.0), 1.0, 1e-11).unwrap();
    assert!((q6 - i6).abs() < 1e-8);
    assert!(matches!(interior_particular_field(&ModeSpec::circle(1, 1).unwrap(), 0.0), Err(Error::DegenerateMode)));
}

#[test]
fn particular_gauge_drops_out() {
    let mode = first();
    let inputs = disk_inputs(2.0 * PI / 30.0);
    let base = circle_report(&mode, inputs, z2()).unwrap();
    let (_, i5, i6) = interior_particular_field(&mode, 0.37).unwrap();
    let ints = ModeIntegrals { i5, i6, ..base.integrals };
    let shifted = second_order(&mode, inputs, ints, Forcing::Exterior(ints.i7.unwrap())).unwrap();
    assert!((shifted.k_tilde_tilde_star - base.k_tilde_tilde_star).abs() < 1e-9);
    assert!((shifted.amplitude - base.amplitude).abs() < 1e-9);
}

#[test]
fn source_integral_symmetry_and_decay() {
    let mode = first();
    let a = source_integral_i7(&mode, z2()).unwrap();
    for t in [0.3, 1.7, -2.9] {
        let b = source_integral_i7(&mode, Complex64::from_polar(2.0, t)).unwrap();
        assert!((a - b).norm() < 1e-10);
    }
    let far = source_integral_i7(&mode, Complex64::new(1e4, 0.0)).unwrap();
    assert!(far.norm() < 0.02 * a.norm());
    assert!(source_integral_i7(&mode, Complex64::new(0.5, 0.0)).is_err());
}

#[test]
fn source_integral_by_boundary_quadrature() {
    let mode = first();
    let i7 = source_integral_i7(&mode, z2()).unwrap();
    let quad = |n: usize| {
        trapezoid_periodic(|t| exterior_source_normal_derivative(mode.k_star, z2(), t) * mode.normal_derivative(t), n)
    };
    assert!((quad(64) - i7).norm() < 1e-8);
    assert!((quad(128) - i7).norm() < 1e-8);
}

#[test]
fn lorentzian_profile() {
    let r = circle_report(&first(), disk_inputs(2.0 * PI / 30.0), z2()).unwrap();
    assert_eq!(r.c_minus1(r.k_peak), r.amplitude);
    let eps = r.inputs.epsilon;
    let half = 3f64.sqrt() * r.a.abs() * eps * eps;
    for s in [-1.0, 1.0] {
        assert!((r.c_minus1(r.k_peak + s * half) - r.amplitude / 2.0).abs() < 1e-12);
    }
    assert!((r.fwhm - 2.0 * half).abs() < 1e-15);
    // Identity of the width coefficient.
    let i = r.integrals;
    assert!((r.a * 2.0 * i.i1 * r.mode.k_star - r.inputs.tau_plus * r.inputs.tau_minus * i.i4.im).abs() < 1e-15);
}

#[test]
fn degenerate_and_undamped_modes_are_refused() {
    let m1 = ModeSpec::circle(1, 1).unwrap();
    assert!(matches!(circle_report(&m1, disk_inputs(0.2), z2()), Err(Error::DegenerateMode)));
    let mode = first();
    let base = circle_report(&mode, disk_inputs(0.2), z2()).unwrap();
    let ints = ModeIntegrals { i4: Complex64::new(1.0, 0.0), ..base.integrals };
    assert!(matches!(second_order(&mode, disk_inputs(0.2), ints, Forcing::Interior(1.0)), Err(Error::ZeroDamping)));
}

#[test]
fn square_interior_amplitude_scales_inverse_square() {
    let mode = ModeSpec::square(1, 1).unwrap();
    let z0 = Complex64::new(-0.5, 0.0);
    let a = square_report(&mode, disk_inputs(0.25), z0).unwrap();
    let b = square_report(&mode, disk_inputs(0.125), z0).unwrap();
    assert_eq!(a.integrals.i4, SQUARE_I4_FIXTURE);
    assert_eq!(a.provenance["i4"], "fixture");
    let want = FRAC_1_SQRT_2 / (0.089_082_2f64.powi(2) * SQUARE_I4_FIXTURE.im.abs());
    assert!((a.amplitude - want).abs() < 1e-12 * want);
    let ratio = b.peak_field(ORIGIN) / a.peak_field(ORIGIN);
    assert!((ratio - 4.0).abs() < 1e-12);
}

#[test]
fn predictions_ignore_normalization() {
    let z0 = Complex64::new(-0.5, 0.0);
    let sq = ModeSpec::square(1, 1).unwrap();
    let a = square_report(&sq, disk_inputs(0.25), z0).unwrap();
    let b = square_report(&sq.with_scale(3.0), disk_inputs(0.25), z0).unwrap();
    assert!((a.k_peak - b.k_peak).abs() < 1e-9);
    let z = Complex64::new(0.1, 0.2);
    assert!((a.peak_field(z) / b.peak_field(z) - 1.0).abs() < 1e-9);
    let a = circle_report(&first(), disk_inputs(0.2), z2()).unwrap();
    let b = circle_report(&first().with_scale(3.0), disk_inputs(0.2), z2()).unwrap();
    assert!((a.k_peak - b.k_peak).abs() < 1e-9);
    assert!((a.peak_field(z) / b.peak_field(z) - 1.0).abs() < 1e-9);
}

#[test]
fn width_and_amplitude_split_the_wire_constants() {
    let mode = first();
    let with = |tp: f64, tm: f64| {
        let inputs = CellInputs { tau_plus: tp, tau_minus: tm, ..disk_inputs(0.2) };
        circle_report(&mode, inputs, z2()).unwrap()
    };
    // The exterior forcing carries one τ₊, which cancels in |A|.
    let (a, b) = (with(0.05, 0.08), with(0.11, 0.08));
    assert!((a.amplitude - b.amplitude).abs() < 1e-12 * a.amplitude);
    // The width carries τ₋ once, the amplitude once inversely.
    let (a, b) = (with(0.05, 0.08), with(0.05, 0.13));
    assert!((a.a * a.amplitude - b.a * b.amplitude).abs() < 1e-12 * (a.a * a.amplitude).abs());
}

#[test]
fn thin_wire_peak_sits_at_the_shifted_resonance() {
    let (m, delta) = (30, 0.01);
    let eps = 2.0 * PI / m as f64;
    let mode = first();
    let sigma = dirichlet_constants(WireShape::Disk, delta, &CellOptions::default()).unwrap().sigma_minus;
    let b = mode_integrals_basic(&mode);
    let predicted = mode.k_star + eps * first_order_shift(sigma, &mode, b.i1, b.i2).unwrap();
    let alpha = alpha_of(delta, 0.0, eps).unwrap();
    let f = |k: f64| helmholtz_thin_interior(k, z2(), alpha).unwrap().value_at_origin().norm();
    let (k_peak, _) = locate_peak(f, 2.0, 2.4, 81, 1e-9);
    assert!((k_peak - predicted).abs() < 2.0 * eps * eps);
}

#[test]
fn neumann_shift() {
    let mode = ModeSpec::circle_neumann(0, 1).unwrap();
    assert!((mode.k_star - 3.831_705_970_207_512).abs() < 1e-12);
    let b = mode_integrals_basic(&mode);
    let ratio = b.i2 / (4.0 * mode.k_star * b.i1);
    for tol in [1e-9, 1e-11] {
        let q = mode_integrals_quadrature(&mode, tol).unwrap();
        assert!((q.i2 / (4.0 * mode.k_star * q.i1) - ratio).abs() < 1e-6);
    }
    let r = neumann_resonance(&mode, 20.0).unwrap();
    assert!((r.shift - ratio / 20.0).abs() < 1e-15);
    assert!(!r.regime_warning);
    assert!(neumann_resonance(&mode, 1e15).unwrap().shift < 1e-14);
    assert!(neumann_resonance(&mode, 2.0).unwrap().regime_warning);
    assert!(neumann_resonance(&first(), 20.0).is_err());
    let found: Vec<_> = find_neumann_resonances(3.0, 4.0).unwrap().iter().map(|m| m.indices).collect();
    assert_eq!(found, vec![(2, 1), (0, 1)]);
}

#[test]
fn nearly_closed_tangential_shell_grows_logarithmically() {
    let mode = ModeSpec::circle_neumann(0, 1).unwrap();
    let eps = 0.1;
    let scale = |gap: f64| {
        let el = eps / PI * (1.0 / (PI * gap)).ln();
        neumann_resonance(&mode, el).unwrap().peak_scale
    };
    let steps: Vec<f64> = [1e-2, 1e-4, 1e-6, 1e-8].windows(2).map(|w| scale(w[1]) - scale(w[0])).collect();
    for s in &steps {
        assert!((s - steps[0]).abs() < 1e-12);
        assert!(*s > 0.0);
    }
    assert!(tangential_shell_eps_lambda(1.0, 1.0, eps) > 0.0);
}
