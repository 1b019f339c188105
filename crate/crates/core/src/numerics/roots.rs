//! Scalar root finding, maximization and Bessel zeros.

use crate::error::{Error, Result};
use crate::numerics::bessel::j_seq;

/// Brent's method on a sign-changing bracket [a, b].
pub fn brent(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Domain(format!("no sign change on [{a}, {b}]")));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::NoConvergence("Brent iteration limit".into()))
}

/// Every sign change of `f` on [lo, hi] scanned with step `h`, refined by Brent.
pub fn all_roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, h: f64, tol: f64) -> Result<Vec<f64>> {
    let mut roots = Vec::new();
    let n = ((hi - lo) / h).ceil().max(1.0) as usize;
    let step = (hi - lo) / n as f64;
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=n {
        let x1 = lo + i as f64 * step;
        let f1 = f(x1);
        if f0 == 0.0 {
            roots.push(x0);
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            roots.push(brent(&f, x0, x1, tol)?);
        }
        x0 = x1;
        f0 = f1;
    }
    if f0 == 0.0 {
        roots.push(x0);
    }
    Ok(roots)
}

/// Golden-section maximization of a unimodal `f` on [a, b].
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
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

/// Positive zeros of J_m in (lo, hi], ascending.
pub fn bessel_j_zeros(m: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let lo = lo.max(1e-3);
    if hi <= lo {
        return Ok(Vec::new());
    }
    all_roots(|x| j_m(m, x), lo, hi, 0.1, 1e-15)
}

/// Positive zeros of J_m' in (lo, hi], ascending (x = 0 excluded).
pub fn bessel_jp_zeros(m: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let lo = lo.max(1e-3);
    if hi <= lo {
        return Ok(Vec::new());
    }
    all_roots(|x| jp_m(m, x), lo, hi, 0.1, 1e-15)
}

/// The q-th (1-based) positive zero of J_m.
pub fn bessel_j_zero(m: usize, q: usize) -> Result<f64> {
    let hi = (m as f64) + (q as f64 + 2.0) * std::f64::consts::PI + 2.0;
    let z = bessel_j_zeros(m, 0.0, hi)?;
    z.get(q - 1).copied().ok_or_else(|| Error::NoConvergence("Bessel zero not bracketed".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_max(|x| -(x - 0.3).powi(2) + 1.0, -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn first_zeros() {
        assert!((bessel_j_zero(0, 1).unwrap() - 2.404_825_557_695_773).abs() < 1e-12);
        assert!((bessel_j_zero(1, 1).unwrap() - 3.831_705_970_207_512).abs() < 1e-12);
        assert!((bessel_j_zero(2, 1).unwrap() - 5.135_622_301_840_683).abs() < 1e-12);
        assert!((bessel_j_zero(0, 2).unwrap() - 5.520_078_110_286_311).abs() < 1e-12);
        let jp = bessel_jp_zeros(0, 0.0, 5.0).unwrap();
        assert_eq!(jp.len(), 1);
        assert!((jp[0] - 3.831_705_970_207_512).abs() < 1e-12);
    }
}
