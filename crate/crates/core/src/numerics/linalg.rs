//! Dense least squares (Householder QR with column pivoting) and a banded
//! Cholesky solver for the strip finite-volume systems.

use num_complex::Complex64;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};

/// Real or complex field element.
pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + 'static
{
    fn zero() -> Self;
    fn from_f64(x: f64) -> Self;
    fn conj(self) -> Self;
    fn abs2(self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn abs(self) -> f64 {
        self.abs2().sqrt()
    }
    /// Unit-modulus phase of `self` (1 for zero).
    fn phase(self) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
    fn abs2(self) -> f64 {
        self * self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn phase(self) -> Self {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn abs2(self) -> f64 {
        self.norm_sqr()
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn phase(self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            self / n
        }
    }
}

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.data[j * rows + i] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[j * self.rows + i] = v;
    }

    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.rows];
        for (j, &xj) in x.iter().enumerate() {
            for (yi, &a) in y.iter_mut().zip(self.col(j)) {
                *yi += a * xj;
            }
        }
        y
    }

    /// Aᴴ y.
    pub fn adjoint_mul_vec(&self, y: &[T]) -> Vec<T> {
        (0..self.cols)
            .map(|j| {
                let mut s = T::zero();
                for (a, &yi) in self.col(j).iter().zip(y) {
                    s += a.conj() * yi;
                }
                s
            })
            .collect()
    }
}

/// Least-squares solution with diagnostics.
#[derive(Debug, Clone)]
pub struct LstsqSolution<T> {
    pub x: Vec<T>,
    pub residual_norm: f64,
    /// Ratio of the largest to smallest diagonal of R after column scaling.
    pub cond_estimate: f64,
}

fn norm<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(|a| a.abs2()).sum::<f64>().sqrt()
}

/// Householder QR factorization with column pivoting, reusable for several
/// right-hand sides.
#[derive(Debug, Clone)]
pub struct QrFactor<T> {
    qr: Matrix<T>,
    /// Householder vectors are stored below the diagonal; `beta[k]` = 2/(vᴴv).
    beta: Vec<f64>,
    diag: Vec<T>,
    perm: Vec<usize>,
    col_scale: Vec<f64>,
    pub rank: usize,
    pub cond_estimate: f64,
}

impl<T: Scalar> QrFactor<T> {
    /// Factor `a` (rows ≥ cols). Columns are scaled to unit norm first.
    /// Columns whose pivot falls below `rcond` times the first pivot count
    /// toward rank deficiency.
    pub fn new(a: &Matrix<T>, rcond: f64) -> Result<Self> {
        let (m, n) = (a.rows, a.cols);
        if m < n {
            return Err(Error::Domain(format!("lstsq needs rows >= cols, got {m}x{n}")));
        }
        let mut qr = a.clone();
        let mut col_scale = vec![1.0; n];
        for (j, s) in col_scale.iter_mut().enumerate() {
            let c = norm(qr.col(j));
            if c > 0.0 {
                *s = 1.0 / c;
                for v in qr.col_mut(j) {
                    *v = v.scale(1.0 / c);
                }
            }
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut beta = vec![0.0; n];
        let mut diag = vec![T::zero(); n];
        let mut colnorm: Vec<f64> = (0..n).map(|j| norm(qr.col(j)).powi(2)).collect();
        let mut rank = n;
        let mut first = 0.0;
        let mut last = 0.0;
        for k in 0..n {
            // Pivot on the largest remaining column norm; recompute exactly
            // every step so the estimate never drifts.
            let mut best = k;
            for j in k..n {
                colnorm[j] = qr.col(j)[k..].iter().map(|a| a.abs2()).sum();
                if colnorm[j] > colnorm[best] {
                    best = j;
                }
            }
            if best != k {
                for i in 0..m {
                    let t = qr.data[k * m + i];
                    qr.data[k * m + i] = qr.data[best * m + i];
                    qr.data[best * m + i] = t;
                }
                perm.swap(k, best);
                colnorm.swap(k, best);
            }
            let xnorm = colnorm[k].sqrt();
            if k == 0 {
                first = xnorm;
            }
            if xnorm <= rcond * first || xnorm == 0.0 {
                rank = rank.min(k);
            }
            let x0 = qr.data[k * m + k];
            let alpha = -(x0.phase()).scale(xnorm);
            // v = x - alpha e1, stored in place.
            qr.data[k * m + k] = x0 - alpha;
            let vnorm2: f64 = qr.col(k)[k..].iter().map(|a| a.abs2()).sum();
            beta[k] = if vnorm2 > 0.0 { 2.0 / vnorm2 } else { 0.0 };
            diag[k] = alpha;
            last = xnorm;
            let (head, tail) = qr.data.split_at_mut((k + 1) * m);
            let v = &head[k * m + k..(k + 1) * m];
            for j in 0..(n - k - 1) {
                let col = &mut tail[j * m + k..(j + 1) * m];
                let mut s = T::zero();
                for (vi, ci) in v.iter().zip(col.iter()) {
                    s += vi.conj() * *ci;
                }
                let s = s.scale(beta[k]);
                for (vi, ci) in v.iter().zip(col.iter_mut()) {
                    *ci -= *vi * s;
                }
            }
        }
        let cond_estimate = if last > 0.0 { first / last } else { f64::INFINITY };
        Ok(Self { qr, beta, diag, perm, col_scale, rank, cond_estimate })
    }

    /// Qᴴ b in place.
    fn apply_qh(&self, b: &mut [T]) {
        let m = self.qr.rows;
        for k in 0..self.qr.cols {
            let v = &self.qr.col(k)[k..];
            let mut s = T::zero();
            for (vi, bi) in v.iter().zip(&b[k..]) {
                s += vi.conj() * *bi;
            }
            let s = s.scale(self.beta[k]);
            for (vi, bi) in v.iter().zip(b[k..m].iter_mut()) {
                *bi -= *vi * s;
            }
        }
    }

    pub fn solve(&self, b: &[T]) -> Result<LstsqSolution<T>> {
        let n = self.qr.cols;
        if self.rank < n {
            return Err(Error::RankDeficient { rank: self.rank, cols: n });
        }
        let mut y = b.to_vec();
        self.apply_qh(&mut y);
        let residual_norm = norm(&y[n..]);
        let mut z = vec![T::zero(); n];
        for k in (0..n).rev() {
            let mut s = y[k];
            for j in k + 1..n {
                s -= self.qr.get(k, j) * z[j];
            }
            z[k] = s / self.diag[k];
        }
        let mut x = vec![T::zero(); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = z[k].scale(self.col_scale[p]);
        }
        Ok(LstsqSolution { x, residual_norm, cond_estimate: self.cond_estimate })
    }
}

/// Minimize ‖Ax − b‖₂. Rank deficiency (relative pivot below 1e-13) is an error.
pub fn lstsq<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<LstsqSolution<T>> {
    QrFactor::new(a, 1e-13)?.solve(b)
}

/// Symmetric positive definite banded matrix, lower band stored by rows:
/// `band[i * (w + 1) + (w - d)]` holds A[i][i - d] for d = 0..=w.
#[derive(Debug, Clone)]
pub struct BandedSpd {
    n: usize,
    w: usize,
    band: Vec<f64>,
}

impl BandedSpd {
    pub fn zeros(n: usize, w: usize) -> Self {
        Self { n, w, band: vec![0.0; n * (w + 1)] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Add `v` to A[i][j] (and implicitly A[j][i]); requires |i - j| ≤ w.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let d = r - c;
        assert!(d <= self.w, "entry outside band");
        self.band[r * (self.w + 1) + (self.w - d)] += v;
    }

    /// In-place Cholesky factorization A = LLᵀ.
    pub fn factor(mut self) -> Result<BandedCholesky> {
        let (n, w) = (self.n, self.w);
        let ld = w + 1;
        for i in 0..n {
            let j0 = i.saturating_sub(w);
            for j in j0..=i {
                let mut s = self.band[i * ld + (w - (i - j))];
                let k0 = j0.max(j.saturating_sub(w));
                for k in k0..j {
                    s -= self.band[i * ld + (w - (i - k))] * self.band[j * ld + (w - (j - k))];
                }
                if i == j {
                    if s <= 0.0 {
                        return Err(Error::Domain("banded matrix is not positive definite".into()));
                    }
                    self.band[i * ld + w] = s.sqrt();
                } else {
                    self.band[i * ld + (w - (i - j))] = s / self.band[j * ld + w];
                }
            }
        }
        Ok(BandedCholesky { n, w, l: self.band })
    }
}

#[derive(Debug, Clone)]
pub struct BandedCholesky {
    n: usize,
    w: usize,
    l: Vec<f64>,
}

impl BandedCholesky {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, w) = (self.n, self.w);
        let ld = w + 1;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(w)..i {
                s -= self.l[i * ld + (w - (i - k))] * y[k];
            }
            y[i] = s / self.l[i * ld + w];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..(i + w + 1).min(n) {
                s -= self.l[k * ld + (w - (k - i))] * y[k];
            }
            y[i] = s / self.l[i * ld + w];
        }
        y
    }
}
