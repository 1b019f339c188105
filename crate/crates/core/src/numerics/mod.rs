//! Shared numerical kernels.

pub mod bessel;
pub mod linalg;
pub mod quad;
pub mod roots;

pub use bessel::{bessel_j, bessel_j_d, bessel_y, bessel_y_d, hankel1, hankel1_d};
pub use linalg::{lstsq, LstsqSolution, Matrix, QrFactor, Scalar};
pub use quad::{gauss_legendre, quad_1d, quad_disk, trapezoid_periodic};
pub use roots::{bessel_j_zero, bessel_j_zeros, bessel_jp_zeros, brent, golden_max};

/// Complex field value.
pub type ComplexAmplitude = num_complex::Complex64;
