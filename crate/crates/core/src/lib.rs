//! Shielding and resonance of two-dimensional wire cages.
//!
//! Modules, bottom up: [`numerics`] kernels, [`geometry`] of the cage,
//! [`cellsolve`] boundary-layer constants, the [`homogenized`] circle-cage
//! series, the [`discrete`] multipole reference solver, and [`resonance`]
//! shift/width/amplitude predictions. [`acceptance`] bundles the
//! end-to-end checks used by `cagecalc selftest`.

pub mod error;
pub mod cellsolve;
pub mod geometry;
pub mod homogenized;
pub mod acceptance;
pub mod discrete;
pub mod numerics;
pub mod resonance;

pub use error::{Error, Result};
