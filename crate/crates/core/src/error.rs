use thiserror::Error;

/// Failure modes shared by every solver in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument outside the function domain: {0}")]
    Domain(String),
    #[error("matrix is rank deficient: effective rank {rank} of {cols}")]
    RankDeficient { rank: usize, cols: usize },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("wires overlap: delta {delta} >= delta_max {delta_max}")]
    WireOverlap { delta: f64, delta_max: f64 },
    #[error("invalid wire count {0}; need at least 3")]
    InvalidCount(usize),
    #[error("point is outside the reach of the curvilinear map")]
    OutOfReach,
    #[error("invalid homogenization regime (delta_inf = {delta_inf})")]
    InvalidRegime { delta_inf: f64 },
    #[error("k = {k} is near resonance: J_{m} vanishes at {k_zero}")]
    NearResonance { k: f64, m: usize, k_zero: f64 },
    #[error("least-squares system is ill-conditioned (estimate {cond:e})")]
    IllConditioned { cond: f64 },
    #[error("basis underflow: k r = {kr:e} is too small")]
    NearSingularBasis { kr: f64 },
    #[error("point lies inside wire {0}")]
    InsideWire(usize),
    #[error("mode is degenerate; second-order analysis needs a simple eigenvalue")]
    DegenerateMode,
    #[error("radiative damping vanishes (Im I4 = 0)")]
    ZeroDamping,
    #[error("not implemented: {0}")]
    NotImplemented(String),
    #[error("far-field window too close to the wire (residual {residual:e})")]
    WindowTooClose { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
