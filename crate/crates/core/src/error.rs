use alloc::string::String;
use alloc::vec::Vec;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("lattice scan of {points} points exceeds budget {budget}")]
    LatticeBudgetExceeded { points: u128, budget: u128 },

    #[error("work estimate {work} exceeds budget {budget}")]
    WorkBudgetExceeded { work: u128, budget: u128 },

    #[error("grid of {points_per_dim} points per dimension is below the resolution floor {required}")]
    Resolution { points_per_dim: usize, required: usize },

    #[error("determinant vanishes at the evaluation point (|det| = {det_abs:e})")]
    SingularPoint { det_abs: f64 },

    #[error("determinant is identically zero")]
    IdenticallySingular,

    #[error("no zeros detected: every sublevel measure is zero")]
    NoZerosDetected,

    #[error("transfer product vanished exactly at step {step}")]
    ZeroProduct { step: usize },

    #[error("{clamped_fraction:.4} of the quadrature nodes hit the log clamp; refine the grid")]
    SingularQuadrature { clamped_fraction: f64 },

    #[error("scale {n} does not divide {n1}")]
    Divisibility { n: usize, n1: usize },

    #[error("infeasible schedule at stage {stage}: {inequality}")]
    InfeasibleSchedule { stage: usize, inequality: String },

    #[error("not enough usable points for a fit ({usable} < {required})")]
    DegenerateFit { usable: usize, required: usize },

    #[error("frequency violates the Diophantine condition at k = {k:?}")]
    NotDiophantine { k: Vec<i64> },

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = core::result::Result<T, Error>;
