//! Finite-scale Lyapunov exponent machinery for analytic quasi-periodic
//! `M(2, C)` cocycles over `T^d`.
//!
//! The crate is `no_std` (it needs `alloc`). Transcendental functions come from
//! [`libm`], so results do not depend on the platform math library. The
//! `parallel` feature spreads grid evaluations over a rayon pool; every grid
//! mean is reduced with a fixed-shape pairwise tree, so results are bitwise
//! identical for any worker count.
//!
//! Module map:
//!
//! - [`torus`]: torus points, shifts, quadrature grids, Diophantine scans.
//! - [`cocycle`]: 2x2 complex matrices, trigonometric-polynomial cocycles,
//!   strip norms, renormalization, determinant sublevel sets.
//! - [`lyapunov`]: rescaled transfer products, finite-scale exponents, large
//!   deviation measurements, avalanche-principle residuals, induction
//!   schedules and dyadic convergence probes.
//! - [`jacobi`]: truncated Jacobi operators, Sturm counts, IDS, Thouless
//!   cross-checks.
//! - [`continuity`]: weak-Hölder sweeps in cocycle and frequency.
//! - [`fit`]: least-squares helpers shared by the measurements.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cocycle;
pub mod continuity;
mod error;
pub mod fit;
pub mod jacobi;
pub mod lyapunov;
pub mod reduce;
pub mod torus;

pub use error::{Error, Result};

pub use cocycle::{AnalyticCocycle, Mat2C, TrigPoly};
pub use jacobi::{JacobiFamily, TruncatedOperator};
pub use lyapunov::{LyapunovRecord, TransferProduct};
pub use torus::{Frequency, TorusGrid, TorusPoint};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
