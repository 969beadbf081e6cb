//! Grid averages: `L'_N`, `(1/2) int ln |det A|`, and `L_N = L'_N - (1/2) int ln |det A|`.

use alloc::vec;
use alloc::vec::Vec;

use super::product::{PointValue, ProductKernel, LOG_CLAMP};
use crate::cocycle::AnalyticCocycle;
use crate::error::{Error, Result};
use crate::reduce::{map_indices, pairwise_mean};
use crate::torus::{Frequency, TorusGrid};

/// Clamped fraction above which a record carries a quality warning.
pub const CLAMP_WARNING_FRACTION: f64 = 0.01;

/// Clamped fraction above which `ln |det|` quadrature is refused.
pub const LOG_DET_CLAMP_LIMIT: f64 = 0.05;

/// Finite-scale exponents of one cocycle at one scale on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovRecord {
    pub n: usize,
    /// `L'_N`: grid mean of `(1/N) ln ||A_N(x)||`.
    pub l_prime: f64,
    /// `(1/2)` grid mean of `ln |det A(x)|`.
    pub log_det_half: f64,
    /// `L_N = l_prime - log_det_half`.
    pub l: f64,
    pub grid_m: usize,
    pub clamp_fraction: f64,
    pub clamp_threshold: f64,
    pub warning: Option<QualityWarning>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QualityWarning {
    /// More than 1% of nodes hit the log clamp.
    ClampFraction(f64),
}

/// Pointwise values at every grid node, in node order.
pub fn pointwise_grid(
    a: &AnalyticCocycle,
    omega: &Frequency,
    n: usize,
    grid: &TorusGrid,
) -> Result<Vec<PointValue>> {
    pointwise_grid_slice(a, omega.omega(), n, grid)
}

fn pointwise_grid_slice(
    a: &AnalyticCocycle,
    omega: &[f64],
    n: usize,
    grid: &TorusGrid,
) -> Result<Vec<PointValue>> {
    if grid.dimension() != a.dimension() {
        return Err(Error::DimensionMismatch { expected: a.dimension(), got: grid.dimension() });
    }
    // validates n and dimensions once before fanning out
    ProductKernel::from_slice(a, omega)?.point_value(&vec![0.0; a.dimension()], 0, n)?;
    let d = grid.dimension();
    let values: Vec<Result<PointValue>> = map_indices(grid.len(), |i| {
        let mut kernel = ProductKernel::from_slice(a, omega)?;
        let mut x = vec![0.0; d];
        grid.node_into(i, &mut x);
        kernel.point_value(&x, 0, n)
    });
    values.into_iter().collect()
}

/// `(1/2)` grid mean of `ln |det A(x)|`, values below `exp(-T)` clamped at `-T`.
///
/// Fails when more than 5% of the nodes are clamped.
pub fn log_det_integral(a: &AnalyticCocycle, grid: &TorusGrid) -> Result<f64> {
    if grid.dimension() != a.dimension() {
        return Err(Error::DimensionMismatch { expected: a.dimension(), got: grid.dimension() });
    }
    let d = grid.dimension();
    let logs: Vec<(f64, bool)> = map_indices(grid.len(), |i| {
        let mut x = vec![0.0; d];
        grid.node_into(i, &mut x);
        let l = libm::log(a.evaluate_real(&x).det().norm());
        if l >= -LOG_CLAMP {
            (l, false)
        } else {
            (-LOG_CLAMP, true)
        }
    });
    let clamped = logs.iter().filter(|p| p.1).count() as f64 / logs.len() as f64;
    if clamped > LOG_DET_CLAMP_LIMIT {
        return Err(Error::SingularQuadrature { clamped_fraction: clamped });
    }
    let vals: Vec<f64> = logs.iter().map(|p| p.0).collect();
    Ok(0.5 * pairwise_mean(&vals))
}

/// `L'_N`, `L_N` and clamp diagnostics on `grid`.
pub fn finite_le(a: &AnalyticCocycle, omega: &Frequency, n: usize, grid: &TorusGrid) -> Result<LyapunovRecord> {
    finite_le_slice(a, omega.omega(), n, grid)
}

fn finite_le_slice(
    a: &AnalyticCocycle,
    omega: &[f64],
    n: usize,
    grid: &TorusGrid,
) -> Result<LyapunovRecord> {
    let points = pointwise_grid_slice(a, omega, n, grid)?;
    let lp: Vec<f64> = points.iter().map(|p| p.l_prime).collect();
    let clamp_fraction = points.iter().filter(|p| p.clamped).count() as f64 / points.len() as f64;
    let l_prime = pairwise_mean(&lp);
    let log_det_half = log_det_integral(a, grid)?;
    let warning = (clamp_fraction > CLAMP_WARNING_FRACTION).then_some(QualityWarning::ClampFraction(clamp_fraction));
    Ok(LyapunovRecord {
        n,
        l_prime,
        log_det_half,
        l: l_prime - log_det_half,
        grid_m: grid.points_per_dim(),
        clamp_fraction,
        clamp_threshold: LOG_CLAMP,
        warning,
    })
}
