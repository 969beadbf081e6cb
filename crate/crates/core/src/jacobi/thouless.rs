//! Thouless-formula cross-check of the transfer-matrix exponent.

use alloc::vec;
use alloc::vec::Vec;

use super::{JacobiFamily, TruncatedOperator};
use crate::error::{Error, Result};
use crate::lyapunov::{finite_le, LyapunovRecord, LOG_CLAMP};
use crate::reduce::{map_indices, pairwise_mean, pairwise_sum};
use crate::torus::{TorusGrid, TorusPoint};

/// `ln |E - E_j|` terms are clamped at `ln(1e-9)`.
pub const THOULESS_CLAMP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ThoulessCheck {
    pub energy: f64,
    pub n: usize,
    pub grid_m: usize,
    /// `L_N` of the transfer cocycle at energy `E`.
    pub l_transfer: f64,
    /// `(1/(2N+1)) sum_j ln |E - E_j| - mean ln |a|`.
    pub l_thouless: f64,
    /// Same quantity from the LDL* pivots of `T - E`.
    pub l_pivot: f64,
    pub gap: f64,
    /// Number of eigenvalues within `1e-9` of `E`.
    pub clamped_terms: usize,
    /// Distance from `E` to the nearest truncation eigenvalue.
    pub min_distance: f64,
    pub record: LyapunovRecord,
}

/// Truncation at `x = 0` with its eigenvalues, reusable across energies.
#[derive(Debug, Clone)]
pub struct ThoulessProbe<'a> {
    family: &'a JacobiFamily,
    n: usize,
    operator: TruncatedOperator,
    eigenvalues: Vec<f64>,
}

impl<'a> ThoulessProbe<'a> {
    pub fn new(family: &'a JacobiFamily, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("Thouless check needs N >= 1".into()));
        }
        let operator = family.truncate(&TorusPoint::origin(family.dimension()), n)?;
        let eigenvalues = operator.eigenvalues();
        Ok(ThoulessProbe { family, n, operator, eigenvalues })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn operator(&self) -> &TruncatedOperator {
        &self.operator
    }

    /// Distance from `E` to the nearest eigenvalue.
    pub fn distance_to_spectrum(&self, energy: f64) -> f64 {
        let i = self.eigenvalues.partition_point(|&e| e < energy);
        let mut best = f64::INFINITY;
        if i < self.eigenvalues.len() {
            best = best.min(self.eigenvalues[i] - energy);
        }
        if i > 0 {
            best = best.min(energy - self.eigenvalues[i - 1]);
        }
        best
    }

    pub fn check(&self, energy: f64, grid: &TorusGrid) -> Result<ThoulessCheck> {
        let size = self.operator.size() as f64;
        let floor = libm::log(THOULESS_CLAMP);
        let mut clamped = 0;
        let terms: Vec<f64> = self
            .eigenvalues
            .iter()
            .map(|&e| {
                let l = libm::log(libm::fabs(energy - e));
                if l >= floor {
                    l
                } else {
                    clamped += 1;
                    floor
                }
            })
            .collect();
        let log_a = log_abs_a_mean(self.family, grid)?;
        let l_thouless = pairwise_sum(&terms) / size - log_a;
        let l_pivot = self.operator.log_abs_det_shifted(energy) / size - log_a;
        let record = finite_le(&self.family.cocycle(energy)?, self.family.omega(), self.n, grid)?;
        Ok(ThoulessCheck {
            energy,
            n: self.n,
            grid_m: grid.points_per_dim(),
            l_transfer: record.l,
            l_thouless,
            l_pivot,
            gap: libm::fabs(record.l - l_thouless),
            clamped_terms: clamped,
            min_distance: self.distance_to_spectrum(energy),
            record,
        })
    }
}

/// One-shot form of [`ThoulessProbe::check`].
pub fn thouless_check(family: &JacobiFamily, energy: f64, n: usize, grid: &TorusGrid) -> Result<ThoulessCheck> {
    ThoulessProbe::new(family, n)?.check(energy, grid)
}

fn log_abs_a_mean(family: &JacobiFamily, grid: &TorusGrid) -> Result<f64> {
    if grid.dimension() != family.dimension() {
        return Err(Error::DimensionMismatch { expected: family.dimension(), got: grid.dimension() });
    }
    let d = grid.dimension();
    let vals = map_indices(grid.len(), |i| {
        let mut x = vec![0.0; d];
        grid.node_into(i, &mut x);
        libm::log(family.a().evaluate_real(&x).norm()).max(-LOG_CLAMP)
    });
    Ok(pairwise_mean(&vals))
}
