//! Dyadic telescoping probe for the rate of convergence of `L_N`.

use alloc::vec::Vec;

use super::exponent::finite_le;
use crate::cocycle::AnalyticCocycle;
use crate::error::{Error, Result};
use crate::torus::{Frequency, TorusGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub n0: usize,
    /// `L_{2^j N0}` for the scales that were computed.
    pub values: Vec<(usize, f64)>,
    /// `(N, |L_N + L_{N0} - 2 L_{2 N0}|)` for `N = 2^j N0`.
    pub deviations: Vec<(usize, f64)>,
    /// Suffix maxima of the deviations: a non-increasing envelope.
    pub envelope: Vec<f64>,
    /// The work budget stopped the probe before `depth`.
    pub ceiling_hit: bool,
    pub max_clamp_fraction: f64,
}

/// Telescoped deviations at `N = 2^j N0`, `j = 0..=depth`, on one grid.
///
/// `work_budget` caps the summed `N * grid.len()` factor evaluations; scales
/// that would exceed it are skipped and flagged. At least `N0` and `2 N0` must fit.
pub fn convergence_probe(
    a: &AnalyticCocycle,
    omega: &Frequency,
    n0: usize,
    depth: u32,
    grid: &TorusGrid,
    work_budget: Option<u128>,
) -> Result<ProbeReport> {
    if n0 == 0 {
        return Err(Error::InvalidParameter("N0 must be >= 1".into()));
    }
    let budget = work_budget.unwrap_or(u128::MAX);
    let top = depth.max(1);
    let mut work: u128 = 0;
    let mut values = Vec::new();
    let mut ceiling_hit = false;
    let mut max_clamp: f64 = 0.0;
    for j in 0..=top {
        let n = n0.checked_shl(j).filter(|v| v >> j == n0);
        let Some(n) = n else {
            ceiling_hit = true;
            break;
        };
        let step = n as u128 * grid.len() as u128;
        if work.saturating_add(step) > budget {
            if j <= 1 {
                return Err(Error::WorkBudgetExceeded { work: work.saturating_add(step), budget });
            }
            ceiling_hit = true;
            break;
        }
        work += step;
        let r = finite_le(a, omega, n, grid)?;
        max_clamp = max_clamp.max(r.clamp_fraction);
        values.push((n, r.l));
    }
    let l0 = values[0].1;
    let l1 = values[1].1;
    let deviations: Vec<(usize, f64)> = values
        .iter()
        .take(depth as usize + 1)
        .map(|&(n, l)| (n, libm::fabs(l + l0 - 2.0 * l1)))
        .collect();
    let mut envelope = alloc::vec![0.0; deviations.len()];
    let mut run: f64 = 0.0;
    for i in (0..deviations.len()).rev() {
        run = run.max(deviations[i].1);
        envelope[i] = run;
    }
    Ok(ProbeReport { n0, values, deviations, envelope, ceiling_hit, max_clamp_fraction: max_clamp })
}
