//! Pointwise avalanche-principle residuals.

use alloc::format;
use alloc::vec::Vec;

use super::product::ProductKernel;
use crate::cocycle::AnalyticCocycle;
use crate::error::{Error, Result};
use crate::reduce::pairwise_mean;
use crate::torus::{Frequency, TorusPoint};

/// Stand-in for the absolute constant in the residual bound.
pub const AP_CONSTANT: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApCheck {
    pub residual: f64,
    pub bound: f64,
    pub hypotheses_met: bool,
    /// `L_N(x)`; the hypotheses use `delta = l_n / 2`.
    pub l_n: f64,
    pub l_2n: f64,
    /// `max_{j <= N1/N, m in {N, 2N}} |L_m(x) - L_m(x + j N omega)|`.
    pub max_shift_deviation: f64,
    /// Some product hit the log clamp.
    pub clamped: bool,
}

impl ApCheck {
    pub fn within_bound(&self) -> bool {
        self.residual <= self.bound
    }
}

/// `|L_{N1}(x) + (1/n) sum_j L_N(x + jN omega) - (2/n) sum_j L_{2N}(x + jN omega)|`
/// with `n = N1 / N`, against `exp(-N L_N(x) / 4) + C L_N(x) N / N1`.
///
/// Hypotheses, with `delta = L_N(x) / 2`: `L_N(x) > delta` (so `L_N(x) > 0`),
/// `N delta > 2`, `|L_N(x) - L_2N(x)| < L_N(x) / 100`, and the shifted values
/// at both scales stay within `delta / 100` of those at `x` for `j <= n`.
pub fn ap_residual(
    a: &AnalyticCocycle,
    omega: &Frequency,
    x: &TorusPoint,
    n: usize,
    n1: usize,
) -> Result<ApCheck> {
    if n == 0 || n1 < n {
        return Err(Error::InvalidParameter(format!("need 1 <= N <= N1, got N={n}, N1={n1}")));
    }
    if n1 % n != 0 {
        return Err(Error::Divisibility { n, n1 });
    }
    let mut kernel = ProductKernel::new(a, omega)?;
    let xs = x.coords();
    let blocks = n1 / n;
    let top = kernel.point_value(xs, 0, n1)?;
    let l_n1 = top.l;
    let mut clamped = top.clamped;
    let mut at_n = Vec::with_capacity(blocks + 1);
    let mut at_2n = Vec::with_capacity(blocks + 1);
    for j in 0..=blocks {
        let off = (j * n) as u64;
        let p = kernel.point_value(xs, off, n)?;
        let q = kernel.point_value(xs, off, 2 * n)?;
        clamped |= p.clamped || q.clamped;
        at_n.push(p.l);
        at_2n.push(q.l);
    }
    let l_n = at_n[0];
    let l_2n = at_2n[0];
    let mut max_dev: f64 = 0.0;
    for j in 1..=blocks {
        max_dev = max_dev.max(libm::fabs(l_n - at_n[j])).max(libm::fabs(l_2n - at_2n[j]));
    }
    let delta = 0.5 * l_n;
    let hypotheses_met = l_n > 0.0
        && (n as f64) * delta > 2.0
        && libm::fabs(l_n - l_2n) < l_n / 100.0
        && max_dev < delta / 100.0;
    let residual = libm::fabs(l_n1 + pairwise_mean(&at_n[..blocks]) - 2.0 * pairwise_mean(&at_2n[..blocks]));
    let bound = libm::exp(-(n as f64) * l_n / 4.0) + AP_CONSTANT * l_n * (n as f64) / (n1 as f64);
    Ok(ApCheck { residual, bound, hypotheses_met, l_n, l_2n, max_shift_deviation: max_dev, clamped })
}
