//! Empirical large-deviation measurements.

use alloc::vec::Vec;

use super::exponent::pointwise_grid;
use crate::cocycle::AnalyticCocycle;
use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::reduce::pairwise_mean;
use crate::torus::{Frequency, TorusGrid};

/// Fraction of grid nodes where `|L_N(x) - L_N| > epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct LdtReport {
    pub n: usize,
    pub epsilon: f64,
    /// Scale of the Diophantine window the measurement is paired with.
    pub k0: Option<u32>,
    pub measure: f64,
    /// Grid mean `L_N` the deviations are measured from.
    pub mean: f64,
    /// `exp(-C_fit K0^c_fit)` once a fit is available.
    pub bound: Option<f64>,
    pub clamp_fraction: f64,
}

/// Regression `ln(-ln measure) = ln C_fit + c_fit ln K0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdtFit {
    pub c_const: f64,
    pub c_exp: f64,
    pub residual: f64,
    pub points: usize,
}

impl LdtFit {
    pub fn bound(&self, k0: u32) -> f64 {
        libm::exp(-self.c_const * libm::pow(k0 as f64, self.c_exp))
    }
}

pub fn ldt_empirical(
    a: &AnalyticCocycle,
    omega: &Frequency,
    n: usize,
    epsilon: f64,
    k0: Option<u32>,
    grid: &TorusGrid,
) -> Result<LdtReport> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidParameter("epsilon must be non-negative".into()));
    }
    let points = pointwise_grid(a, omega, n, grid)?;
    let values: Vec<f64> = points.iter().map(|p| p.l).collect();
    let mean = pairwise_mean(&values);
    let hits = values.iter().filter(|&&v| libm::fabs(v - mean) > epsilon).count();
    let total = values.len() as f64;
    let clamp_fraction = points.iter().filter(|p| p.clamped).count() as f64 / total;
    Ok(LdtReport { n, epsilon, k0, measure: hits as f64 / total, mean, bound: None, clamp_fraction })
}

/// Largest `K <= k_max` with `K / delta0(K) < N`, if any.
pub fn ldt_k0(omega: &Frequency, n: usize, k_max: u32) -> Result<Option<u32>> {
    let mut best = None;
    for k in 1..=k_max {
        let d = omega.delta0(k)?;
        if d > 0.0 && (k as f64) / d < n as f64 {
            best = Some(k);
        }
    }
    Ok(best)
}

/// Fits `(C_fit, c_fit)` over reports carrying `k0` and a measure in `(0, 1)`,
/// and fills in their `bound`.
pub fn fit_ldt(reports: &mut [LdtReport]) -> Option<LdtFit> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for r in reports.iter() {
        if let Some(k) = r.k0 {
            if k > 0 && r.measure > 0.0 && r.measure < 1.0 {
                x.push(libm::log(k as f64));
                y.push(libm::log(-libm::log(r.measure)));
            }
        }
    }
    let line = least_squares(&x, &y)?;
    let fit = LdtFit { c_const: libm::exp(line.intercept), c_exp: line.slope, residual: line.residual, points: x.len() };
    for r in reports.iter_mut() {
        r.bound = r.k0.map(|k| fit.bound(k));
    }
    Some(fit)
}
