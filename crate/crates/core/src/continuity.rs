//! Weak-Hölder continuity sweeps in the cocycle and in the frequency.
//!
//! A modulus `|L(A) - L(B)| < C exp(-c (-ln ||A - B||)^gamma)` shows up as a
//! line of slope `gamma` in `ln(-ln dev)` against `ln(-ln eps)`.

use alloc::format;
use alloc::vec::Vec;

use crate::cocycle::{strip_norm_of, AnalyticCocycle, FourierSeries, Mat2C};
use crate::error::{Error, Result};
use crate::fit::{least_squares, log_neg_log};
use crate::lyapunov::{finite_le, LyapunovRecord};
use crate::torus::{Frequency, TorusGrid};

/// Minimum number of usable points for a fit.
pub const MIN_FIT_POINTS: usize = 4;

/// Base exponents below this refuse the cocycle sweep.
pub const MIN_BASE_EXPONENT: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakHolderFit {
    pub gamma: f64,
    pub intercept: f64,
    pub residual: f64,
    pub points: usize,
}

/// Fit over the pairs with `0 < eps < 1` and `0 < dev < 1`.
pub fn weak_holder_fit(eps: &[f64], dev: &[f64]) -> Result<WeakHolderFit> {
    if eps.len() != dev.len() {
        return Err(Error::DimensionMismatch { expected: eps.len(), got: dev.len() });
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (&e, &d) in eps.iter().zip(dev) {
        if let (Some(a), Some(b)) = (log_neg_log(e), log_neg_log(d)) {
            x.push(a);
            y.push(b);
        }
    }
    if x.len() < MIN_FIT_POINTS {
        return Err(Error::DegenerateFit { usable: x.len(), required: MIN_FIT_POINTS });
    }
    let line = least_squares(&x, &y).ok_or(Error::DegenerateFit { usable: x.len(), required: MIN_FIT_POINTS })?;
    Ok(WeakHolderFit { gamma: line.slope, intercept: line.intercept, residual: line.residual, points: x.len() })
}

/// Maps a perturbation size to a power-of-two working scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleRule {
    pub beta: f64,
    pub n_unit: f64,
    pub n_min: usize,
    pub n_max: usize,
}

impl Default for ScaleRule {
    fn default() -> Self {
        ScaleRule { beta: 0.5, n_unit: 16.0, n_min: 16, n_max: 4096 }
    }
}

impl ScaleRule {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.n_unit > 0.0) || self.n_min == 0 || self.n_min > self.n_max {
            return Err(Error::InvalidParameter(format!("bad scale rule {self:?}")));
        }
        Ok(())
    }

    fn clamp(&self, n: usize) -> usize {
        n.max(self.n_min).min(self.n_max)
    }

    /// `N = next_pow2(ceil(n_unit (-ln eps)^beta))`, clamped to `[n_min, n_max]`.
    pub fn cocycle_scale(&self, eps: f64) -> usize {
        if !(eps > 0.0 && eps < 1.0) {
            return self.n_min;
        }
        let raw = libm::ceil(self.n_unit * libm::pow(-libm::log(eps), self.beta));
        let raw = if raw >= self.n_max as f64 { self.n_max } else { raw as usize };
        self.clamp(raw.max(1).next_power_of_two())
    }

    /// Largest power of two strictly below `n_unit (-ln h)^beta`, clamped.
    pub fn frequency_scale(&self, h: f64) -> usize {
        if !(h > 0.0 && h < 1.0) {
            return self.n_min;
        }
        let cap = self.n_unit * libm::pow(-libm::log(h), self.beta);
        let mut n = 1usize;
        while ((2 * n) as f64) < cap && 2 * n <= self.n_max {
            n *= 2;
        }
        self.clamp(n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityRow {
    /// `eps` for cocycle sweeps, `||omega' - omega||` for frequency sweeps.
    pub size: f64,
    pub n: usize,
    pub l_base: f64,
    pub l_perturbed: f64,
    pub deviation: f64,
    /// `|L_{N/2} - L_N|` of the base system: the telescoped error bar.
    pub probe_delta: f64,
    pub clamp_fraction: f64,
    pub grid_m: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuitySweep {
    pub rows: Vec<ContinuityRow>,
    pub rule: ScaleRule,
    /// `None` when fewer than four points survive filtering.
    pub fit: Option<WeakHolderFit>,
}

fn base_at(a: &AnalyticCocycle, omega: &Frequency, n: usize, grid: &TorusGrid) -> Result<(LyapunovRecord, f64)> {
    let r = finite_le(a, omega, n, grid)?;
    let delta = if n >= 2 { libm::fabs(finite_le(a, omega, n / 2, grid)?.l - r.l) } else { 0.0 };
    Ok((r, delta))
}

fn finish(rows: Vec<ContinuityRow>, rule: ScaleRule) -> ContinuitySweep {
    let eps: Vec<f64> = rows.iter().map(|r| r.size).collect();
    let dev: Vec<f64> = rows.iter().map(|r| r.deviation).collect();
    ContinuitySweep { fit: weak_holder_fit(&eps, &dev).ok(), rows, rule }
}

/// `B = A + eps ||A||_rho P` with `P` rescaled to strip norm 1.
///
/// Refuses when `L_N(A) < 0.1` at the largest scale in the sweep.
pub fn cocycle_sweep(
    a: &AnalyticCocycle,
    omega: &Frequency,
    direction: &FourierSeries<Mat2C>,
    epsilons: &[f64],
    rule: ScaleRule,
    grid: &TorusGrid,
) -> Result<ContinuitySweep> {
    rule.validate()?;
    if epsilons.iter().any(|&e| !(e >= 0.0 && e.is_finite())) {
        return Err(Error::InvalidParameter("perturbation sizes must be finite and non-negative".into()));
    }
    let degree = a.degree().max(direction.degree());
    let m_norm = (4 * degree + 4).max(64);
    let p_norm = strip_norm_of(direction, a.rho(), m_norm)?;
    if !(p_norm > 0.0) {
        return Err(Error::InvalidParameter("perturbation direction vanishes".into()));
    }
    let a_norm = a.strip_norm(m_norm)?;
    let unit = direction.scaled(crate::C64::new(a_norm / p_norm, 0.0));

    let scales: Vec<usize> = epsilons.iter().map(|&e| rule.cocycle_scale(e)).collect();
    let top = scales.iter().copied().max().unwrap_or(rule.n_min);
    let top_l = finite_le(a, omega, top, grid)?.l;
    if !(top_l > MIN_BASE_EXPONENT) {
        return Err(Error::Precondition(format!(
            "base exponent L_{top} = {top_l:.6} does not exceed {MIN_BASE_EXPONENT}"
        )));
    }
    let mut rows = Vec::with_capacity(epsilons.len());
    for (&eps, &n) in epsilons.iter().zip(&scales) {
        let (base, probe_delta) = base_at(a, omega, n, grid)?;
        let (pert, deviation) = if eps == 0.0 {
            (base.clone(), 0.0)
        } else {
            let p = finite_le(&a.perturbed(&unit, eps)?, omega, n, grid)?;
            let dev = libm::fabs(p.l - base.l);
            (p, dev)
        };
        rows.push(ContinuityRow {
            size: eps,
            n,
            l_base: base.l,
            l_perturbed: pert.l,
            deviation,
            probe_delta,
            clamp_fraction: base.clamp_fraction.max(pert.clamp_fraction),
            grid_m: grid.points_per_dim(),
        });
    }
    Ok(finish(rows, rule))
}

/// `A` fixed, dynamics moved from `omega` to each `omega'`; no arithmetic
/// condition is imposed on `omega'`.
pub fn frequency_sweep(
    a: &AnalyticCocycle,
    omega: &Frequency,
    targets: &[Vec<f64>],
    rule: ScaleRule,
    grid: &TorusGrid,
) -> Result<ContinuitySweep> {
    rule.validate()?;
    let mut rows = Vec::with_capacity(targets.len());
    for t in targets {
        if t.len() != omega.dimension() {
            return Err(Error::DimensionMismatch { expected: omega.dimension(), got: t.len() });
        }
        let h = libm::sqrt(t.iter().zip(omega.omega()).map(|(p, q)| (p - q) * (p - q)).sum::<f64>());
        let n = rule.frequency_scale(h);
        let (base, probe_delta) = base_at(a, omega, n, grid)?;
        let (pert, deviation) = if h == 0.0 {
            (base.clone(), 0.0)
        } else {
            let w2 = omega.with_omega(t.clone())?;
            let p = finite_le(a, &w2, n, grid)?;
            let dev = libm::fabs(p.l - base.l);
            (p, dev)
        };
        rows.push(ContinuityRow {
            size: h,
            n,
            l_base: base.l,
            l_perturbed: pert.l,
            deviation,
            probe_delta,
            clamp_fraction: base.clamp_fraction.max(pert.clamp_fraction),
            grid_m: grid.points_per_dim(),
        });
    }
    Ok(finish(rows, rule))
}
