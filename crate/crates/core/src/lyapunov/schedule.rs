//! Multi-scale induction schedules.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Relative slack for the admissibility comparisons.
const SLACK: f64 = 1e-12;

/// Largest scale kept; later stages are cut before their `N` overflows.
const N_CEILING: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleMode {
    /// Enforce `kappa0 < 1/1000`, `C >= 5` and stage-0 admissibility.
    Strict,
    /// Evaluate the recurrences for any positive inputs and only flag failures.
    Toy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage {
    pub s: usize,
    pub kappa: f64,
    pub k: f64,
    pub delta: f64,
    pub n: f64,
    /// `N_s >= kappa_s^{-C} delta_s^{-1} K_s`.
    pub n_admissible: bool,
    /// `K_s >= (rho^{1+c} kappa_s)^{-C}`.
    pub strip_ok: bool,
}

impl Stage {
    pub fn required_n(&self, c_big: f64) -> f64 {
        libm::pow(self.kappa, -c_big) * self.k / self.delta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InductionSchedule {
    pub kappa0: f64,
    pub c_big: f64,
    pub c: f64,
    pub sigma: f64,
    pub tau: f64,
    pub rho: f64,
    pub eta: f64,
    pub mode: ScheduleMode,
    pub stages: Vec<Stage>,
    /// The stage after the last one listed would overflow.
    pub truncated: bool,
}

fn geq(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs * (1.0 - SLACK)
}

/// Stages `s = 0..=max_stages` with `kappa_s = kappa_{s-1}^2`, `K_s = kappa_s^{-C}`,
/// `delta_s = tau K_s^{-sigma}`, `N_0` the least power of two at least
/// `tau^{-1} K_0^{sigma+2}` and `N_s = floor(exp(K_{s-1}^c / 2)) N_{s-1}`.
pub fn build_schedule(
    kappa0: f64,
    c_big: f64,
    sigma: f64,
    tau: f64,
    rho: f64,
    max_stages: usize,
    mode: ScheduleMode,
) -> Result<InductionSchedule> {
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
        }
    };
    positive("kappa0", kappa0)?;
    positive("C", c_big)?;
    positive("tau", tau)?;
    positive("rho", rho)?;
    if !(sigma >= 1.0) {
        return Err(Error::InvalidParameter(format!("sigma must be >= 1, got {sigma}")));
    }
    if !(kappa0 < 1.0) {
        return Err(Error::InvalidParameter(format!("kappa0 must be < 1, got {kappa0}")));
    }
    if max_stages < 1 {
        return Err(Error::InvalidParameter("max_stages must be >= 1".into()));
    }
    if mode == ScheduleMode::Strict {
        if !(kappa0 < 1e-3) {
            return Err(Error::InfeasibleSchedule { stage: 0, inequality: format!("kappa0 < 1/1000 (kappa0 = {kappa0})") });
        }
        if !(c_big >= 5.0) {
            return Err(Error::InfeasibleSchedule { stage: 0, inequality: format!("C >= 5 (C = {c_big})") });
        }
    }
    let c = 1.0 / c_big;
    let strip_rho = libm::pow(rho, 1.0 + c);
    let make = |s: usize, kappa: f64, n: f64| {
        let k = libm::pow(kappa, -c_big);
        let delta = tau * libm::pow(k, -sigma);
        let mut st = Stage { s, kappa, k, delta, n, n_admissible: false, strip_ok: false };
        st.n_admissible = geq(n, st.required_n(c_big));
        st.strip_ok = geq(k, libm::pow(strip_rho * kappa, -c_big));
        st
    };

    let k0 = libm::pow(kappa0, -c_big);
    let target = libm::pow(k0, sigma + 2.0) / tau;
    if !(target < N_CEILING) {
        return Err(Error::InfeasibleSchedule { stage: 0, inequality: format!("N_0 >= tau^-1 K_0^(sigma+2) = {target:e} is not representable") });
    }
    let mut n0 = 1.0f64;
    while !geq(n0, target) {
        n0 *= 2.0;
    }
    let first = make(0, kappa0, n0);
    if mode == ScheduleMode::Strict && !first.n_admissible {
        return Err(Error::InfeasibleSchedule { stage: 0, inequality: "N_0 >= kappa_0^-C delta_0^-1 K_0".into() });
    }
    let mut stages = Vec::with_capacity(max_stages + 1);
    stages.push(first);
    let mut truncated = false;
    for s in 1..=max_stages {
        let prev = stages[s - 1];
        // K_{s-1}^c = 1 / kappa_{s-1}
        let growth = libm::floor(libm::exp(0.5 * libm::pow(prev.k, c)));
        let n = growth * prev.n;
        let kappa = prev.kappa * prev.kappa;
        if !(n < N_CEILING) || !(libm::pow(kappa, -c_big) < N_CEILING) || kappa == 0.0 {
            truncated = true;
            break;
        }
        stages.push(make(s, kappa, n));
    }
    Ok(InductionSchedule {
        kappa0,
        c_big,
        c,
        sigma,
        tau,
        rho,
        eta: c / (sigma + 2.0),
        mode,
        stages,
        truncated,
    })
}
