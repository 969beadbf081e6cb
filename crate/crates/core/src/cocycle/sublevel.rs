//! Sublevel sets of `|det A|`: measures, power-law envelopes and the dyadic
//! shell decomposition of `ln |det A|`.

use alloc::vec;
use alloc::vec::Vec;

use super::AnalyticCocycle;
use crate::error::{Error, Result};
use crate::fit::least_squares;
use crate::reduce::{map_indices, pairwise_mean};
use crate::torus::TorusGrid;

fn det_abs_on_grid(a: &AnalyticCocycle, grid: &TorusGrid) -> Vec<f64> {
    let d = grid.dimension();
    map_indices(grid.len(), |i| {
        let mut x = vec![0.0; d];
        grid.node_into(i, &mut x);
        a.evaluate_real(&x).det().norm()
    })
}

/// Fraction of grid nodes with `|det A(x)| < t`.
pub fn det_sublevel_measure(a: &AnalyticCocycle, t: f64, grid: &TorusGrid) -> f64 {
    let dets = det_abs_on_grid(a, grid);
    dets.iter().filter(|v| **v < t).count() as f64 / dets.len() as f64
}

/// Power-law envelope `|{|det A| < t}| <= S t^b` over a range of `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LojasiewiczFit {
    pub s: f64,
    pub b: f64,
    pub t_range: (f64, f64),
    /// RMS residual of the log-log regression.
    pub residual: f64,
    /// `(t, measure)` pairs used in the fit.
    pub samples: Vec<(f64, f64)>,
}

impl LojasiewiczFit {
    pub fn envelope(&self, t: f64) -> f64 {
        self.s * libm::pow(t, self.b)
    }
}

/// Fits `ln measure = ln S + b ln t` over the `t_values` whose sublevel
/// measure lies strictly between 0 and 1, then raises `S` until the envelope
/// covers every sample.
///
/// Fails with [`Error::NoZerosDetected`] when every measure is zero.
pub fn fit_lojasiewicz(a: &AnalyticCocycle, grid: &TorusGrid, t_values: &[f64]) -> Result<LojasiewiczFit> {
    if t_values.len() < 8 {
        return Err(Error::InvalidParameter("need at least 8 sublevel thresholds".into()));
    }
    if t_values.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidParameter("sublevel thresholds must be positive".into()));
    }
    let mut dets = det_abs_on_grid(a, grid);
    dets.sort_by(|x, y| x.total_cmp(y));
    let total = dets.len() as f64;
    let measures: Vec<(f64, f64)> = t_values
        .iter()
        .map(|t| (*t, dets.partition_point(|v| v < t) as f64 / total))
        .collect();
    if measures.iter().all(|(_, m)| *m == 0.0) {
        return Err(Error::NoZerosDetected);
    }
    let samples: Vec<(f64, f64)> = measures.into_iter().filter(|(_, m)| *m > 0.0 && *m < 1.0).collect();
    let lx: Vec<f64> = samples.iter().map(|(t, _)| libm::log(*t)).collect();
    let ly: Vec<f64> = samples.iter().map(|(_, m)| libm::log(*m)).collect();
    let line = least_squares(&lx, &ly).ok_or(Error::DegenerateFit { usable: samples.len(), required: 2 })?;
    if !(line.slope > 0.0) {
        return Err(Error::DegenerateFit { usable: samples.len(), required: 2 });
    }
    let b = line.slope;
    let mut s = libm::exp(line.intercept);
    for (t, m) in &samples {
        s = s.max(*m / libm::pow(*t, b));
    }
    let t_min = samples.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let t_max = samples.iter().map(|p| p.0).fold(0.0, f64::max);
    Ok(LojasiewiczFit { s, b, t_range: (t_min, t_max), residual: line.residual, samples })
}

/// Shell decomposition of `ln |det A|` on a grid.
///
/// Shell `j` is `{2^{-j-1} <= |det A| < 2^{-j}}`, on which
/// `|ln |det A|| < (j + 1) ln 2`. Values below `exp(-clamp)` are clamped.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicLogDet {
    /// Measure of each shell `j = 0, 1, ...` up to the last nonempty one.
    pub shells: Vec<f64>,
    /// Measure of `{|det A| >= 1}`.
    pub above_one: f64,
    /// Measure of the clamped set.
    pub clamped: f64,
    /// Grid mean of `|ln |det A||^2`.
    pub second_moment: f64,
    /// Shellwise upper bound for `second_moment`.
    pub dyadic_bound: f64,
}

pub fn dyadic_log_det(a: &AnalyticCocycle, grid: &TorusGrid, clamp: f64) -> DyadicLogDet {
    let dets = det_abs_on_grid(a, grid);
    let total = dets.len() as f64;
    let floor = libm::exp(-clamp);
    let mut shells: Vec<f64> = Vec::new();
    let mut above_one = 0.0;
    let mut clamped = 0.0;
    let mut max_log: f64 = 0.0;
    let mut sq: Vec<f64> = Vec::with_capacity(dets.len());
    for v in &dets {
        if !(*v >= floor) {
            clamped += 1.0;
            sq.push(clamp * clamp);
            continue;
        }
        let l = libm::log(*v);
        sq.push(l * l);
        if *v >= 1.0 {
            above_one += 1.0;
            max_log = max_log.max(l);
        } else {
            let j = libm::floor(-libm::log2(*v)) as usize;
            if shells.len() <= j {
                shells.resize(j + 1, 0.0);
            }
            shells[j] += 1.0;
        }
    }
    let ln2 = core::f64::consts::LN_2;
    let mut bound = above_one * max_log * max_log + clamped * clamp * clamp;
    for (j, count) in shells.iter().enumerate() {
        let w = (j as f64 + 1.0) * ln2;
        bound += count * w * w;
    }
    DyadicLogDet {
        shells: shells.iter().map(|c| c / total).collect(),
        above_one: above_one / total,
        clamped: clamped / total,
        second_moment: pairwise_mean(&sq),
        dyadic_bound: bound / total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{jacobi_cocycle, FourierSeries, Mat2C, TrigPoly};
    use crate::torus::golden;
    use crate::C64;
    use core::f64::consts::PI;

    fn cos_det_cocycle(power: u32) -> AnalyticCocycle {
        // diag(cos, 1) or diag(cos, cos): det = cos(2 pi x)^power
        let f = TrigPoly::cosine(1.0, vec![1]).unwrap();
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let mut terms: Vec<(Vec<i32>, Mat2C)> =
            f.terms().map(|(k, c)| (k.to_vec(), Mat2C::new(c, zero, zero, if power == 2 { c } else { zero }))).collect();
        if power == 1 {
            terms.push((vec![0], Mat2C::new(zero, zero, zero, one)));
        }
        AnalyticCocycle::new(FourierSeries::from_terms(1, 1, terms).unwrap(), 0.1).unwrap()
    }

    fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo * libm::pow(hi / lo, i as f64 / (n - 1) as f64)).collect()
    }

    #[test]
    fn trivial_measures() {
        let a = AnalyticCocycle::constant(1, Mat2C::real(2.0, 0.0, 0.0, 0.5), 0.1).unwrap();
        let g = TorusGrid::new(64, 1).unwrap();
        assert_eq!(det_sublevel_measure(&a, 0.5, &g), 0.0);
        assert_eq!(det_sublevel_measure(&a, 2.0, &g), 1.0);
        assert_eq!(fit_lojasiewicz(&a, &g, &log_spaced(1e-6, 0.5, 10)).unwrap_err(), Error::NoZerosDetected);
    }

    #[test]
    fn simple_zero_measure_matches_arcsine_oracle() {
        // oracle: |{|cos 2 pi x| < t}| = 2 asin(t) / pi exactly
        let a = cos_det_cocycle(1);
        let g = TorusGrid::new(1 << 16, 1).unwrap();
        for t in [1e-2, 3e-2, 0.1] {
            let exact = 2.0 * libm::asin(t) / PI;
            let got = det_sublevel_measure(&a, t, &g);
            assert!((got - exact).abs() <= 4.0 / g.len() as f64, "t={t} got={got} exact={exact}");
        }
        // t = 1e-4: about 4 nodes, so compare within node granularity
        let got = det_sublevel_measure(&a, 1e-4, &g);
        let exact = 2.0 * libm::asin(1e-4) / PI;
        assert!((got - exact).abs() <= 4.0 / g.len() as f64);
    }

    #[test]
    fn sublevel_measure_is_monotone() {
        let a = cos_det_cocycle(2);
        let g = TorusGrid::new(4096, 1).unwrap();
        let mut prev = 0.0;
        for t in log_spaced(1e-8, 2.0, 30) {
            let m = det_sublevel_measure(&a, t, &g);
            assert!(m >= prev);
            prev = m;
        }
    }

    #[test]
    fn lojasiewicz_exponent_simple_zero() {
        let a = cos_det_cocycle(1);
        let g = TorusGrid::new(1 << 16, 1).unwrap();
        let fit = fit_lojasiewicz(&a, &g, &log_spaced(1e-3, 0.1, 10)).unwrap();
        assert!((fit.b - 1.0).abs() < 0.05, "b = {}", fit.b);
        for (t, m) in &fit.samples {
            assert!(*m <= fit.envelope(*t) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn lojasiewicz_exponent_double_zero() {
        let a = cos_det_cocycle(2);
        let g = TorusGrid::new(1 << 16, 1).unwrap();
        let fit = fit_lojasiewicz(&a, &g, &log_spaced(1e-6, 1e-2, 10)).unwrap();
        assert!((fit.b - 0.5).abs() < 0.05, "b = {}", fit.b);
    }

    #[test]
    fn lojasiewicz_exponent_jacobi_family() {
        let af = TrigPoly::cosine(1.0, vec![1]).unwrap();
        let v = TrigPoly::constant_real(1, 0.0);
        let a = jacobi_cocycle(&af, &v, 1.0, &[golden()], 0.1).unwrap();
        let g = TorusGrid::new(1 << 16, 1).unwrap();
        let fit = fit_lojasiewicz(&a, &g, &log_spaced(1e-3, 0.05, 10)).unwrap();
        assert!((fit.b - 1.0).abs() < 0.1, "b = {}", fit.b);
    }

    #[test]
    fn fit_requires_enough_thresholds() {
        let a = cos_det_cocycle(1);
        let g = TorusGrid::new(256, 1).unwrap();
        assert!(fit_lojasiewicz(&a, &g, &[0.1, 0.2]).is_err());
    }

    #[test]
    fn dyadic_bound_dominates_second_moment() {
        for a in [cos_det_cocycle(1), cos_det_cocycle(2)] {
            let g = TorusGrid::new(4096, 1).unwrap();
            let dy = dyadic_log_det(&a, &g, 700.0);
            assert!(dy.second_moment <= dy.dyadic_bound);
            let total: f64 = dy.shells.iter().sum::<f64>() + dy.above_one + dy.clamped;
            assert!((total - 1.0).abs() < 1e-12);
            assert!(dy.dyadic_bound.is_finite());
        }
    }
}
