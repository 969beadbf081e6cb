//! Analytic `M(2, C)` cocycles given by trigonometric polynomials.
//!
//! A cocycle is a finite Fourier series `A(z) = sum_k C_k exp(2 pi i k.z)`
//! with matrix coefficients. Every such series is entire, so the strip
//! parameter `rho` only selects where the strip norm is measured.

mod mat2;
mod series;
mod sublevel;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

pub use mat2::Mat2C;
pub use series::{Basis, Coefficient, FourierSeries, TrigPoly};
pub use sublevel::{det_sublevel_measure, dyadic_log_det, fit_lojasiewicz, DyadicLogDet, LojasiewiczFit};

use crate::error::{Error, Result};
use crate::torus::{TorusGrid, TorusPoint};
use crate::C64;

/// Below this `|det|` a point is treated as an exact zero of the determinant.
pub const DET_FLOOR: f64 = 1e-300;

/// Relative level under which sampled determinants count as zero when
/// certifying that `det A` is not identically singular.
const SINGULAR_CERT_TOL: f64 = 1e-13;

/// An analytic cocycle on `T^d` with its strip half-width `rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticCocycle {
    series: FourierSeries<Mat2C>,
    rho: f64,
}

impl AnalyticCocycle {
    /// Wraps a matrix series, certifying that `det A` is not identically zero.
    ///
    /// `det A` has degree at most `2 * degree`; sampling it on a grid of
    /// `4 * (2 * degree + 1)` points per dimension determines it, so all-zero
    /// samples mean it vanishes identically.
    pub fn new(series: FourierSeries<Mat2C>, rho: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
        }
        if series.coeffs_iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("cocycle coefficients must be finite".into()));
        }
        let cocycle = AnalyticCocycle { series, rho };
        cocycle.certify_not_singular()?;
        Ok(cocycle)
    }

    pub fn from_terms(dimension: usize, rho: f64, terms: Vec<(Vec<i32>, Mat2C)>) -> Result<Self> {
        AnalyticCocycle::new(FourierSeries::from_terms(dimension, 0, terms)?, rho)
    }

    pub fn constant(dimension: usize, m: Mat2C, rho: f64) -> Result<Self> {
        AnalyticCocycle::new(FourierSeries::constant(dimension, m), rho)
    }

    fn certify_not_singular(&self) -> Result<()> {
        let per_dim = 4 * (2 * self.degree() + 1);
        let grid = TorusGrid::new(per_dim, self.dimension())?;
        let mut basis = self.basis();
        let mut x = vec![0.0; self.dimension()];
        let mut max_det: f64 = 0.0;
        let mut max_norm2: f64 = 0.0;
        for i in 0..grid.len() {
            grid.node_into(i, &mut x);
            basis.load_real(&x);
            let m = basis.sum(&self.series);
            max_det = max_det.max(m.det().norm());
            max_norm2 = max_norm2.max(m.frobenius_sqr());
        }
        if max_det <= SINGULAR_CERT_TOL * (1.0 + max_norm2) {
            return Err(Error::IdenticallySingular);
        }
        Ok(())
    }

    pub fn series(&self) -> &FourierSeries<Mat2C> {
        &self.series
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn dimension(&self) -> usize {
        self.series.dimension()
    }

    pub fn degree(&self) -> usize {
        self.series.degree()
    }

    /// Scratch table for repeated evaluation.
    pub fn basis(&self) -> Basis {
        Basis::new(self.dimension(), self.degree())
    }

    /// `A(z)` at a complex point.
    pub fn evaluate(&self, z: &[C64]) -> Mat2C {
        self.series.evaluate(z)
    }

    /// `A(x)` on the torus.
    pub fn evaluate_real(&self, x: &[f64]) -> Mat2C {
        self.series.evaluate_real(x)
    }

    pub fn at(&self, x: &TorusPoint) -> Mat2C {
        self.evaluate_real(x.coords())
    }

    /// `c A`. Fails only if `c = 0`.
    pub fn scaled(&self, c: C64) -> Result<Self> {
        AnalyticCocycle::new(self.series.scaled(c), self.rho)
    }

    /// `A + B`, keeping the smaller strip parameter.
    pub fn sum(&self, other: &AnalyticCocycle) -> Result<Self> {
        AnalyticCocycle::new(self.series.sum(&other.series)?, self.rho.min(other.rho))
    }

    /// `A + eps P`.
    pub fn perturbed(&self, direction: &FourierSeries<Mat2C>, eps: f64) -> Result<Self> {
        let p = direction.scaled(C64::new(eps, 0.0));
        AnalyticCocycle::new(self.series.sum(&p)?, self.rho)
    }

    /// Distinguished-boundary estimate of `sup_{|Im z_j| <= rho/2} ||A(z)||`.
    ///
    /// Samples `x + i s rho/2` for every grid node `x` and every sign pattern
    /// `s in {-1, 1}^d`. By the maximum principle the supremum over the closed
    /// polystrip sits on that boundary torus; the sampled value is a lower
    /// bound converging as `M` grows.
    pub fn strip_norm(&self, points_per_dim: usize) -> Result<f64> {
        strip_norm_of(&self.series, self.rho, points_per_dim)
    }

    /// `A(x) / |det A(x)|^{1/2}`.
    pub fn renormalize(&self, x: &TorusPoint) -> Result<Mat2C> {
        renormalize_matrix(&self.at(x))
    }
}

impl FourierSeries<Mat2C> {
    fn coeffs_iter(&self) -> impl Iterator<Item = Mat2C> + '_ {
        self.terms().map(|(_, c)| c)
    }
}

/// Strip norm of any matrix series; see [`AnalyticCocycle::strip_norm`].
pub fn strip_norm_of(series: &FourierSeries<Mat2C>, rho: f64, points_per_dim: usize) -> Result<f64> {
    let required = 4 * series.degree() + 4;
    if points_per_dim < required {
        return Err(Error::Resolution { points_per_dim, required });
    }
    let d = series.dimension();
    let grid = TorusGrid::new(points_per_dim, d)?;
    let mut basis = Basis::new(d, series.degree());
    let mut x = vec![0.0; d];
    let mut z = vec![C64::new(0.0, 0.0); d];
    let mut best: f64 = 0.0;
    for i in 0..grid.len() {
        grid.node_into(i, &mut x);
        for signs in 0..(1u32 << d) {
            for j in 0..d {
                let s = if signs >> j & 1 == 1 { 1.0 } else { -1.0 };
                z[j] = C64::new(x[j], s * rho / 2.0);
            }
            basis.load_complex(&z);
            best = best.max(basis.sum(series).operator_norm());
        }
    }
    Ok(best)
}

/// `M / |det M|^{1/2}`; fails when `|det M| < DET_FLOOR`.
pub fn renormalize_matrix(m: &Mat2C) -> Result<Mat2C> {
    let det_abs = m.det().norm();
    if !(det_abs >= DET_FLOOR) {
        return Err(Error::SingularPoint { det_abs });
    }
    Ok(m.scale_real(1.0 / libm::sqrt(det_abs)))
}

/// One-step Schrödinger cocycle `[[E - v(x + omega), -1], [1, 0]]`.
pub fn schrodinger_cocycle(v: &TrigPoly, energy: f64, omega: &[f64], rho: f64) -> Result<AnalyticCocycle> {
    let one = TrigPoly::constant_real(v.dimension(), 1.0);
    jacobi_cocycle(&one, v, energy, omega, rho)
}

/// One-step Jacobi cocycle
/// `A(x) = [[E - v(x + omega), -conj(a)(x)], [a(x + omega), 0]]`.
///
/// With this shift convention `A(x + j omega)` is the `j`-th factor of the
/// transfer matrix, so iterating `A` along `omega` reproduces
/// `A_N(x, omega, E) = M_{N-1} ... M_0`.
pub fn jacobi_cocycle(
    a: &TrigPoly,
    v: &TrigPoly,
    energy: f64,
    omega: &[f64],
    rho: f64,
) -> Result<AnalyticCocycle> {
    let d = a.dimension();
    if v.dimension() != d {
        return Err(Error::DimensionMismatch { expected: d, got: v.dimension() });
    }
    if omega.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: omega.len() });
    }
    if a.is_identically_zero() {
        return Err(Error::IdenticallySingular);
    }
    let zero = C64::new(0.0, 0.0);
    let v_shift = v.shifted(omega)?;
    let a_shift = a.shifted(omega)?;
    let a_bar = a.conjugate();

    let mut terms: Vec<(Vec<i32>, Mat2C)> = Vec::new();
    terms.push((vec![0; d], Mat2C::new(C64::new(energy, 0.0), zero, zero, zero)));
    for (k, c) in v_shift.terms() {
        terms.push((k.to_vec(), Mat2C::new(-c, zero, zero, zero)));
    }
    for (k, c) in a_bar.terms() {
        terms.push((k.to_vec(), Mat2C::new(zero, -c, zero, zero)));
    }
    for (k, c) in a_shift.terms() {
        terms.push((k.to_vec(), Mat2C::new(zero, zero, c, zero)));
    }
    let degree = a.degree().max(v.degree());
    AnalyticCocycle::new(FourierSeries::from_terms(d, degree, terms)?, rho)
}

/// Almost Mathieu cocycle: `v(x) = 2 lambda cos(2 pi x)`, `a = 1`, on `T^1`.
pub fn almost_mathieu_cocycle(lambda: f64, energy: f64, omega: f64, rho: f64) -> Result<AnalyticCocycle> {
    let v = TrigPoly::cosine(2.0 * lambda, vec![1])?;
    schrodinger_cocycle(&v, energy, &[omega], rho)
}
