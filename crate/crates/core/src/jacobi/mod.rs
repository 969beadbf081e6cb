//! Truncated Jacobi operators
//! `(H psi)(n) = conj(a)(x + (n-1) omega) psi(n-1) + a(x + n omega) psi(n+1) + v(x + n omega) psi(n)`,
//! Sturm counts, IDS windows and the Thouless cross-check.

mod thouless;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

pub use thouless::{thouless_check, ThoulessCheck, ThoulessProbe, THOULESS_CLAMP};

use crate::cocycle::{jacobi_cocycle, AnalyticCocycle, Basis, TrigPoly};
use crate::error::{Error, Result};
use crate::fit::{least_squares, LineFit};
use crate::reduce::map_indices;
use crate::torus::{shift_into, Frequency, TorusPoint};
use crate::C64;

/// Pivots smaller than this are replaced by `-PIVOT_FLOOR`.
pub const PIVOT_FLOOR: f64 = 1e-300;

/// Half-width of the symmetric energy perturbation used for counts.
pub const COUNT_PERTURBATION: f64 = 1e-12;

/// Tolerance on bisected eigenvalues.
pub const EIGEN_TOL: f64 = 1e-10;

/// A Jacobi family `(a, v, omega)` on `T^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiFamily {
    a: TrigPoly,
    v: TrigPoly,
    omega: Frequency,
    rho: f64,
}

impl JacobiFamily {
    /// `v` must be real on real inputs and `a` must not vanish identically.
    pub fn new(a: TrigPoly, v: TrigPoly, omega: Frequency) -> Result<Self> {
        let d = omega.dimension();
        if a.dimension() != d {
            return Err(Error::DimensionMismatch { expected: d, got: a.dimension() });
        }
        if v.dimension() != d {
            return Err(Error::DimensionMismatch { expected: d, got: v.dimension() });
        }
        if a.is_identically_zero() {
            return Err(Error::IdenticallySingular);
        }
        let scale = 1.0 + v.terms().map(|(_, c)| c.norm()).fold(0.0, f64::max);
        if !v.is_real(1e-14 * scale) {
            return Err(Error::InvalidParameter("v must be real-valued (conjugate-symmetric coefficients)".into()));
        }
        Ok(JacobiFamily { a, v, omega, rho: 1.0 })
    }

    /// Almost Mathieu: `a = 1`, `v = 2 lambda cos(2 pi x)`.
    pub fn almost_mathieu(lambda: f64, omega: Frequency) -> Result<Self> {
        if omega.dimension() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: omega.dimension() });
        }
        JacobiFamily::new(TrigPoly::constant_real(1, 1.0), TrigPoly::cosine(2.0 * lambda, vec![1])?, omega)
    }

    /// Strip half-width attached to the cocycles this family produces.
    pub fn with_rho(mut self, rho: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
        }
        self.rho = rho;
        Ok(self)
    }

    pub fn a(&self) -> &TrigPoly {
        &self.a
    }

    pub fn v(&self) -> &TrigPoly {
        &self.v
    }

    pub fn omega(&self) -> &Frequency {
        &self.omega
    }

    pub fn dimension(&self) -> usize {
        self.omega.dimension()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Transfer cocycle at energy `E`.
    pub fn cocycle(&self, energy: f64) -> Result<AnalyticCocycle> {
        jacobi_cocycle(&self.a, &self.v, energy, self.omega.omega(), self.rho)
    }

    /// Restriction to the window `[-N, N]` at base point `x`.
    pub fn truncate(&self, x: &TorusPoint, n: usize) -> Result<TruncatedOperator> {
        let d = self.dimension();
        if x.dimension() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.dimension() });
        }
        let size = 2 * n + 1;
        let mut bv = Basis::new(d, self.v.degree());
        let mut ba = Basis::new(d, self.a.degree());
        let mut y = vec![0.0; d];
        let mut diag = Vec::with_capacity(size);
        let mut offdiag = Vec::with_capacity(size - 1);
        for m in 0..size {
            // site m - N; shift by a signed number of steps via x - N omega
            site_point(x.coords(), self.omega.omega(), m as i64 - n as i64, &mut y);
            bv.load_real(&y);
            diag.push(bv.sum(&self.v).re);
            if m + 1 < size {
                ba.load_real(&y);
                offdiag.push(ba.sum(&self.a));
            }
        }
        Ok(TruncatedOperator { diag, offdiag, half_width: n, base: x.coords().to_vec() })
    }

    /// `k` over `[E1, E2)` at base point `x`.
    pub fn ids(&self, x: &TorusPoint, e1: f64, e2: f64, n: usize) -> Result<IdsReport> {
        if !(e1 < e2) {
            return Err(Error::InvalidParameter(format!("need E1 < E2, got [{e1}, {e2})")));
        }
        if n < 1 {
            return Err(Error::InvalidParameter("IDS needs N >= 1".into()));
        }
        let t = self.truncate(x, n)?;
        let count = t.count_symmetric(e2) - t.count_symmetric(e1);
        Ok(IdsReport { e1, e2, n, count, k_value: count / t.size() as f64, x: x.coords().to_vec() })
    }

    /// `k` averaged over the five base points `x_i = j / 5`.
    pub fn ids_averaged(&self, e1: f64, e2: f64, n: usize) -> Result<IdsReport> {
        let d = self.dimension();
        let mut count = 0.0;
        let mut k = 0.0;
        for j in 0..5 {
            let x = TorusPoint::new(vec![j as f64 / 5.0; d])?;
            let r = self.ids(&x, e1, e2, n)?;
            count += r.count;
            k += r.k_value;
        }
        Ok(IdsReport { e1, e2, n, count: count / 5.0, k_value: k / 5.0, x: vec![0.0; d] })
    }

    /// Window masses `k(E - h, E + h)` and the fit of `ln(-ln k)` on `ln(-ln 2h)`.
    pub fn ids_modulus_scan(&self, x: &TorusPoint, e_center: f64, h_values: &[f64], n: usize) -> Result<IdsModulusScan> {
        if h_values.iter().any(|&h| !(h > 0.0)) {
            return Err(Error::InvalidParameter("window half-widths must be positive".into()));
        }
        let t = self.truncate(x, n)?;
        let size = t.size() as f64;
        let mut points = Vec::with_capacity(h_values.len());
        let mut fx = Vec::new();
        let mut fy = Vec::new();
        for &h in h_values {
            let count = t.count_symmetric(e_center + h) - t.count_symmetric(e_center - h);
            let k = count / size;
            let usable = k > 0.0 && k < 1.0 && 2.0 * h < 1.0;
            if usable {
                fx.push(libm::log(-libm::log(2.0 * h)));
                fy.push(libm::log(-libm::log(k)));
            }
            points.push(IdsWindow { h, count, k_value: k, dropped: !usable });
        }
        Ok(IdsModulusScan { e_center, n, points, fit: least_squares(&fx, &fy) })
    }
}

/// `x + steps * omega` for a signed step count, reduced to `[0, 1)^d`.
fn site_point(x: &[f64], omega: &[f64], steps: i64, out: &mut [f64]) {
    if steps >= 0 {
        shift_into(x, omega, steps as u64, out);
    } else {
        let neg: Vec<f64> = omega.iter().map(|w| -w).collect();
        shift_into(x, &neg, steps.unsigned_abs(), out);
    }
}

/// Hermitian tridiagonal matrix with real diagonal and complex couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    diag: Vec<f64>,
    /// `offdiag[m]` sits at `(m, m + 1)`; its conjugate at `(m + 1, m)`.
    offdiag: Vec<C64>,
    half_width: usize,
    base: Vec<f64>,
}

impl TruncatedOperator {
    /// Arbitrary Hermitian tridiagonal matrix; `offdiag.len() + 1 == diag.len()`.
    pub fn from_parts(diag: Vec<f64>, offdiag: Vec<C64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::DimensionMismatch { expected: diag.len().saturating_sub(1), got: offdiag.len() });
        }
        if diag.iter().any(|v| !v.is_finite()) || offdiag.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("matrix entries must be finite".into()));
        }
        let half_width = (diag.len() - 1) / 2;
        Ok(TruncatedOperator { diag, offdiag, half_width, base: Vec::new() })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[C64] {
        &self.offdiag
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.size();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.offdiag[i - 1].norm();
            }
            if i + 1 < n {
                r += self.offdiag[i].norm();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues `< E` from the signs of the LDL* pivots.
    pub fn eigen_count_below(&self, energy: f64) -> usize {
        let mut count = 0;
        let mut d = 1.0;
        for (i, &dv) in self.diag.iter().enumerate() {
            d = if i == 0 { dv - energy } else { (dv - energy) - self.offdiag[i - 1].norm_sqr() / d };
            if libm::fabs(d) < PIVOT_FLOOR {
                d = -PIVOT_FLOOR;
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Mean of the counts at `E - 1e-12` and `E + 1e-12`.
    pub fn count_symmetric(&self, energy: f64) -> f64 {
        let lo = self.eigen_count_below(energy - COUNT_PERTURBATION);
        let hi = self.eigen_count_below(energy + COUNT_PERTURBATION);
        0.5 * (lo + hi) as f64
    }

    /// `ln |det(T - E)|` as the sum of `ln |pivot|`.
    pub fn log_abs_det_shifted(&self, energy: f64) -> f64 {
        let mut acc = 0.0;
        let mut d = 1.0;
        for (i, &dv) in self.diag.iter().enumerate() {
            d = if i == 0 { dv - energy } else { (dv - energy) - self.offdiag[i - 1].norm_sqr() / d };
            if libm::fabs(d) < PIVOT_FLOOR {
                d = -PIVOT_FLOOR;
            }
            acc += libm::log(libm::fabs(d));
        }
        acc
    }

    /// All eigenvalues in increasing order, by bisection on Sturm counts.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.size();
        let (lo, hi) = self.gershgorin();
        let pad = 1e-9 * (1.0 + lo.abs().max(hi.abs()));
        let (lo, hi) = (lo - pad, hi + pad);
        map_indices(n, |k| {
            // k-th eigenvalue: smallest E with count_below(E) > k
            let mut a = lo;
            let mut b = hi;
            while b - a > EIGEN_TOL {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if self.eigen_count_below(mid) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdsReport {
    pub e1: f64,
    pub e2: f64,
    pub n: usize,
    /// Eigenvalue count in `[E1, E2)`; half-integers arise from the symmetric perturbation.
    pub count: f64,
    pub k_value: f64,
    pub x: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdsWindow {
    pub h: f64,
    pub count: f64,
    pub k_value: f64,
    /// Mass 0 (below resolution), mass 1, or `2h >= 1`: excluded from the fit.
    pub dropped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdsModulusScan {
    pub e_center: f64,
    pub n: usize,
    pub points: Vec<IdsWindow>,
    /// Slope is the exponent estimate `gamma_fit`.
    pub fit: Option<LineFit>,
}
