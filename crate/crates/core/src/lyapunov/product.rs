//! Overflow-safe transfer products `A(x + (N-1) omega) ... A(x + omega) A(x)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::cocycle::{AnalyticCocycle, Basis, Mat2C};
use crate::error::{Error, Result};
use crate::torus::{shift_into, Frequency, TorusPoint};

/// Clamp level `T` for `ln ||.||` and `ln |det|` near zeros, natural-log units.
pub const LOG_CLAMP: f64 = 700.0;

/// A running product held as `2^exponent * scaled`.
///
/// After every multiplication the product is rescaled by an exact power of
/// two chosen from its largest entry, which keeps `max |entry|` in
/// `[1/sqrt 2, sqrt 2)`. Alongside, `sum_j max(ln |det A_j|, -T)` is
/// accumulated factor by factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferProduct {
    scaled: Mat2C,
    exponent: i64,
    steps: usize,
    log_det_sum: f64,
    clamped_factors: usize,
}

impl TransferProduct {
    pub fn scaled(&self) -> &Mat2C {
        &self.scaled
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Power of two carried outside `scaled`.
    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    /// `ln` of the accumulated scale factor.
    pub fn log_scale(&self) -> f64 {
        self.exponent as f64 * LN_2
    }

    /// `ln ||A_N(x)||`.
    pub fn log_norm(&self) -> f64 {
        self.log_scale() + libm::log(self.scaled.operator_norm())
    }

    /// `ln |det A_N(x)|` read off the product matrix itself.
    ///
    /// Loses relative accuracy once `||A_N||^2 / |det A_N|` approaches
    /// `1 / f64::EPSILON`; [`TransferProduct::log_det_factors`] does not.
    pub fn log_det_direct(&self) -> f64 {
        2.0 * self.log_scale() + libm::log(self.scaled.det().norm())
    }

    /// `sum_j ln |det A(x + j omega)|`, each factor clamped at `-T`.
    pub fn log_det_factors(&self) -> f64 {
        self.log_det_sum
    }

    pub fn clamped_factors(&self) -> usize {
        self.clamped_factors
    }

    /// The product as a plain matrix; overflows for long hyperbolic products.
    pub fn to_matrix(&self) -> Mat2C {
        let e = self.exponent.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
        self.scaled.scale_pow2(e)
    }
}

/// Pointwise finite-scale values at one base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValue {
    /// `(1/N) ln ||A_N(x)||`, clamped at `-T/N`.
    pub l_prime: f64,
    /// `(1/N) ln ||A~_N(x)||` for the renormalized cocycle.
    pub l: f64,
    pub clamped: bool,
}

/// Reusable scratch for products of a single cocycle along one frequency.
#[derive(Debug, Clone)]
pub struct ProductKernel<'a> {
    cocycle: &'a AnalyticCocycle,
    omega: &'a [f64],
    basis: Basis,
    y: Vec<f64>,
}

impl<'a> ProductKernel<'a> {
    pub fn new(cocycle: &'a AnalyticCocycle, omega: &'a Frequency) -> Result<Self> {
        Self::from_slice(cocycle, omega.omega())
    }

    pub fn from_slice(cocycle: &'a AnalyticCocycle, omega: &'a [f64]) -> Result<Self> {
        let d = cocycle.dimension();
        if omega.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: omega.len() });
        }
        Ok(ProductKernel { cocycle, omega, basis: cocycle.basis(), y: vec![0.0; d] })
    }

    /// Product of `n` factors starting at `x + offset * omega`.
    pub fn product(&mut self, x: &[f64], offset: u64, n: usize) -> Result<TransferProduct> {
        if n == 0 {
            return Err(Error::InvalidParameter("transfer product needs N >= 1".into()));
        }
        let mut acc = Mat2C::identity();
        let mut exponent: i64 = 0;
        let mut log_det_sum = 0.0;
        let mut clamped_factors = 0;
        let series = self.cocycle.series();
        for j in 0..n {
            shift_into(x, self.omega, offset + j as u64, &mut self.y);
            self.basis.load_real(&self.y);
            let factor: Mat2C = self.basis.sum(series);
            let det_abs = factor.det().norm();
            let ld = libm::log(det_abs);
            if ld >= -LOG_CLAMP {
                log_det_sum += ld;
            } else {
                log_det_sum -= LOG_CLAMP;
                clamped_factors += 1;
            }
            acc = factor * acc;
            let m2 = acc.max_abs_sqr();
            if m2 == 0.0 {
                return Err(Error::ZeroProduct { step: j + 1 });
            }
            let (_, e2) = libm::frexp(m2);
            let e = e2 / 2;
            if e != 0 {
                acc = acc.scale_pow2(-e);
                exponent += e as i64;
            }
        }
        Ok(TransferProduct { scaled: acc, exponent, steps: n, log_det_sum, clamped_factors })
    }

    /// Pointwise `L'_N` and `L_N` at `x + offset * omega`.
    pub fn point_value(&mut self, x: &[f64], offset: u64, n: usize) -> Result<PointValue> {
        let nf = n as f64;
        match self.product(x, offset, n) {
            Ok(p) => {
                let ln = p.log_norm();
                let clamped = !(ln >= -LOG_CLAMP) || p.clamped_factors() > 0;
                let ln_c = if ln >= -LOG_CLAMP { ln } else { -LOG_CLAMP };
                Ok(PointValue {
                    l_prime: ln_c / nf,
                    l: (ln_c - 0.5 * p.log_det_factors()) / nf,
                    clamped,
                })
            }
            Err(Error::ZeroProduct { .. }) => {
                let v = -LOG_CLAMP / nf;
                Ok(PointValue { l_prime: v, l: v, clamped: true })
            }
            Err(e) => Err(e),
        }
    }
}

/// `A_N(x) = prod_{j = N-1}^{0} A(x + j omega)` in rescaled form.
pub fn transfer_product(
    a: &AnalyticCocycle,
    omega: &Frequency,
    x: &TorusPoint,
    n: usize,
) -> Result<TransferProduct> {
    ProductKernel::new(a, omega)?.product(x.coords(), 0, n)
}

/// `(1/N) ln ||A_N(x)||`, or `-T/N` where the product vanishes or falls
/// below `exp(-T)`.
pub fn finite_le_at_point(a: &AnalyticCocycle, omega: &Frequency, x: &TorusPoint, n: usize) -> Result<f64> {
    Ok(ProductKernel::new(a, omega)?.point_value(x.coords(), 0, n)?.l_prime)
}

/// `(1/N) ln ||A~_N(x)||` for the renormalized cocycle `A~ = A / |det A|^{1/2}`.
pub fn renormalized_le_at_point(a: &AnalyticCocycle, omega: &Frequency, x: &TorusPoint, n: usize) -> Result<f64> {
    Ok(ProductKernel::new(a, omega)?.point_value(x.coords(), 0, n)?.l)
}
