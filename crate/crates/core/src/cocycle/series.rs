//! Finite Fourier series on `T^d` with scalar or matrix coefficients.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::Mat2C;
use crate::error::{Error, Result};
use crate::torus::reduce_unit;
use crate::C64;

/// Coefficient types a [`FourierSeries`] can carry.
pub trait Coefficient: Copy + core::fmt::Debug + PartialEq {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, c: C64) -> Self;
    fn is_zero(&self) -> bool;
    fn magnitude(&self) -> f64;
}

impl Coefficient for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    #[inline]
    fn add(self, other: Self) -> Self {
        self + other
    }
    #[inline]
    fn scale(self, c: C64) -> Self {
        self * c
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Coefficient for Mat2C {
    fn zero() -> Self {
        Mat2C::zero()
    }
    #[inline]
    fn add(self, other: Self) -> Self {
        self + other
    }
    #[inline]
    fn scale(self, c: C64) -> Self {
        Mat2C::scale(&self, c)
    }
    fn is_zero(&self) -> bool {
        self.entries().iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.operator_norm()
    }
}

/// `sum_k c_k exp(2 pi i k.z)` over finitely many `k` with `|k|_inf <= degree`.
///
/// Terms are kept sorted by `k` (lexicographic) with duplicates merged.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries<T> {
    dimension: usize,
    degree: usize,
    keys: Vec<i32>,
    coeffs: Vec<T>,
}

impl<T: Coefficient> FourierSeries<T> {
    /// Builds a series. `degree` is raised to the largest `|k|_inf` present.
    pub fn from_terms(dimension: usize, degree: usize, terms: Vec<(Vec<i32>, T)>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidParameter("series dimension must be at least 1".into()));
        }
        let mut terms = terms;
        for (k, _) in &terms {
            if k.len() != dimension {
                return Err(Error::DimensionMismatch { expected: dimension, got: k.len() });
            }
        }
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut keys: Vec<i32> = Vec::with_capacity(terms.len() * dimension);
        let mut coeffs: Vec<T> = Vec::with_capacity(terms.len());
        let mut degree = degree;
        let mut last: Option<Vec<i32>> = None;
        for (k, c) in terms {
            let kd = k.iter().map(|v| v.unsigned_abs() as usize).max().unwrap_or(0);
            degree = degree.max(kd);
            if last.as_ref() == Some(&k) {
                let top = coeffs.last_mut().expect("merged term has a predecessor");
                *top = top.add(c);
            } else {
                keys.extend_from_slice(&k);
                coeffs.push(c);
                last = Some(k);
            }
        }
        Ok(FourierSeries { dimension, degree, keys, coeffs })
    }

    pub fn constant(dimension: usize, c: T) -> Self {
        FourierSeries { dimension: dimension.max(1), degree: 0, keys: vec![0; dimension.max(1)], coeffs: vec![c] }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn key(&self, i: usize) -> &[i32] {
        &self.keys[i * self.dimension..(i + 1) * self.dimension]
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs[i]
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32], T)> + '_ {
        (0..self.len()).map(move |i| (self.key(i), self.coeffs[i]))
    }

    /// Coefficient at `k`, zero if absent.
    pub fn coefficient_at(&self, k: &[i32]) -> T {
        (0..self.len())
            .find(|i| self.key(*i) == k)
            .map(|i| self.coeffs[i])
            .unwrap_or_else(T::zero)
    }

    /// True when every coefficient is exactly zero.
    pub fn is_identically_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn map<U: Coefficient>(&self, f: impl Fn(T) -> U) -> FourierSeries<U> {
        FourierSeries {
            dimension: self.dimension,
            degree: self.degree,
            keys: self.keys.clone(),
            coeffs: self.coeffs.iter().map(|c| f(*c)).collect(),
        }
    }

    pub fn scaled(&self, c: C64) -> Self {
        self.map(|t| t.scale(c))
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, got: other.dimension });
        }
        let terms = self
            .terms()
            .chain(other.terms())
            .map(|(k, c)| (k.to_vec(), c))
            .collect();
        FourierSeries::from_terms(self.dimension, self.degree.max(other.degree), terms)
    }

    /// The series of `x -> f(x + shift)`: each `c_k` picks up `exp(2 pi i k.shift)`.
    pub fn shifted(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, got: shift.len() });
        }
        let mut out = self.clone();
        for i in 0..self.len() {
            let mut phase = 0.0;
            for (k, s) in self.key(i).iter().zip(shift) {
                phase = reduce_unit(phase + reduce_unit(*k as f64 * *s));
            }
            let (sn, cs) = libm::sincos(2.0 * PI * phase);
            out.coeffs[i] = self.coeffs[i].scale(C64::new(cs, sn));
        }
        Ok(out)
    }

    /// Sum at a complex point `z`.
    pub fn evaluate(&self, z: &[C64]) -> T {
        let mut basis = Basis::new(self.dimension, self.degree);
        basis.load_complex(z);
        basis.sum(self)
    }

    /// Sum at a real point `x`.
    pub fn evaluate_real(&self, x: &[f64]) -> T {
        let mut basis = Basis::new(self.dimension, self.degree);
        basis.load_real(x);
        basis.sum(self)
    }
}

impl FourierSeries<C64> {
    /// The series whose restriction to real `x` is the complex conjugate:
    /// the coefficient at `-k` is `conj(c_k)`.
    pub fn conjugate(&self) -> Self {
        let terms = self
            .terms()
            .map(|(k, c)| (k.iter().map(|v| -v).collect(), c.conj()))
            .collect();
        FourierSeries::from_terms(self.dimension, self.degree, terms).expect("same shape")
    }

    /// Whether the series is real on real inputs (`c_{-k} = conj(c_k)`) to `tol`.
    pub fn is_real(&self, tol: f64) -> bool {
        self.terms().all(|(k, c)| {
            let neg: Vec<i32> = k.iter().map(|v| -v).collect();
            (self.coefficient_at(&neg) - c.conj()).norm() <= tol
        })
    }
}

/// A table of `exp(2 pi i m z_j)` for `|m| <= degree`, reused across evaluations.
#[derive(Debug, Clone)]
pub struct Basis {
    dimension: usize,
    degree: usize,
    powers: Vec<C64>,
}

impl Basis {
    pub fn new(dimension: usize, degree: usize) -> Self {
        Basis { dimension, degree, powers: vec![C64::new(1.0, 0.0); dimension * (2 * degree + 1)] }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    #[inline]
    fn row(&mut self, j: usize) -> &mut [C64] {
        let w = 2 * self.degree + 1;
        &mut self.powers[j * w..(j + 1) * w]
    }

    /// Loads the table for a real point.
    #[inline]
    pub fn load_real(&mut self, x: &[f64]) {
        let deg = self.degree;
        if deg == 0 {
            return;
        }
        for (j, xj) in x.iter().enumerate().take(self.dimension) {
            let (s, c) = libm::sincos(2.0 * PI * *xj);
            let u = C64::new(c, s);
            let row = self.row(j);
            row[deg] = C64::new(1.0, 0.0);
            for m in 1..=deg {
                let p = row[deg + m - 1] * u;
                row[deg + m] = p;
                row[deg - m] = p.conj();
            }
        }
    }

    /// Loads the table for a complex point.
    pub fn load_complex(&mut self, z: &[C64]) {
        let deg = self.degree;
        for (j, zj) in z.iter().enumerate().take(self.dimension) {
            let (s, c) = libm::sincos(2.0 * PI * zj.re);
            let r = libm::exp(-2.0 * PI * zj.im);
            let u = C64::new(r * c, r * s);
            let inv = C64::new(c / r, -s / r);
            let row = self.row(j);
            row[deg] = C64::new(1.0, 0.0);
            for m in 1..=deg {
                row[deg + m] = row[deg + m - 1] * u;
                row[deg - m] = row[deg - m + 1] * inv;
            }
        }
    }

    /// `sum_k c_k prod_j exp(2 pi i k_j z_j)` for the loaded point.
    #[inline]
    pub fn sum<T: Coefficient>(&self, series: &FourierSeries<T>) -> T {
        let deg = self.degree as i32;
        let w = 2 * self.degree + 1;
        let mut acc = T::zero();
        for i in 0..series.len() {
            let k = series.key(i);
            let mut e = C64::new(1.0, 0.0);
            for (j, kj) in k.iter().enumerate() {
                e *= self.powers[j * w + (kj + deg) as usize];
            }
            acc = acc.add(series.coeff(i).scale(e));
        }
        acc
    }
}

/// Scalar trigonometric polynomial.
pub type TrigPoly = FourierSeries<C64>;

impl TrigPoly {
    /// `amplitude * cos(2 pi k.x)`.
    pub fn cosine(amplitude: f64, k: Vec<i32>) -> Result<Self> {
        let d = k.len();
        let neg: Vec<i32> = k.iter().map(|v| -v).collect();
        let half = C64::new(amplitude / 2.0, 0.0);
        FourierSeries::from_terms(d, 0, vec![(k, half), (neg, half)])
    }

    pub fn constant_real(dimension: usize, c: f64) -> Self {
        FourierSeries::constant(dimension, C64::new(c, 0.0))
    }
}
