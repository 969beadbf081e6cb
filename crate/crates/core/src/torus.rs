//! Torus geometry: points, shifts, uniform grids and Diophantine scans over
//! integer lattices.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest `(2K+1)^d` lattice scanned by default.
pub const DEFAULT_LATTICE_BUDGET: u128 = 1 << 26;

/// Reduces `t` into `[0, 1)`.
#[inline]
pub fn reduce_unit(t: f64) -> f64 {
    let r = t - libm::floor(t);
    // tiny negative t rounds up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Distance from `t` to the nearest integer, in `[0, 1/2]`.
///
/// Ties round half to even, so the result is reproducible bit for bit.
#[inline]
pub fn torus_norm(t: f64) -> f64 {
    libm::fabs(t - libm::rint(t))
}

/// A point of `T^d`, every coordinate in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    /// Builds a point, reducing every coordinate mod 1.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("torus dimension must be at least 1".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("torus coordinates must be finite".into()));
        }
        Ok(TorusPoint { coords: coords.into_iter().map(reduce_unit).collect() })
    }

    pub fn origin(dimension: usize) -> Self {
        TorusPoint { coords: vec![0.0; dimension.max(1)] }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }
}

/// `x + steps * omega (mod 1)`, coordinatewise.
///
/// Each coordinate is formed with a single fused multiply-add before the
/// reduction, so the error is one rounding of `steps * omega + x`.
pub fn shift(x: &TorusPoint, omega: &Frequency, steps: u64) -> TorusPoint {
    let mut out = vec![0.0; x.dimension()];
    shift_into(x.coords(), omega.omega(), steps, &mut out);
    TorusPoint { coords: out }
}

/// Slice form of [`shift`] writing into `out`.
#[inline]
pub fn shift_into(x: &[f64], omega: &[f64], steps: u64, out: &mut [f64]) {
    let s = steps as f64;
    for ((o, xi), wi) in out.iter_mut().zip(x).zip(omega) {
        *o = reduce_unit(libm::fma(s, *wi, *xi));
    }
}

/// A rotation vector with its Diophantine metadata `(tau, sigma)`.
///
/// The metadata describes the condition `||k.omega|| > tau |k|^-sigma` that
/// [`check_diophantine`] verifies on finite lattices; constructing a
/// `Frequency` does not assert that it holds.
#[derive(Debug, Clone, PartialEq)]
pub struct Frequency {
    omega: Vec<f64>,
    tau: f64,
    sigma: f64,
}

impl Frequency {
    pub fn new(omega: Vec<f64>, tau: f64, sigma: f64) -> Result<Self> {
        if omega.is_empty() {
            return Err(Error::InvalidParameter("frequency dimension must be at least 1".into()));
        }
        if omega.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("frequency coordinates must be finite".into()));
        }
        if !(tau > 0.0) || !tau.is_finite() {
            return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
        }
        if !(sigma >= 1.0) || !sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma must be >= 1, got {sigma}")));
        }
        Ok(Frequency { omega: omega.into_iter().map(reduce_unit).collect(), tau, sigma })
    }

    /// The golden-mean rotation `(sqrt(5) - 1) / 2` with `tau = 0.3`, `sigma = 1`.
    pub fn golden_mean() -> Self {
        Frequency { omega: vec![golden()], tau: 0.3, sigma: 1.0 }
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn dimension(&self) -> usize {
        self.omega.len()
    }

    /// Same metadata, different rotation vector. Used for perturbed
    /// frequencies, which carry no arithmetic assumption.
    pub fn with_omega(&self, omega: Vec<f64>) -> Result<Self> {
        Frequency::new(omega, self.tau, self.sigma)
    }

    /// Finite-scale `delta_0(K)`: the minimum of `||k.omega||` over
    /// `0 < |k|_inf <= K`.
    pub fn delta0(&self, k_max: u32) -> Result<f64> {
        min_torus_norm(self, k_max).map(|(d, _)| d)
    }
}

/// `(sqrt(5) - 1) / 2`.
pub fn golden() -> f64 {
    (libm::sqrt(5.0) - 1.0) / 2.0
}

/// `k . omega` summed in coordinate order.
#[inline]
pub fn lattice_dot(k: &[i64], omega: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (ki, wi) in k.iter().zip(omega) {
        acc += *ki as f64 * *wi;
    }
    acc
}

fn lattice_points(dimension: usize, k_max: u32) -> u128 {
    let side = 2 * k_max as u128 + 1;
    let mut total: u128 = 1;
    for _ in 0..dimension {
        total = total.saturating_mul(side);
    }
    total
}

/// Visits the nonzero `k` with `|k|_inf <= k_max` whose first nonzero
/// coordinate is positive, in lexicographic order.
///
/// `||(-k).omega|| = ||k.omega||` exactly in floating point, so this half
/// lattice carries every value of the full scan.
fn for_each_half_lattice<F: FnMut(&[i64]) -> bool>(dimension: usize, k_max: u32, mut visit: F) {
    let k_max = k_max as i64;
    let mut k = vec![-k_max; dimension];
    loop {
        if let Some(first) = k.iter().find(|c| **c != 0) {
            if *first > 0 && !visit(&k) {
                return;
            }
        }
        // odometer, last coordinate fastest
        let mut i = dimension;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if k[i] < k_max {
                k[i] += 1;
                break;
            }
            k[i] = -k_max;
        }
    }
}

fn check_budget(dimension: usize, k_max: u32, budget: u128) -> Result<()> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("lattice radius K must be at least 1".into()));
    }
    let points = lattice_points(dimension, k_max);
    if points > budget {
        return Err(Error::LatticeBudgetExceeded { points, budget });
    }
    Ok(())
}

/// Minimum of `||k.omega||` over `0 < |k|_inf <= k_max` and the
/// lexicographically first minimizer (whose first nonzero entry is positive).
///
/// Costs `(2K+1)^d` lattice visits; fails above
/// [`DEFAULT_LATTICE_BUDGET`].
pub fn min_torus_norm(omega: &Frequency, k_max: u32) -> Result<(f64, Vec<i64>)> {
    min_torus_norm_with_budget(omega, k_max, DEFAULT_LATTICE_BUDGET)
}

pub fn min_torus_norm_with_budget(
    omega: &Frequency,
    k_max: u32,
    budget: u128,
) -> Result<(f64, Vec<i64>)> {
    let d = omega.dimension();
    check_budget(d, k_max, budget)?;
    let mut best = f64::INFINITY;
    let mut arg = Vec::new();
    for_each_half_lattice(d, k_max, |k| {
        let v = torus_norm(lattice_dot(k, omega.omega()));
        if v < best {
            best = v;
            arg = k.to_vec();
        }
        true
    });
    Ok((best, arg))
}

/// Outcome of a finite Diophantine check.
#[derive(Debug, Clone, PartialEq)]
pub struct DiophantineCheck {
    pub holds: bool,
    pub first_violation: Option<Vec<i64>>,
}

/// Verifies `||k.omega|| > tau |k|_inf^-sigma` for all `0 < |k|_inf <= k_max`.
pub fn check_diophantine(omega: &Frequency, k_max: u32) -> Result<DiophantineCheck> {
    check_diophantine_with_budget(omega, k_max, DEFAULT_LATTICE_BUDGET)
}

pub fn check_diophantine_with_budget(
    omega: &Frequency,
    k_max: u32,
    budget: u128,
) -> Result<DiophantineCheck> {
    let d = omega.dimension();
    check_budget(d, k_max, budget)?;
    let mut violation = None;
    for_each_half_lattice(d, k_max, |k| {
        let sup = k.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0) as f64;
        let threshold = omega.tau() * libm::pow(sup, -omega.sigma());
        if !(torus_norm(lattice_dot(k, omega.omega())) > threshold) {
            violation = Some(k.to_vec());
            return false;
        }
        true
    });
    Ok(DiophantineCheck { holds: violation.is_none(), first_violation: violation })
}

/// The uniform lattice `{(j_1/M, ..., j_d/M)}` anchored at the origin.
///
/// Node `i` has digits `(j_1, ..., j_d)` in base `M` with the last coordinate
/// varying fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGrid {
    points_per_dim: usize,
    dimension: usize,
}

impl TorusGrid {
    pub fn new(points_per_dim: usize, dimension: usize) -> Result<Self> {
        if points_per_dim == 0 {
            return Err(Error::InvalidParameter("grid needs at least one point per dimension".into()));
        }
        if dimension == 0 {
            return Err(Error::InvalidParameter("grid dimension must be at least 1".into()));
        }
        let len = (points_per_dim as u128).checked_pow(dimension as u32);
        match len {
            Some(n) if n <= usize::MAX as u128 => {}
            _ => return Err(Error::InvalidParameter("grid node count overflows".into())),
        }
        Ok(TorusGrid { points_per_dim, dimension })
    }

    pub fn points_per_dim(&self) -> usize {
        self.points_per_dim
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// `M^d`.
    pub fn len(&self) -> usize {
        self.points_per_dim.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Writes the coordinates of node `index` into `out`.
    #[inline]
    pub fn node_into(&self, index: usize, out: &mut [f64]) {
        let m = self.points_per_dim;
        let mut rest = index;
        for slot in out.iter_mut().rev() {
            *slot = (rest % m) as f64 / m as f64;
            rest /= m;
        }
    }

    pub fn node(&self, index: usize) -> TorusPoint {
        let mut coords = vec![0.0; self.dimension];
        self.node_into(index, &mut coords);
        TorusPoint { coords }
    }
}
