//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use cocycle_core::jacobi::TruncatedOperator;
use cocycle_core::torus::shift_into;
use cocycle_core::{AnalyticCocycle, Mat2C, C64};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Fractional bits of the fixed-point oracle.
pub const FIXED_BITS: u32 = 200;

fn to_fixed(v: f64) -> BigInt {
    // exact: every finite double is m * 2^e with |m| < 2^53
    if v == 0.0 {
        return BigInt::from(0);
    }
    let (m, e) = {
        let bits = v.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        (if v < 0.0 { -(m as i128) } else { m as i128 }, e)
    };
    let shift = e + FIXED_BITS as i32;
    let m = BigInt::from(m);
    if shift >= 0 {
        m << shift as usize
    } else {
        m >> (-shift) as usize
    }
}

/// `ln` of a huge integer scaled by `2^-FIXED_BITS`.
fn big_to_scaled(v: &BigInt, drop: u64) -> f64 {
    let s = v >> drop as usize;
    let (sign, digits) = s.to_u64_digits();
    let mut x = 0.0f64;
    for d in digits.iter().rev() {
        x = x * 18446744073709551616.0 + *d as f64;
    }
    if sign == num_bigint::Sign::Minus {
        -x
    } else {
        x
    }
}

/// `ln ||prod_{j = N-1}^{0} F_j||` for real factors, computed exactly in
/// fixed point with 200 fractional bits (truncating after each multiply).
pub fn fixed_point_log_norm(factors: &[[f64; 4]]) -> f64 {
    let one = BigInt::from(1) << FIXED_BITS as usize;
    let zero = BigInt::from(0);
    let mut p = [one.clone(), zero.clone(), zero, one];
    for f in factors {
        let f: Vec<BigInt> = f.iter().map(|&v| to_fixed(v)).collect();
        let r = [
            (&f[0] * &p[0] + &f[1] * &p[2]) >> FIXED_BITS as usize,
            (&f[0] * &p[1] + &f[1] * &p[3]) >> FIXED_BITS as usize,
            (&f[2] * &p[0] + &f[3] * &p[2]) >> FIXED_BITS as usize,
            (&f[2] * &p[1] + &f[3] * &p[3]) >> FIXED_BITS as usize,
        ];
        p = r;
    }
    let bits = p.iter().map(|v| v.bits()).max().unwrap();
    let drop = bits.saturating_sub(60);
    let e: Vec<f64> = p.iter().map(|v| big_to_scaled(v, drop)).collect();
    // largest singular value of [[a, b], [c, d]]
    let (a, b, c, d) = (e[0], e[1], e[2], e[3]);
    let f = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    let s2 = 0.5 * (f + (f * f - 4.0 * det * det).max(0.0).sqrt());
    0.5 * s2.ln() + (drop as f64 - FIXED_BITS as f64) * std::f64::consts::LN_2
}

/// The real factors `A(x + j omega)`, `j = 0..n`, as the library evaluates them.
pub fn real_factors(a: &AnalyticCocycle, omega: &[f64], x: &[f64], n: usize) -> Vec<[f64; 4]> {
    let mut y = vec![0.0; x.len()];
    (0..n)
        .map(|j| {
            shift_into(x, omega, j as u64, &mut y);
            let m = a.evaluate_real(&y);
            let e = m.entries();
            // basis rounding leaves ~1e-16 imaginary parts on a real cocycle
            assert!(e.iter().all(|c| c.im.abs() < 1e-13), "oracle needs a real cocycle");
            [e[0].re, e[1].re, e[2].re, e[3].re]
        })
        .collect()
}

/// Plain `f64` product without rescaling.
pub fn direct_product(factors: &[Mat2C]) -> Mat2C {
    factors.iter().fold(Mat2C::identity(), |acc, f| *f * acc)
}

/// Eigenvalues from nalgebra's dense Hermitian solver.
pub fn dense_eigenvalues(t: &TruncatedOperator) -> Vec<f64> {
    let n = t.size();
    let mut h = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = C64::new(t.diag()[i], 0.0);
    }
    for i in 0..n - 1 {
        let c = t.offdiag()[i];
        h[(i, i + 1)] = c;
        h[(i + 1, i)] = c.conj();
    }
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Hermitian tridiagonal with `n <= n_max`, entries of modulus up to 3.
pub fn random_tridiagonal(rng: &mut ChaCha8Rng, n_max: usize) -> TruncatedOperator {
    let n = rng.random_range(1..=n_max);
    let diag = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
    let off = (0..n - 1)
        .map(|_| C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
        .collect();
    TruncatedOperator::from_parts(diag, off).unwrap()
}

/// A probe energy at least `gap` away from every eigenvalue.
pub fn separated_energy(rng: &mut ChaCha8Rng, ev: &[f64], gap: f64) -> f64 {
    let lo = ev[0] - 1.0;
    let hi = ev[ev.len() - 1] + 1.0;
    loop {
        let e = rng.random_range(lo..hi);
        if ev.iter().all(|&v| (v - e).abs() > gap) {
            return e;
        }
    }
}

/// Whether `log|det|` of the rescaled `n`-step product at `x` can be trusted to 1e-9.
///
/// Rounding at step `j` perturbs `det P_j` by about `cond(P_j) * eps` in relative
/// terms, `cond = ||P||^2 / |det P|`, and the perturbations add up along the
/// product; this keeps their sum below 1e-10 and excludes clamped factors.
pub fn det_check_eligible(a: &AnalyticCocycle, omega: &[f64], x: &[f64], n: usize) -> bool {
    let mut y = vec![0.0; x.len()];
    let mut acc = Mat2C::identity();
    let (mut log_scale, mut log_det, mut err) = (0.0f64, 0.0f64, 0.0f64);
    for j in 0..n {
        shift_into(x, omega, j as u64, &mut y);
        let f = a.evaluate_real(&y);
        let ld = f.det().norm().ln();
        if !(ld >= -700.0) {
            return false;
        }
        log_det += ld;
        acc = f * acc;
        let m = acc.operator_norm();
        if !(m > 0.0) {
            return false;
        }
        let e = m.log2().floor() as i32;
        acc = acc.scale_pow2(-e);
        log_scale += e as f64 * std::f64::consts::LN_2;
        let log_norm = acc.operator_norm().ln() + log_scale;
        err += (2.0 * log_norm - log_det).exp() * f64::EPSILON;
    }
    err < 1e-10
}
