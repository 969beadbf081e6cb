use core::ops::{Add, Mul, Neg, Sub};

use crate::C64;

/// A 2x2 complex matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2C {
    pub a11: C64,
    pub a12: C64,
    pub a21: C64,
    pub a22: C64,
}

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

impl Mat2C {
    pub const fn new(a11: C64, a12: C64, a21: C64, a22: C64) -> Self {
        Mat2C { a11, a12, a21, a22 }
    }

    pub const fn real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2C {
            a11: C64 { re: a11, im: 0.0 },
            a12: C64 { re: a12, im: 0.0 },
            a21: C64 { re: a21, im: 0.0 },
            a22: C64 { re: a22, im: 0.0 },
        }
    }

    pub const fn zero() -> Self {
        Mat2C::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn identity() -> Self {
        Mat2C::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn diag(d1: C64, d2: C64) -> Self {
        Mat2C::new(d1, ZERO, ZERO, d2)
    }

    /// Rotation by `theta` radians.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = libm::sincos(theta);
        Mat2C::real(c, -s, s, c)
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn det(&self) -> C64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> C64 {
        self.a11 + self.a22
    }

    pub fn scale(&self, c: C64) -> Self {
        Mat2C::new(self.a11 * c, self.a12 * c, self.a21 * c, self.a22 * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Mat2C::new(self.a11 * c, self.a12 * c, self.a21 * c, self.a22 * c)
    }

    /// Exact multiplication by `2^exp`.
    #[inline]
    pub fn scale_pow2(&self, exp: i32) -> Self {
        let f = |z: C64| C64::new(libm::scalbn(z.re, exp), libm::scalbn(z.im, exp));
        Mat2C::new(f(self.a11), f(self.a12), f(self.a21), f(self.a22))
    }

    /// `max |entry|^2`.
    #[inline]
    pub fn max_abs_sqr(&self) -> f64 {
        self.a11
            .norm_sqr()
            .max(self.a12.norm_sqr())
            .max(self.a21.norm_sqr())
            .max(self.a22.norm_sqr())
    }

    /// Sum of squared entry moduli.
    pub fn frobenius_sqr(&self) -> f64 {
        self.a11.norm_sqr() + self.a12.norm_sqr() + self.a21.norm_sqr() + self.a22.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest singular value.
    ///
    /// Equal to `sqrt((f + sqrt(f^2 - 4|det|^2)) / 2)` with `f` the squared
    /// Frobenius norm, evaluated through the Gram matrix `M*M = [[p, w], [w*, s]]`
    /// as `(p + s)/2 + sqrt(((p - s)/2)^2 + |w|^2)`, which has no cancellation.
    pub fn operator_norm(&self) -> f64 {
        let mx = self.entries().iter().map(|c| c.norm()).fold(0.0, f64::max);
        if mx == 0.0 {
            return 0.0;
        }
        // keep the squares in range
        let (m, e) = if !(1e-100..=1e100).contains(&mx) {
            let (_, e2) = libm::frexp(mx);
            (self.scale_pow2(-e2), -e2)
        } else {
            (*self, 0)
        };
        let p = m.a11.norm_sqr() + m.a21.norm_sqr();
        let s = m.a12.norm_sqr() + m.a22.norm_sqr();
        let w = m.a11.conj() * m.a12 + m.a21.conj() * m.a22;
        let half_diff = 0.5 * (p - s);
        let lam = 0.5 * (p + s) + libm::sqrt(half_diff * half_diff + w.norm_sqr());
        libm::scalbn(libm::sqrt(lam), -e)
    }
}

impl Add for Mat2C {
    type Output = Mat2C;
    fn add(self, o: Mat2C) -> Mat2C {
        Mat2C::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl Sub for Mat2C {
    type Output = Mat2C;
    fn sub(self, o: Mat2C) -> Mat2C {
        Mat2C::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }
}

impl Neg for Mat2C {
    type Output = Mat2C;
    fn neg(self) -> Mat2C {
        self.scale_real(-1.0)
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    #[inline]
    fn mul(self, o: Mat2C) -> Mat2C {
        Mat2C::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

impl Mul<C64> for Mat2C {
    type Output = Mat2C;
    fn mul(self, c: C64) -> Mat2C {
        self.scale(c)
    }
}
