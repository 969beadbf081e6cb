//! Ordinary least squares on a line.

/// `y ~ intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the residuals.
    pub residual: f64,
    pub points: usize,
}

impl LineFit {
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

/// Least-squares line through `(x_i, y_i)`. `None` with fewer than two
/// points or no spread in `x`.
pub fn least_squares(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss = 0.0;
    for i in 0..n {
        let r = y[i] - (intercept + slope * x[i]);
        ss += r * r;
    }
    Some(LineFit { slope, intercept, residual: libm::sqrt(ss / n as f64), points: n })
}

/// `ln(-ln t)`, defined for `0 < t < 1`.
pub fn log_neg_log(t: f64) -> Option<f64> {
    if t > 0.0 && t < 1.0 {
        let inner = -libm::log(t);
        if inner > 0.0 {
            return Some(libm::log(inner));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let f = least_squares(&x, &y).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-15);
        assert!((f.intercept - 1.0).abs() < 1e-15);
        assert!(f.residual < 1e-15);
        assert_eq!(f.predict(4.0), 9.0);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(least_squares(&[1.0], &[2.0]).is_none());
        assert!(least_squares(&[1.0, 1.0], &[2.0, 3.0]).is_none());
        assert!(log_neg_log(0.0).is_none());
        assert!(log_neg_log(1.0).is_none());
        assert!((log_neg_log(libm::exp(-libm::exp(1.0))).unwrap() - 1.0).abs() < 1e-15);
    }
}
