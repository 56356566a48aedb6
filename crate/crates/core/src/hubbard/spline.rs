//! Natural cubic splines on strictly increasing abscissae.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::Contract(format!(
                "spline needs matching abscissae and ordinates (got {} and {})",
                n,
                y.len()
            )));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Contract("spline abscissae must increase strictly".into()));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite spline ordinate".into()));
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm for the interior second derivatives.
            let mut c = vec![0.0; n];
            let mut r = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let a = h0 / 6.0;
                let b = (h0 + h1) / 3.0;
                let cc = h1 / 6.0;
                let rhs = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
                let denom = b - a * c[i - 1];
                c[i] = cc / denom;
                r[i] = (rhs - a * r[i - 1]) / denom;
            }
            for i in (1..n - 1).rev() {
                m[i] = r[i] - c[i] * m[i + 1];
            }
        }
        Ok(CubicSpline { x, y, m })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Value at `t`; the end intervals are extended for `t` outside the knots.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let k = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[k + 1] - self.x[k];
        let a = (self.x[k + 1] - t) / h;
        let b = (t - self.x[k]) / h;
        a * self.y[k]
            + b * self.y[k + 1]
            + ((a * a * a - a) * self.m[k] + (b * b * b - b) * self.m[k + 1]) * h * h / 6.0
    }
}

/// Spline that interpolates `ln |y|` when `y` keeps one strict sign, and `y`
/// itself otherwise. Tunneling rates fall off exponentially with separation,
/// so the logarithmic form is far more accurate between knots.
#[derive(Debug, Clone)]
pub struct RateSpline {
    inner: CubicSpline,
    /// `Some(sign)` when interpolating the log-magnitude.
    sign: Option<f64>,
}

impl RateSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let all_pos = y.iter().all(|&v| v > 0.0);
        let all_neg = y.iter().all(|&v| v < 0.0);
        if all_pos || all_neg {
            let sign = if all_pos { 1.0 } else { -1.0 };
            let ly = y.iter().map(|v| v.abs().ln()).collect();
            Ok(RateSpline {
                inner: CubicSpline::new(x, ly)?,
                sign: Some(sign),
            })
        } else {
            Ok(RateSpline {
                inner: CubicSpline::new(x, y)?,
                sign: None,
            })
        }
    }

    pub fn is_logarithmic(&self) -> bool {
        self.sign.is_some()
    }

    pub fn domain(&self) -> (f64, f64) {
        self.inner.domain()
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.sign {
            Some(s) => s * self.inner.eval(t).exp(),
            None => self.inner.eval(t),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots_and_cubics_are_close() {
        let x: Vec<f64> = (0..21).map(|i| i as f64 * 0.25).collect();
        let y: Vec<f64> = x.iter().map(|t| t.sin()).collect();
        let s = CubicSpline::new(x.clone(), y.clone()).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((s.eval(*a) - b).abs() < 1e-14);
        }
        assert!((s.eval(1.1) - 1.1f64.sin()).abs() < 1e-4);
    }

    #[test]
    fn log_spline_is_exact_for_exponentials() {
        let x: Vec<f64> = (0..13).map(|i| 3.0 + i as f64 * 0.5).collect();
        let y: Vec<f64> = x.iter().map(|t| -2.0 * (-1.7 * t).exp()).collect();
        let s = RateSpline::new(x, y).unwrap();
        assert!(s.is_logarithmic());
        let t: f64 = 4.23;
        let exact = -2.0 * (-1.7 * t).exp();
        assert!(((s.eval(t) - exact) / exact).abs() < 1e-12);
    }
}
