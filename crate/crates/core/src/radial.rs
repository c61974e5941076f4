//! Radial coefficient functions `r ↦ (f, f', f'')`.

use std::fmt;
use std::sync::Arc;

use crate::error::{GeoError, Result};
use crate::jet::Jet;

/// A scalar function of the radial coordinate with exact first and second
/// derivatives.
#[derive(Clone)]
pub struct RadialFn {
    eval: Arc<dyn Fn(f64) -> Jet + Send + Sync>,
}

impl RadialFn {
    /// Wrap a closure that already returns derivatives.
    pub fn new(f: impl Fn(f64) -> Jet + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(f) }
    }

    /// Build from an expression in the radial variable; derivatives come from
    /// forward-mode propagation.
    pub fn from_expr(f: impl Fn(Jet) -> Jet + Send + Sync + 'static) -> Self {
        Self::new(move |r| f(Jet::var(r)))
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| Jet::constant(c))
    }

    /// Natural cubic spline through tabulated samples.
    pub fn spline(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let s = CubicSpline::new(x, y, EndCondition::Natural)?;
        Ok(Self::new(move |r| s.eval(r)))
    }

    #[inline]
    pub fn eval(&self, r: f64) -> Jet {
        (self.eval)(r)
    }

    /// Pointwise composition `r ↦ g(self(r))` with `g` given on jets.
    pub fn map(&self, g: impl Fn(Jet) -> Jet + Send + Sync + 'static) -> Self {
        let inner = self.clone();
        Self::new(move |r| g(inner.eval(r)))
    }

    /// Largest relative mismatch between the reported derivatives and centered
    /// finite differences at `r` (step `1e-6·max(1, r)`).
    pub fn derivative_mismatch(&self, r: f64) -> (f64, f64) {
        let h = 1e-6 * r.abs().max(1.0);
        let (p, m) = (self.eval(r + h), self.eval(r - h));
        let j = self.eval(r);
        let fd1 = (p.v - m.v) / (2.0 * h);
        let fd2 = (p.d1 - m.d1) / (2.0 * h);
        let rel = |exact: f64, approx: f64| (exact - approx).abs() / exact.abs().max(1.0);
        (rel(j.d1, fd1), rel(j.d2, fd2))
    }
}

impl fmt::Debug for RadialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("RadialFn")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndCondition {
    /// Zero second derivative at both ends.
    Natural,
    /// Prescribed first derivatives at the two ends.
    Clamped(f64, f64),
}

/// Interpolating cubic spline. Outside the knot range it continues linearly
/// with the end slope.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>, end: EndCondition) -> Result<Self> {
        let n = x.len();
        if n < 3 {
            return Err(GeoError::Table(format!("need at least 3 knots, got {n}")));
        }
        if y.len() != n {
            return Err(GeoError::Table(format!("{} abscissae but {} values", n, y.len())));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(GeoError::Table("non-finite sample".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GeoError::Table("abscissae must be strictly increasing".into()));
        }

        // Tridiagonal system for the knot second derivatives.
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        match end {
            EndCondition::Natural => {
                diag[0] = 1.0;
                diag[n - 1] = 1.0;
            }
            EndCondition::Clamped(d0, dn) => {
                diag[0] = h[0] / 3.0;
                sup[0] = h[0] / 6.0;
                rhs[0] = (y[1] - y[0]) / h[0] - d0;
                sub[n - 1] = h[n - 2] / 6.0;
                diag[n - 1] = h[n - 2] / 3.0;
                rhs[n - 1] = dn - (y[n - 1] - y[n - 2]) / h[n - 2];
            }
        }
        for i in 1..n - 1 {
            sub[i] = h[i - 1] / 6.0;
            diag[i] = (h[i - 1] + h[i]) / 3.0;
            sup[i] = h[i] / 6.0;
            rhs[i] = (y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1];
        }
        let m = solve_tridiagonal(&sub, &diag, &sup, &rhs);
        Ok(Self { x, y, m })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn eval(&self, t: f64) -> Jet {
        let n = self.x.len();
        if t < self.x[0] {
            let j = self.eval(self.x[0]);
            return Jet::new(j.v + j.d1 * (t - self.x[0]), j.d1, 0.0);
        }
        if t > self.x[n - 1] {
            let j = self.eval(self.x[n - 1]);
            return Jet::new(j.v + j.d1 * (t - self.x[n - 1]), j.d1, 0.0);
        }
        let i = match self.x.partition_point(|&k| k <= t) {
            0 => 0,
            p => (p - 1).min(n - 2),
        };
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let (a, b) = ((x1 - t) / h, (t - x0) / h);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let v = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d1 = (y1 - y0) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0 + (3.0 * b * b - 1.0) * h * m1 / 6.0;
        let d2 = a * m0 + b * m1;
        Jet::new(v, d1, d2)
    }
}

/// Thomas algorithm; the systems built here are diagonally dominant.
pub(crate) fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let den = diag[i] - sub[i] * c[i - 1];
        c[i] = if i + 1 < n { sup[i] / den } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}
