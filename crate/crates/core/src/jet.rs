//! Second-order forward-mode derivatives.
//!
//! A [`Jet`] carries `(f, f', f'')` of a scalar with respect to one
//! independent variable. Arithmetic propagates both derivatives by the chain
//! rule, which lets metric coefficients be built from closed forms (or from
//! other coefficients) without hand-differentiating every expression.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub const fn new(v: f64, d1: f64, d2: f64) -> Self {
        Self { v, d1, d2 }
    }

    /// The independent variable itself.
    pub const fn var(x: f64) -> Self {
        Self::new(x, 1.0, 0.0)
    }

    pub const fn constant(c: f64) -> Self {
        Self::new(c, 0.0, 0.0)
    }

    /// Apply an outer function given its value and first two derivatives at `self.v`.
    #[inline]
    pub fn chain(self, g: f64, g1: f64, g2: f64) -> Self {
        Self::new(g, g1 * self.d1, g2 * self.d1 * self.d1 + g1 * self.d2)
    }

    pub fn powf(self, p: f64) -> Self {
        let x = self.v;
        self.chain(x.powf(p), p * x.powf(p - 1.0), p * (p - 1.0) * x.powf(p - 2.0))
    }

    pub fn powi(self, k: i32) -> Self {
        let x = self.v;
        let kf = k as f64;
        self.chain(x.powi(k), kf * x.powi(k - 1), kf * (kf - 1.0) * x.powi(k - 2))
    }

    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn recip(self) -> Self {
        let x = self.v;
        self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }

    pub fn ln(self) -> Self {
        let x = self.v;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }
}

impl From<f64> for Jet {
    fn from(c: f64) -> Self {
        Jet::constant(c)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet::new(self.v * o.v, self.d1 * o.v + self.v * o.d1, self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-self.v, -self.d1, -self.d2)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(self, c: f64) -> Jet {
        Jet::new(self.v + c, self.d1, self.d2)
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(self, c: f64) -> Jet {
        Jet::new(self.v - c, self.d1, self.d2)
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, c: f64) -> Jet {
        Jet::new(self.v * c, self.d1 * c, self.d2 * c)
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, c: f64) -> Jet {
        Jet::new(self.v / c, self.d1 / c, self.d2 / c)
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, j: Jet) -> Jet {
        j + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, j: Jet) -> Jet {
        -j + self
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, j: Jet) -> Jet {
        j * self
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div<Jet> for f64 {
    type Output = Jet;
    fn div(self, j: Jet) -> Jet {
        j.recip() * self
    }
}
