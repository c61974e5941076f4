//! Gauss–Legendre rules and Legendre polynomials.

use crate::jet::Jet;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`,
/// nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `(P_n(x), P_n'(x))`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `P_l` applied to a jet, so derivatives follow the argument's variable.
pub fn legendre(l: usize, x: Jet) -> Jet {
    let mut p0 = Jet::constant(1.0);
    if l == 0 {
        return p0;
    }
    let mut p1 = x;
    for k in 1..l {
        let k = k as f64;
        let p2 = (x * p1 * (2.0 * k + 1.0) - p0 * k) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}
