//! Stability operator of round CMC spheres and the Schwarzschild-stability
//! threshold.
//!
//! For an umbilic round sphere of area radius `r0` and mean curvature `H0`,
//! `S = −Δ − c` with the constant potential `c = |h|² + Ric(ν,ν)`, so the
//! spectrum on zero-mean functions is the shifted Laplace spectrum
//! `l(l+n−2)/r0² − c`, `l ≥ 1`.

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::grid::SphereGrid;
use crate::metric::Dim;
use crate::quantities::m0_of;
use crate::report::InequalityReport;

/// Default number of grid nodes for spectra.
pub const DEFAULT_NODES: usize = 512;

/// `c = n H0² / (2(n−1)) − (n−1)(n−2)/(2 r0²) + R_g/2`, from the Gauss
/// equation with vanishing traceless second fundamental form.
pub fn stability_potential(n: Dim, r0: f64, h0: f64, rg: f64) -> f64 {
    let n = n.f();
    n * h0 * h0 / (2.0 * (n - 1.0)) - (n - 1.0) * (n - 2.0) / (2.0 * r0 * r0) + 0.5 * rg
}

/// First eigenvalue of the stability operator: `(n−1)/r0² − c`.
pub fn lambda1_round(n: Dim, r0: f64, h0: f64, rg: f64) -> f64 {
    (n.f() - 1.0) / (r0 * r0) - stability_potential(n, r0, h0, rg)
}

/// `n(n−1) m0 / r0ⁿ`, the first stability eigenvalue of the Schwarzschild
/// coordinate sphere with the same `(r0, H0)`.
pub fn schwarzschild_stability_threshold(n: Dim, r0: f64, h0: f64) -> f64 {
    let nf = n.f();
    nf * (nf - 1.0) * m0_of(n, r0, h0) / r0.powf(nf)
}

/// The same expression with `r0^{n−1}` in the denominator. It is not
/// dimensionally consistent with `λ₁`; kept only so reports can show both.
pub fn threshold_r0_pow_n_minus_1(n: Dim, r0: f64, h0: f64) -> f64 {
    let nf = n.f();
    nf * (nf - 1.0) * m0_of(n, r0, h0) / r0.powf(nf - 1.0)
}

/// Eigenvalues of the symmetric tridiagonal matrix `(diag, off)` with index
/// `k` (ascending, zero-based), by Sturm-sequence bisection.
pub fn tridiagonal_eigenvalue(diag: &[f64], off: &[f64], k: usize) -> f64 {
    let n = diag.len();
    assert!(k < n);
    // Gershgorin bounds.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    // Number of eigenvalues strictly below x.
    let count_below = |x: f64| {
        let mut count = 0;
        let mut q = diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let prev = if q == 0.0 { f64::EPSILON * (off[i - 1].abs() + 1.0) } else { q };
            q = diag[i] - x - off[i - 1] * off[i - 1] / prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// First `l_max` nonzero eigenvalues of the discretised `−Δ` on the round
/// sphere of radius `r0`, restricted to axisymmetric functions, on a single
/// grid of `nodes` nodes. Second-order accurate in `1/nodes`.
pub fn laplace_spectrum_on_grid(n: Dim, r0: f64, l_max: usize, nodes: usize) -> Vec<f64> {
    let grid = SphereGrid::new(n.get(), nodes);
    let (diag, off) = grid.symmetric_negative_laplacian();
    // Index 0 is the constant mode (exact kernel); skip it.
    (1..=l_max).map(|k| tridiagonal_eigenvalue(&diag, &off, k) / (r0 * r0)).collect()
}

/// Axisymmetric Laplace spectrum `l(l+n−2)/r0²`, `l = 1..=l_max`, from the
/// grids with `N` and `2N` nodes combined by Richardson extrapolation.
pub fn laplace_spectrum_axisymmetric(n: Dim, r0: f64, l_max: usize, nodes: usize) -> Result<Vec<f64>> {
    if l_max == 0 || nodes < 8 * l_max {
        return Err(GeoError::Parameter(format!("need N >= 8 l_max, got N = {nodes}, l_max = {l_max}")));
    }
    let coarse = laplace_spectrum_on_grid(n, r0, l_max, nodes);
    let fine = laplace_spectrum_on_grid(n, r0, l_max, 2 * nodes);
    Ok(coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySpectrum {
    pub n: Dim,
    pub r0: f64,
    #[serde(rename = "H0")]
    pub h0: f64,
    pub c: f64,
    /// Ascending eigenvalues of the stability operator on zero-mean functions.
    pub eigenvalues: Vec<f64>,
    pub threshold: f64,
    pub threshold_r0_pow_n_minus_1: f64,
}

pub fn stability_spectrum(n: Dim, r0: f64, h0: f64, rg: f64, l_max: usize, nodes: usize) -> Result<StabilitySpectrum> {
    let c = stability_potential(n, r0, h0, rg);
    let eigenvalues = laplace_spectrum_axisymmetric(n, r0, l_max, nodes)?.into_iter().map(|l| l - c).collect();
    Ok(StabilitySpectrum {
        n,
        r0,
        h0,
        c,
        eigenvalues,
        threshold: schwarzschild_stability_threshold(n, r0, h0),
        threshold_r0_pow_n_minus_1: threshold_r0_pow_n_minus_1(n, r0, h0),
    })
}

/// `λ₁(S) ≤ threshold − R_g/2`, with equality for umbilic round data.
///
/// Both sides are small differences of terms of size `n(n−1)/(2r0²)`, so the
/// slack is relative to that size as well.
pub fn eigenvalue_bound_check(n: Dim, r0: f64, h0: f64, rg: f64) -> InequalityReport {
    let lhs = schwarzschild_stability_threshold(n, r0, h0) - 0.5 * rg;
    let rhs = lambda1_round(n, r0, h0, rg);
    let terms = n.f() * (n.f() - 1.0) / (2.0 * r0 * r0) + 0.5 * rg.abs();
    let scale = terms.max(lhs.abs()).max(rhs.abs()).max(1.0);
    InequalityReport::from_slack("eigenvalue_bound", lhs, rhs, (lhs - rhs) / scale)
}

/// Smallest eigenvalue of `−Δ − ((n−1)/r0² − n(n−1)m0/r0ⁿ)` on zero-mean
/// axisymmetric functions. A positive value means the only solution of the
/// extension equation is trivial.
pub fn extension_kernel_check(n: Dim, r0: f64, h0: f64, nodes: usize) -> Result<InequalityReport> {
    let m0 = m0_of(n, r0, h0);
    if !(m0 > 0.0) {
        return Err(GeoError::Hypothesis(format!("needs m0 > 0, got {m0}")));
    }
    let shift = (n.f() - 1.0) / (r0 * r0) - schwarzschild_stability_threshold(n, r0, h0);
    let lowest = laplace_spectrum_axisymmetric(n, r0, 1, nodes)?[0] - shift;
    Ok(InequalityReport::at_least("extension_kernel", lowest, 0.0))
}

/// Smallest eigenvalue of the same operator without the `m0 > 0` hypothesis.
pub fn extension_operator_lowest(n: Dim, r0: f64, h0: f64, nodes: usize) -> Result<f64> {
    let shift = (n.f() - 1.0) / (r0 * r0) - schwarzschild_stability_threshold(n, r0, h0);
    Ok(laplace_spectrum_axisymmetric(n, r0, 1, nodes)?[0] - shift)
}
