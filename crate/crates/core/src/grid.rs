//! Cell-centred grid on `(0, π)` for axisymmetric functions on the round
//! `(n−1)`-sphere, with the conservative second-order discretisation of
//! `u_θθ + (n−2) cot θ u_θ`.
//!
//! Nodes sit at `θ_i = (i + ½)h`, `h = π/N`. The operator is written in flux
//! form `sin^{-p}θ ∂_θ(sin^p θ ∂_θ u)`, `p = n − 2`; the face weights vanish at
//! both poles, which is the even reflection `u_{-1} = u_0`, `u_N = u_{N−1}`
//! with the pole fluxes suppressed. The operator is symmetric in the
//! `sin^p θ`-weighted inner product and annihilates constants.

use std::f64::consts::PI;

use crate::quadrature::gauss_legendre;

/// Gauss nodes per cell for the cell averages of `sin^p θ`; exact to rounding.
const CELL_NODES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    pub n: usize,
    pub h: f64,
    pub theta: Vec<f64>,
    /// Cell average of `sin^p θ` over `[θ_{i−½}, θ_{i+½}]`.
    pub cell_weight: Vec<f64>,
    /// `sin^p θ_{i+½}` for faces `0..=N`.
    pub face_weight: Vec<f64>,
}

impl SphereGrid {
    pub fn new(n_dim: usize, nodes: usize) -> Self {
        let p = n_dim as i32 - 2;
        let h = PI / nodes as f64;
        let theta: Vec<f64> = (0..nodes).map(|i| (i as f64 + 0.5) * h).collect();
        let (gx, gw) = gauss_legendre(CELL_NODES);
        let cell_weight = theta
            .iter()
            .map(|&c| gx.iter().zip(&gw).map(|(x, w)| 0.5 * w * (c + 0.5 * h * x).sin().powi(p)).sum())
            .collect();
        let mut face_weight: Vec<f64> = (0..=nodes).map(|i| (i as f64 * h).sin().powi(p)).collect();
        face_weight[0] = 0.0;
        face_weight[nodes] = 0.0;
        Self { n: n_dim, h, theta, cell_weight, face_weight }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// `u_θθ + (n−2) cot θ u_θ` at every node (unit sphere).
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let n = u.len();
        let h2 = self.h * self.h;
        for i in 0..n {
            let right = if i + 1 < n { self.face_weight[i + 1] * (u[i + 1] - u[i]) } else { 0.0 };
            let left = if i > 0 { self.face_weight[i] * (u[i] - u[i - 1]) } else { 0.0 };
            out[i] = (right - left) / (h2 * self.cell_weight[i]);
        }
    }

    /// Tridiagonal entries `(diag, off)` of the symmetrised positive operator
    /// `W^{1/2}(−L)W^{-1/2}`, where `W = diag(cell_weight)`; `off[i]` couples
    /// nodes `i` and `i+1`.
    pub fn symmetric_negative_laplacian(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.len();
        let h2 = self.h * self.h;
        let diag =
            (0..n).map(|i| (self.face_weight[i] + self.face_weight[i + 1]) / (h2 * self.cell_weight[i])).collect();
        let off = (0..n - 1)
            .map(|i| -self.face_weight[i + 1] / (h2 * (self.cell_weight[i] * self.cell_weight[i + 1]).sqrt()))
            .collect();
        (diag, off)
    }

    /// Pairwise averages onto the grid with half as many nodes.
    pub fn restrict(fine: &[f64]) -> Vec<f64> {
        fine.chunks_exact(2).map(|c| 0.5 * (c[0] + c[1])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_in_the_kernel() {
        let g = SphereGrid::new(5, 64);
        let mut out = vec![1.0; 64];
        g.apply(&vec![3.0; 64], &mut out);
        assert!(out.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn first_harmonic_is_second_order() {
        // cos θ is an eigenfunction with eigenvalue −(n−1).
        let errs: Vec<f64> = [64, 128]
            .iter()
            .map(|&nodes| {
                let g = SphereGrid::new(4, nodes);
                let u: Vec<f64> = g.theta.iter().map(|t| t.cos()).collect();
                let mut out = vec![0.0; nodes];
                g.apply(&u, &mut out);
                out.iter().zip(&u).map(|(o, u)| (o + 3.0 * u).abs()).fold(0.0, f64::max)
            })
            .collect();
        let ratio = errs[0] / errs[1];
        assert!(ratio > 3.5 && ratio < 4.5, "{errs:?}");
    }

    #[test]
    fn cell_weights_integrate_the_measure() {
        for n in 3..=7 {
            let g = SphereGrid::new(n, 200);
            let total: f64 = g.cell_weight.iter().sum::<f64>() * g.h;
            // Wallis: ∫_0^π sin^p = ((p−1)/p) ∫_0^π sin^{p−2}.
            let wallis = |p: usize| {
                (2..=p)
                    .rev()
                    .step_by(2)
                    .fold(if p.is_multiple_of(2) { PI } else { 2.0 }, |acc, k| acc * (k as f64 - 1.0) / k as f64)
            };
            let exact = wallis(n - 2);
            assert!((total - exact).abs() < 1e-13, "{n}: {total} vs {exact}");
            // The pole cell keeps full relative accuracy: ∫_0^h sin^p ≈ h^{p+1}/(p+1).
            let p = n as i32 - 2;
            let approx = g.h.powi(p) / f64::from(p + 1);
            assert!((g.cell_weight[0] / approx - 1.0).abs() < 1e-3, "{n}");
        }
    }
}
