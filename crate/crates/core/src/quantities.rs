//! Per-sphere functionals on coordinate spheres and the Minkowski-type
//! inequalities evaluated on them.
//!
//! Every integrand here is constant on a coordinate sphere, so each surface
//! integral is exactly `integrand × area`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::metric::{unit_sphere_area, Dim, WarpedStaticMetric};
use crate::report::InequalityReport;

/// Geometry of the coordinate sphere `{r = const}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereReport {
    pub r: f64,
    pub area: f64,
    pub r0: f64,
    /// Mean curvature with respect to the outward normal.
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "V0")]
    pub v0: f64,
    #[serde(rename = "dV_dnu")]
    pub dv_dnu: f64,
    pub m0: f64,
    /// Hawking mass, `n = 3` only.
    pub hawking: Option<f64>,
    /// The `∫VH`-weighted analogue of the Hawking mass, `n = 3` only.
    pub q: Option<f64>,
}

pub fn sphere_geometry(g: &WarpedStaticMetric, r: f64) -> Result<SphereReport> {
    g.check_domain(r)?;
    let dim = g.dim();
    let n = dim.f();
    let w = unit_sphere_area(dim);
    let (a, b, v) = (g.a(r), g.b(r), g.potential(r));
    let sqrt_a = a.v.sqrt();
    let area = w * b.v.powf(n - 1.0);
    let r0 = (area / w).powf(1.0 / (n - 1.0));
    let h = (n - 1.0) * b.d1 / (b.v * sqrt_a);
    let (hawking, q) = if dim.get() == 3 {
        let int_h2 = h * h * area;
        let int_vh = v.v * h * area;
        (Some(0.5 * r0 * (1.0 - int_h2 / (16.0 * PI))), Some(0.5 * r0 * (1.0 - int_vh / (8.0 * PI * r0))))
    } else {
        (None, None)
    };
    Ok(SphereReport {
        r,
        area,
        r0,
        h,
        v0: v.v,
        dv_dnu: v.d1 / sqrt_a,
        m0: 0.5 * r0.powf(n - 2.0) * g.area_defect(r)?,
        hawking,
        q,
    })
}

/// Mass of the Schwarzschild coordinate sphere with area radius `r0` and mean
/// curvature `h0`: `(r0^{n-2}/2)(1 − r0² h0² / (n−1)²)`.
pub fn m0_of(n: Dim, r0: f64, h0: f64) -> f64 {
    let n = n.f();
    0.5 * r0.powf(n - 2.0) * (1.0 - r0 * r0 * h0 * h0 / ((n - 1.0) * (n - 1.0)))
}

/// `(1/((n−1)w)) ∫VH dσ + 2m ≥ (|Σ|/w)^{(n−2)/(n−1)}`, with `m` the ADM mass.
pub fn minkowski_check(g: &WarpedStaticMetric, r: f64, m: f64) -> Result<InequalityReport> {
    let s = sphere_geometry(g, r)?;
    let (n, w) = (g.dim().f(), unit_sphere_area(g.dim()));
    let lhs = s.v0 * s.h * s.area / ((n - 1.0) * w) + 2.0 * m;
    let rhs = (s.area / w).powf((n - 2.0) / (n - 1.0));
    Ok(InequalityReport::at_least("minkowski", lhs, rhs))
}

/// Equipotential-boundary inequality
/// `(1/((n−1)w)) (|Σ|/w)^{(2−n)/(n−1)} ∫H dσ ≥ V0`.
pub fn levelset_minkowski_check(g: &WarpedStaticMetric, r: f64) -> Result<InequalityReport> {
    let s = sphere_geometry(g, r)?;
    let (n, w) = (g.dim().f(), unit_sphere_area(g.dim()));
    let lhs = (s.area / w).powf((2.0 - n) / (n - 1.0)) * s.h * s.area / ((n - 1.0) * w);
    Ok(InequalityReport::at_least("levelset_minkowski", lhs, s.v0))
}

/// Willmore-type inequality `(∫H^{n−1} dσ)^{1/(n−1)} / ((n−1) w^{1/(n−1)}) ≥ V0`.
pub fn willmore_check(g: &WarpedStaticMetric, r: f64) -> Result<InequalityReport> {
    let s = sphere_geometry(g, r)?;
    let (n, w) = (g.dim().f(), unit_sphere_area(g.dim()));
    let int = s.h.powf(n - 1.0) * s.area;
    let lhs = int.powf(1.0 / (n - 1.0)) / ((n - 1.0) * w.powf(1.0 / (n - 1.0)));
    Ok(InequalityReport::at_least("willmore", lhs, s.v0))
}

/// Yamabe energy `(|Σ|/w)^{(3−n)/(n−1)} ∫R_σ dσ` of the round metric `r0² σ_std`.
pub fn yamabe_energy(n: Dim, r0: f64) -> f64 {
    let nf = n.f();
    let w = unit_sphere_area(n);
    let area = w * r0.powf(nf - 1.0);
    let scalar = (nf - 1.0) * (nf - 2.0) / (r0 * r0);
    (area / w).powf((3.0 - nf) / (nf - 1.0)) * scalar * area
}

/// `β = ∂V/∂ν + ((n−2)/(n−1)) V0 H`, constant on each coordinate sphere.
pub fn codazzi_beta(g: &WarpedStaticMetric, r: f64) -> Result<f64> {
    let s = sphere_geometry(g, r)?;
    let n = g.dim().f();
    Ok(s.dv_dnu + (n - 2.0) / (n - 1.0) * s.v0 * s.h)
}

/// Identity `m = (n−1) V0 m0 / (H0 r0)` between the flux mass and the
/// Schwarzschild-extension mass of a CMC equipotential sphere.
pub fn bartnik_mass_identity_check(g: &WarpedStaticMetric, r: f64) -> Result<InequalityReport> {
    let s = sphere_geometry(g, r)?;
    let n = g.dim().f();
    let lhs = g.adm_mass(r)?;
    let rhs = (n - 1.0) * s.v0 * s.m0 / (s.h * s.r0);
    Ok(InequalityReport::identity("bartnik_mass_identity", lhs, rhs))
}
