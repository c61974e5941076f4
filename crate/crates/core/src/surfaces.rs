//! Axisymmetric surfaces `r = ρ(θ)` in three-dimensional warped static
//! metrics.
//!
//! Integrals use `∫f dσ = 2π ∫_{−1}^{1} f √σ_θθ b(ρ) d(cos θ)` with a
//! Gauss–Legendre rule in `cos θ`, which never samples the poles.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::conformal::flipped_mean_curvature;
use crate::error::{GeoError, Result};
use crate::jet::Jet;
use crate::metric::WarpedStaticMetric;
use crate::quadrature::{gauss_legendre, legendre};
use crate::radial::{CubicSpline, EndCondition};
use crate::report::InequalityReport;

pub const DEFAULT_NODES: usize = 128;

/// Relative change on node doubling above which integrals are rejected.
pub const RESOLUTION_TOL: f64 = 1e-6;

/// Profile `θ ↦ ρ(θ)` with derivatives in `θ`.
#[derive(Clone)]
pub enum Profile {
    /// `ρ = r0 (1 + Σ ε_l P_l(cos θ))`.
    Legendre {
        r0: f64,
        coeffs: BTreeMap<usize, f64>,
    },
    /// Spline through samples on `[0, π]`, clamped to zero slope at the poles.
    Table(CubicSpline),
    Closed(Arc<dyn Fn(Jet) -> Jet + Send + Sync>),
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Legendre { r0, coeffs } => {
                f.debug_struct("Legendre").field("r0", r0).field("coeffs", coeffs).finish()
            }
            Profile::Table(s) => f.debug_tuple("Table").field(&s.knots().len()).finish(),
            Profile::Closed(_) => f.write_str("Closed"),
        }
    }
}

impl Profile {
    pub fn round(r0: f64) -> Self {
        Profile::Legendre { r0, coeffs: BTreeMap::new() }
    }

    /// `r0 (1 + ε P_2(cos θ))`.
    pub fn p2(r0: f64, eps: f64) -> Self {
        Profile::Legendre { r0, coeffs: BTreeMap::from([(2, eps)]) }
    }

    /// Euclidean sphere of radius `radius` whose centre sits at distance
    /// `offset` along the axis: `ρ = d cos θ + √(R² − d² sin² θ)`.
    pub fn off_center_sphere(radius: f64, offset: f64) -> Self {
        Profile::Closed(Arc::new(move |th: Jet| {
            let s = th.sin();
            th.cos() * offset + (radius * radius - s * s * (offset * offset)).sqrt()
        }))
    }

    pub fn eval(&self, theta: f64) -> Jet {
        match self {
            Profile::Legendre { r0, coeffs } => {
                let x = Jet::var(theta).cos();
                let mut sum = Jet::constant(1.0);
                for (&l, &eps) in coeffs {
                    sum = sum + legendre(l, x) * eps;
                }
                sum * *r0
            }
            Profile::Table(s) => s.eval(theta),
            Profile::Closed(f) => f(Jet::var(theta)),
        }
    }
}

/// JSON profile document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ProfileSpec {
    Legendre { r0: f64, coeffs: BTreeMap<String, f64> },
    Table { theta: Vec<f64>, rho: Vec<f64> },
}

impl ProfileSpec {
    pub fn into_profile(self) -> Result<Profile> {
        match self {
            ProfileSpec::Legendre { r0, coeffs } => {
                let mut out = BTreeMap::new();
                for (k, v) in coeffs {
                    let l: usize =
                        k.trim().parse().map_err(|_| GeoError::Parameter(format!("bad Legendre degree {k:?}")))?;
                    out.insert(l, v);
                }
                Ok(Profile::Legendre { r0, coeffs: out })
            }
            ProfileSpec::Table { theta, rho } => {
                let (first, last) = match (theta.first(), theta.last()) {
                    (Some(&a), Some(&b)) => (a, b),
                    _ => return Err(GeoError::Table("empty profile table".into())),
                };
                if first.abs() > 1e-12 || (last - PI).abs() > 1e-12 {
                    return Err(GeoError::Table("profile table must span [0, π]".into()));
                }
                Ok(Profile::Table(CubicSpline::new(theta, rho, EndCondition::Clamped(0.0, 0.0))?))
            }
        }
    }
}

pub fn load_profile(path: &Path) -> Result<Profile> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str::<ProfileSpec>(&text)?.into_profile()
}

#[derive(Debug, Clone)]
pub struct AxiSurface {
    metric: WarpedStaticMetric,
    profile: Profile,
    nodes: usize,
}

/// Pointwise geometry of the surface at one polar angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InducedGeometry {
    pub sigma_thth: f64,
    pub sigma_phph: f64,
    /// `√(σ_θθ σ_φφ)`, the density against `dθ dφ`.
    pub area_element: f64,
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "dV_dnu")]
    pub dv_dnu: f64,
}

impl AxiSurface {
    pub fn new(metric: WarpedStaticMetric, profile: Profile) -> Result<Self> {
        Self::with_nodes(metric, profile, DEFAULT_NODES)
    }

    pub fn with_nodes(metric: WarpedStaticMetric, profile: Profile, nodes: usize) -> Result<Self> {
        if metric.dim().get() != 3 {
            return Err(GeoError::Parameter(format!("surfaces need n = 3, got {}", metric.dim())));
        }
        if nodes < 8 {
            return Err(GeoError::Parameter(format!("need at least 8 quadrature nodes, got {nodes}")));
        }
        for end in [0.0, PI] {
            let slope = profile.eval(end).d1;
            if slope.abs() > 1e-10 {
                return Err(GeoError::Parameter(format!("profile not regular at θ = {end}: ρ' = {slope}")));
            }
        }
        for i in 0..=512 {
            let rho = profile.eval(PI * i as f64 / 512.0).v;
            if !(rho > metric.r_min()) {
                return Err(GeoError::Domain { r: rho, r_min: metric.r_min() });
            }
        }
        Ok(Self { metric, profile, nodes })
    }

    pub fn metric(&self) -> &WarpedStaticMetric {
        &self.metric
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn with_node_count(&self, nodes: usize) -> Self {
        Self { nodes, ..self.clone() }
    }

    /// Induced metric and mean curvature (outward normal) of the graph
    /// `r = ρ(θ)`, with `θ ∈ (0, π)`.
    pub fn induced_geometry(&self, theta: f64) -> Result<InducedGeometry> {
        if !(theta > 0.0 && theta < PI) {
            return Err(GeoError::Parameter(format!("θ = {theta} outside (0, π)")));
        }
        let rho = self.profile.eval(theta);
        let (p, q) = (rho.d1, rho.d2);
        let a = self.metric.a(rho.v);
        let b = self.metric.b(rho.v);
        let v = self.metric.potential(rho.v);
        let (sin, cos) = theta.sin_cos();
        let sqrt_a = a.v.sqrt();

        // ν = ∇F/|∇F| for F = r − ρ(θ); H = div ν.
        let norm = (1.0 / a.v + p * p / (b.v * b.v)).sqrt();
        let dnorm_r = (-a.d1 / (a.v * a.v) - 2.0 * p * p * b.d1 / b.v.powi(3)) / (2.0 * norm);
        let dnorm_th = p * q / (b.v * b.v * norm);
        let flux_r = 2.0 * b.v * b.d1 / (sqrt_a * norm)
            - 0.5 * a.d1 * b.v * b.v / (a.v * sqrt_a * norm)
            - b.v * b.v / (sqrt_a * norm * norm) * dnorm_r;
        let radial_part = flux_r / (sqrt_a * b.v * b.v);
        let angular_part = -((cos / sin) * p + q - p * dnorm_th / norm) / (b.v * b.v * norm);

        let sigma_thth = a.v * p * p + b.v * b.v;
        let sigma_phph = b.v * b.v * sin * sin;
        Ok(InducedGeometry {
            sigma_thth,
            sigma_phph,
            area_element: (sigma_thth * sigma_phph).sqrt(),
            h: radial_part + angular_part,
            v: v.v,
            dv_dnu: v.d1 / (a.v * norm),
        })
    }

    fn integrals(&self) -> Result<SurfaceReport> {
        let (xs, ws) = gauss_legendre(self.nodes);
        let mut acc = Integrals::default();
        let mut min_h = f64::INFINITY;
        let mut min_h_flipped = f64::INFINITY;
        for (x, w) in xs.iter().zip(&ws) {
            let theta = x.clamp(-1.0, 1.0).acos();
            let geo = self.induced_geometry(theta)?;
            // Density against d(cos θ) dφ, integrated over φ.
            let b = self.metric.b(self.profile.eval(theta).v).v;
            let weight = 2.0 * PI * w * geo.sigma_thth.sqrt() * b;
            acc.add(weight, geo.h, geo.v);
            min_h = min_h.min(geo.h);
            min_h_flipped = min_h_flipped.min(flipped_mean_curvature(3.0, geo.v, geo.dv_dnu, geo.h));
        }
        let r0 = (acc.area / (4.0 * PI)).sqrt();
        Ok(SurfaceReport {
            area: acc.area,
            int_h: acc.h,
            int_h2: acc.h2,
            int_vh: acc.vh,
            int_v2: acc.v2,
            int_v4: acc.v4,
            m_hawking: 0.5 * r0 * (1.0 - acc.h2 / (16.0 * PI)),
            q_value: 0.5 * r0 * (1.0 - acc.vh / (8.0 * PI * r0)),
            min_h,
            min_h_flipped,
        })
    }
}

#[derive(Default)]
struct Integrals {
    area: f64,
    h: f64,
    h2: f64,
    vh: f64,
    v2: f64,
    v4: f64,
}

impl Integrals {
    fn add(&mut self, weight: f64, h: f64, v: f64) {
        self.area += weight;
        self.h += weight * h;
        self.h2 += weight * h * h;
        self.vh += weight * v * h;
        self.v2 += weight * v * v;
        self.v4 += weight * v.powi(4);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceReport {
    pub area: f64,
    #[serde(rename = "int_H")]
    pub int_h: f64,
    #[serde(rename = "int_H2")]
    pub int_h2: f64,
    #[serde(rename = "int_VH")]
    pub int_vh: f64,
    #[serde(rename = "int_V2")]
    pub int_v2: f64,
    #[serde(rename = "int_V4")]
    pub int_v4: f64,
    pub m_hawking: f64,
    pub q_value: f64,
    #[serde(rename = "min_H")]
    pub min_h: f64,
    #[serde(rename = "min_H_flipped")]
    pub min_h_flipped: f64,
}

impl SurfaceReport {
    fn integrals(&self) -> [f64; 6] {
        [self.area, self.int_h, self.int_h2, self.int_vh, self.int_v2, self.int_v4]
    }
}

/// Integrals and functionals of the surface. Fails if doubling the node
/// count moves any integral by more than [`RESOLUTION_TOL`] (relative).
pub fn surface_report(s: &AxiSurface) -> Result<SurfaceReport> {
    let coarse = s.integrals()?;
    let fine = s.with_node_count(2 * s.nodes).integrals()?;
    let change = coarse
        .integrals()
        .iter()
        .zip(fine.integrals())
        .map(|(c, f)| (c - f).abs() / f.abs().max(1.0))
        .fold(0.0, f64::max);
    if !(change <= RESOLUTION_TOL) {
        return Err(GeoError::Resolution { change });
    }
    Ok(coarse)
}

pub fn induced_geometry(s: &AxiSurface, theta: f64) -> Result<InducedGeometry> {
    s.induced_geometry(theta)
}

/// `Q(Σ) ≥ m_H(Σ)`, with the mean-convexity proxies for both metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HawkingComparison {
    #[serde(flatten)]
    pub report: InequalityReport,
    #[serde(rename = "min_H")]
    pub min_h: f64,
    #[serde(rename = "min_H_flipped")]
    pub min_h_flipped: f64,
}

pub fn hawking_vs_q(s: &AxiSurface) -> Result<HawkingComparison> {
    let rep = surface_report(s)?;
    Ok(HawkingComparison {
        report: InequalityReport::at_least("hawking_vs_q", rep.q_value, rep.m_hawking),
        min_h: rep.min_h,
        min_h_flipped: rep.min_h_flipped,
    })
}

/// The two inequality chains behind `Q ≥ m_H` (n = 3 exponents):
///
/// 1. `∫V² ≤ |Σ|^{1/2} (∫V⁴)^{1/2} ≤ ½ (|Σ|/w)^{1/2} ∫VH`
/// 2. `(|Σ|/w)^{−1/2} ∫VH ≤ (|Σ|/w)^{−1/2} (∫V²)^{1/2} (∫H²)^{1/2} ≤ ½ ∫H²`
///
/// Each report carries the chain's end points; its slack is the smaller of
/// the two step slacks.
pub fn holder_chain_check(s: &AxiSurface) -> Result<(InequalityReport, InequalityReport)> {
    let rep = surface_report(s)?;
    let w = 4.0 * PI;
    let ratio = (rep.area / w).sqrt();

    let mid1 = rep.area.sqrt() * rep.int_v4.sqrt();
    let end1 = 0.5 * ratio * rep.int_vh;
    let slack1 =
        InequalityReport::at_least("", mid1, rep.int_v2).slack.min(InequalityReport::at_least("", end1, mid1).slack);
    let first = InequalityReport::from_slack("holder_chain_potential", end1, rep.int_v2, slack1);

    let start2 = rep.int_vh / ratio;
    let mid2 = (rep.int_v2 * rep.int_h2).sqrt() / ratio;
    let end2 = 0.5 * rep.int_h2;
    let slack2 =
        InequalityReport::at_least("", mid2, start2).slack.min(InequalityReport::at_least("", end2, mid2).slack);
    let second = InequalityReport::from_slack("holder_chain_curvature", end2, start2, slack2);
    Ok((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{flat, schwarzschild, Dim, SchwarzschildParams};
    use crate::quantities::sphere_geometry;

    fn sch(m: f64) -> WarpedStaticMetric {
        schwarzschild(SchwarzschildParams::new(3, m).unwrap())
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn coordinate_sphere_curvature() {
        let s = AxiSurface::new(sch(1.0), Profile::round(4.0)).unwrap();
        for th in [0.1, 1.0, 2.0, 3.0] {
            assert!(close(s.induced_geometry(th).unwrap().h, 0.3535533906, 1e-10));
        }
        let f = AxiSurface::new(flat(Dim::new(3).unwrap()), Profile::round(2.5)).unwrap();
        let g = f.induced_geometry(0.7).unwrap();
        assert!(close(g.sigma_phph, 6.25 * 0.7f64.sin().powi(2), 1e-14));
    }

    #[test]
    fn off_center_sphere_is_umbilic() {
        let s = AxiSurface::new(flat(Dim::new(3).unwrap()), Profile::off_center_sphere(1.0, 0.3)).unwrap();
        for i in 1..50 {
            let th = PI * i as f64 / 50.0;
            assert!(close(s.induced_geometry(th).unwrap().h, 2.0, 1e-8));
        }
    }

    #[test]
    fn round_sphere_reports() {
        let s = AxiSurface::new(sch(1.0), Profile::round(4.0)).unwrap();
        let rep = surface_report(&s).unwrap();
        assert!(close(rep.m_hawking, 1.0, 1e-12) && close(rep.q_value, 1.0, 1e-12));
        let sg = sphere_geometry(&sch(1.0), 4.0).unwrap();
        assert!(close(rep.area, sg.area, 1e-11));
        let f = AxiSurface::new(flat(Dim::new(3).unwrap()), Profile::round(3.0)).unwrap();
        let rep = surface_report(&f).unwrap();
        assert!(close(rep.m_hawking, 0.0, 1e-13) && close(rep.q_value, 0.0, 1e-13));
    }

    #[test]
    fn rejects_bad_surfaces() {
        assert!(AxiSurface::new(sch(1.0), Profile::round(1.5)).is_err());
        let four = schwarzschild(SchwarzschildParams::new(4, 1.0).unwrap());
        assert!(AxiSurface::new(four, Profile::round(3.0)).is_err());
        // ρ = 4 + 0.1 cos θ... has ρ'(0) = 0 but a tilted profile does not.
        let tilted = Profile::Closed(Arc::new(|th: Jet| th * 0.1 + 4.0));
        assert!(AxiSurface::new(sch(1.0), tilted).is_err());
        let s = AxiSurface::new(sch(1.0), Profile::round(4.0)).unwrap();
        assert!(s.induced_geometry(0.0).is_err());
    }

    #[test]
    fn profile_json_documents() {
        let leg: ProfileSpec = serde_json::from_str(r#"{"type":"legendre","r0":4.0,"coeffs":{"2":0.02}}"#).unwrap();
        let p = leg.into_profile().unwrap();
        assert!(close(p.eval(0.0).v, 4.08, 1e-14));
        let theta: Vec<f64> = (0..=64).map(|i| PI * i as f64 / 64.0).collect();
        let rho: Vec<f64> = theta.iter().map(|t| 4.0 * (1.0 + 0.02 * 0.5 * (3.0 * t.cos().powi(2) - 1.0))).collect();
        let text = serde_json::to_string(&ProfileSpec::Table { theta, rho }).unwrap();
        let table = serde_json::from_str::<ProfileSpec>(&text).unwrap().into_profile().unwrap();
        for th in [0.3, 1.1, 2.9] {
            assert!(close(table.eval(th).v, p.eval(th).v, 1e-6));
        }
        let bad = r#"{"type":"table","theta":[0.1,1.0,2.0],"rho":[4,4,4]}"#;
        assert!(serde_json::from_str::<ProfileSpec>(bad).unwrap().into_profile().is_err());
    }

    #[test]
    fn under_resolved_surface_is_rejected() {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(30, 0.05);
        let s = AxiSurface::with_nodes(sch(1.0), Profile::Legendre { r0: 4.0, coeffs }, 8).unwrap();
        assert!(matches!(surface_report(&s), Err(GeoError::Resolution { .. })));
    }
}
