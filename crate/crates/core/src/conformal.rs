//! The conformal flip `g₋ = V^{4/(n−2)} g`, `V₋ = 1/V`.
//!
//! The radial coordinate is kept; only the coefficients change:
//! `a₋ = V^{4/(n−2)} a`, `b₋ = V^{2/(n−2)} b`. Flipping twice returns the
//! original coefficients.

use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::metric::{log_ladder, unit_sphere_area, ArclengthJets, StaticResidual, WarpedStaticMetric};
use crate::quantities::sphere_geometry;
use crate::radial::RadialFn;
use crate::report::InequalityReport;

#[derive(Debug, Clone)]
pub struct ConformalPair {
    pub base: WarpedStaticMetric,
    pub flipped: WarpedStaticMetric,
}

/// Radii at which positivity of `V` is sampled before flipping.
fn positivity_ladder(g: &WarpedStaticMetric) -> Vec<f64> {
    let lo = if g.r_min() > 0.0 { g.r_min() * (1.0 + 1e-6) } else { 1e-3 };
    log_ladder(lo, lo.max(1.0) * 1e6, 64)
}

pub fn conformal_flip(g: &WarpedStaticMetric) -> Result<ConformalPair> {
    for r in positivity_ladder(g) {
        let v = g.potential(r).v;
        if !(v > 0.0) {
            return Err(GeoError::Domain { r, r_min: g.r_min() });
        }
    }
    let n = g.dim().f();
    let (a, b, v) = (g.a_fn().clone(), g.b_fn().clone(), g.v_fn().clone());
    let (v1, v2) = (v.clone(), v.clone());
    let flipped = WarpedStaticMetric::new(
        g.dim(),
        RadialFn::new(move |r| v1.eval(r).powf(4.0 / (n - 2.0)) * a.eval(r)),
        RadialFn::new(move |r| v2.eval(r).powf(2.0 / (n - 2.0)) * b.eval(r)),
        v.map(|x| x.recip()),
        g.r_min(),
        format!("flip({})", g.label()),
    );
    Ok(ConformalPair { base: g.clone(), flipped })
}

/// `m(g₋) = −m(g)` via the flux formula on the sphere at `r_eval`.
pub fn mass_flip_check(pair: &ConformalPair, r_eval: f64) -> Result<InequalityReport> {
    let lhs = pair.flipped.adm_mass(r_eval)?;
    let rhs = -pair.base.adm_mass(r_eval)?;
    Ok(InequalityReport::identity("mass_flip", lhs, rhs))
}

/// Mean curvature of the coordinate sphere in `g₋`:
/// `H₋ = V^{−n/(n−2)} (2((n−1)/(n−2)) ∂V/∂ν + H V)`.
pub fn mean_curvature_flip(g: &WarpedStaticMetric, r: f64) -> Result<f64> {
    let s = sphere_geometry(g, r)?;
    let n = g.dim().f();
    Ok(flipped_mean_curvature(n, s.v0, s.dv_dnu, s.h))
}

/// Pointwise transformation law for mean curvature under the flip.
pub fn flipped_mean_curvature(n: f64, v: f64, dv_dnu: f64, h: f64) -> f64 {
    v.powf(-n / (n - 2.0)) * (2.0 * (n - 1.0) / (n - 2.0) * dv_dnu + h * v)
}

/// `(1/((n−1)w)) ∫V₋H₋ dσ₋ = −2m₋ + (1/((n−1)w)) ∫VH dσ`.
///
/// The left side is computed entirely in the flipped metric, the right side
/// entirely in the base metric.
pub fn vh_identity_check(pair: &ConformalPair, r: f64) -> Result<InequalityReport> {
    let dim = pair.base.dim();
    let (n, w) = (dim.f(), unit_sphere_area(dim));
    let fl = sphere_geometry(&pair.flipped, r)?;
    let base = sphere_geometry(&pair.base, r)?;
    let m_flipped = pair.flipped.adm_mass(r)?;
    let lhs = fl.v0 * fl.h * fl.area / ((n - 1.0) * w);
    let rhs = -2.0 * m_flipped + base.v0 * base.h * base.area / ((n - 1.0) * w);
    Ok(InequalityReport::identity("vh_identity", lhs, rhs))
}

/// `(1/((n−1)w)) ∫VH dσ ≥ (∫V^{2(n−1)/(n−2)} dσ / w)^{(n−2)/(n−1)}`.
pub fn conformal_minkowski_check(g: &WarpedStaticMetric, r: f64) -> Result<InequalityReport> {
    let s = sphere_geometry(g, r)?;
    let (n, w) = (g.dim().f(), unit_sphere_area(g.dim()));
    let lhs = s.v0 * s.h * s.area / ((n - 1.0) * w);
    let int = s.v0.powf(2.0 * (n - 1.0) / (n - 2.0)) * s.area;
    let rhs = (int / w).powf((n - 2.0) / (n - 1.0));
    Ok(InequalityReport::at_least("conformal_minkowski", lhs, rhs))
}

/// Residuals of `Ric_{g₀} = ((n−1)/(n−2)) dU⊗dU`, `Δ_{g₀} U = 0` for
/// `g₀ = V^{2/(n−2)} g`, `U = ln V`.
pub fn conformal_ricci_residual(g: &WarpedStaticMetric, r: f64) -> Result<StaticResidual> {
    g.check_domain(r)?;
    let n = g.dim().f();
    let v = g.potential(r);
    let a0 = v.powf(2.0 / (n - 2.0)) * g.a(r);
    let b0 = v.powf(1.0 / (n - 2.0)) * g.b(r);
    let j = ArclengthJets::new(a0, b0, v.ln());
    Ok(StaticResidual {
        res_harmonic: j.laplacian(n),
        res_rr: j.ricci_rr(n) - (n - 1.0) / (n - 2.0) * j.f_s * j.f_s,
        res_sph: j.ricci_tan(n),
        scale: j.term_scale(n),
    })
}

/// Minimum mean curvature of coordinate spheres over `[r, r_max]` in the
/// base and flipped metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanConvexity {
    pub min_h_base: f64,
    pub min_h_flipped: f64,
}

const PROXY_SAMPLES: usize = 400;

pub fn min_mean_curvature(g: &WarpedStaticMetric, r: f64, r_max: f64) -> Result<MeanConvexity> {
    if !(r < r_max) {
        return Err(GeoError::Parameter(format!("need r < R_max, got {r} and {r_max}")));
    }
    let mut out = MeanConvexity { min_h_base: f64::INFINITY, min_h_flipped: f64::INFINITY };
    for rr in log_ladder(r, r_max, PROXY_SAMPLES) {
        let rr = rr.clamp(r, r_max);
        let s = sphere_geometry(g, rr)?;
        out.min_h_base = out.min_h_base.min(s.h);
        let hf = flipped_mean_curvature(g.dim().f(), s.v0, s.dv_dnu, s.h);
        out.min_h_flipped = out.min_h_flipped.min(hf);
    }
    Ok(out)
}

/// Heuristic mean-convex-foliation proxy for the outer-minimizing property in
/// both metrics. Positive slack means every sampled coordinate sphere in
/// `[r, R_max]` is strictly mean convex in `g` and in `g₋`; this is not a
/// certificate.
pub fn outer_minimizing_proxy(g: &WarpedStaticMetric, r: f64, r_max: f64) -> Result<InequalityReport> {
    let mc = min_mean_curvature(g, r, r_max)?;
    let lhs = mc.min_h_base.min(mc.min_h_flipped);
    Ok(InequalityReport::from_slack("outer_minimizing_proxy", lhs, 0.0, lhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet;
    use crate::metric::{schwarzschild, SchwarzschildParams};

    fn sch(n: usize, m: f64) -> WarpedStaticMetric {
        schwarzschild(SchwarzschildParams::new(n, m).unwrap())
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn flip_examples() {
        let p = conformal_flip(&sch(3, 1.0)).unwrap();
        assert!(close(p.flipped.potential(4.0).v, std::f64::consts::SQRT_2, 1e-10));
        assert!(close(p.flipped.b(4.0).v, 2.0, 1e-14));
        // √(1 + 2m/b₋) at b₋ = 2.
        assert!(close(p.flipped.potential(4.0).v, (1.0 + 2.0 / 2.0f64).sqrt(), 1e-14));

        let f = conformal_flip(&sch(4, 0.0)).unwrap();
        for r in [0.5, 2.0, 9.0] {
            assert_eq!(f.flipped.a(r), f.base.a(r));
            assert_eq!(f.flipped.b(r), f.base.b(r));
            assert_eq!(f.flipped.potential(r).v, 1.0);
        }
    }

    #[test]
    fn flip_rejects_nonpositive_potential() {
        let g = sch(3, 1.0);
        let bad = g.with_potential(RadialFn::from_expr(|r| r - 10.0), "bad");
        assert!(matches!(conformal_flip(&bad), Err(GeoError::Domain { .. })));
    }

    #[test]
    fn mass_flip_examples() {
        let p = conformal_flip(&sch(3, 1.0)).unwrap();
        let rep = mass_flip_check(&p, 4.0).unwrap();
        assert!(close(rep.lhs, -1.0, 1e-9));
        let z = mass_flip_check(&conformal_flip(&sch(3, 0.0)).unwrap(), 3.0).unwrap();
        assert_eq!(z.lhs, 0.0);
        assert_eq!(z.slack, 0.0);
        let five = mass_flip_check(&conformal_flip(&sch(5, 2.0)).unwrap(), 3.0).unwrap();
        assert!(close(five.lhs, -2.0, 1e-9));
    }

    #[test]
    fn mean_curvature_flip_examples() {
        let h = mean_curvature_flip(&sch(3, 1.0), 4.0).unwrap();
        assert!(close(h, std::f64::consts::SQRT_2, 1e-10));
        // Independent route: coordinate sphere of Schwarzschild(−1) with area radius 2.
        let neg = sphere_geometry(&sch(3, -1.0), 2.0).unwrap();
        assert!(close(h, neg.h, 1e-13));
        let flat = mean_curvature_flip(&sch(3, 0.0), 2.5).unwrap();
        assert!(close(flat, 0.8, 1e-15));
        // Agrees with the geometry of the flipped metric itself.
        let p = conformal_flip(&sch(6, 1.3)).unwrap();
        let direct = sphere_geometry(&p.flipped, 2.2).unwrap().h;
        assert!(close(mean_curvature_flip(&sch(6, 1.3), 2.2).unwrap(), direct, 1e-12));
    }

    #[test]
    fn vh_identity_examples() {
        let rep = vh_identity_check(&conformal_flip(&sch(3, 1.0)).unwrap(), 4.0).unwrap();
        assert!(close(rep.lhs, 4.0, 1e-12) && close(rep.rhs, 4.0, 1e-12));
        let flat = vh_identity_check(&conformal_flip(&sch(3, 0.0)).unwrap(), 3.0).unwrap();
        assert!(close(flat.lhs, 3.0, 1e-14) && flat.slack == 0.0);
        let four = vh_identity_check(&conformal_flip(&sch(4, 1.0)).unwrap(), 2.0).unwrap();
        assert!(four.slack >= -1e-10);
    }

    #[test]
    fn conformal_minkowski_examples() {
        let rep = conformal_minkowski_check(&sch(3, 1.0), 4.0).unwrap();
        assert!(close(rep.lhs, 2.0, 1e-13) && close(rep.rhs, 2.0, 1e-13));
        assert!(conformal_minkowski_check(&sch(3, 1.0), 10.0).unwrap().slack.abs() < 1e-10);
        let flat = conformal_minkowski_check(&sch(3, 0.0), 3.0).unwrap();
        assert!(flat.slack.abs() < 1e-15);
    }

    #[test]
    fn conformal_system_residuals() {
        let res = conformal_ricci_residual(&sch(3, 1.0), 4.0).unwrap();
        assert!(res.max_abs() <= 1e-9, "{res:?}");
        let flat = conformal_ricci_residual(&sch(5, 0.0), 4.0).unwrap();
        assert_eq!(flat.max_abs(), 0.0);
        let g = sch(3, 1.0);
        let v = g.v_fn().clone();
        let bent = g.with_potential(RadialFn::new(move |r| v.eval(r) * (Jet::var(r).powi(-3) * 0.01 + 1.0)), "p");
        let res = conformal_ricci_residual(&bent, 3.0).unwrap();
        assert!(res.max_abs() > 1e-5, "{res:?}");
    }

    #[test]
    fn proxy_examples() {
        let g = sch(3, 1.0);
        assert!(outer_minimizing_proxy(&g, 4.0, 1000.0).unwrap().slack > 0.0);
        let near = outer_minimizing_proxy(&g, 2.0001, 1000.0).unwrap();
        assert!(near.slack > 0.0 && near.slack < 1e-2, "{near:?}");
        let flat = outer_minimizing_proxy(&sch(3, 0.0), 1.0, 100.0).unwrap();
        assert!(close(flat.slack, 0.02, 1e-12));
        assert!(outer_minimizing_proxy(&g, 5.0, 4.0).is_err());
    }
}
