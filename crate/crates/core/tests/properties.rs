use proptest::prelude::*;
use staticgeo::conformal::conformal_flip;
use staticgeo::metric::{schwarzschild, schwarzschild_isotropic};
use staticgeo::quantities::{codazzi_beta, levelset_minkowski_check, sphere_geometry, willmore_check};
use staticgeo::stability::{lambda1_round, schwarzschild_stability_threshold};
use staticgeo::surfaces::{AxiSurface, Profile};
use staticgeo::{Dim, SchwarzschildParams, WarpedStaticMetric};

fn sch(n: usize, m: f64) -> WarpedStaticMetric {
    schwarzschild(SchwarzschildParams::new(n, m).unwrap())
}

/// A radius outside the horizon: `r_min · (1 + stretch)`, or `stretch + 0.1` when there is none.
fn radius(g: &WarpedStaticMetric, stretch: f64) -> f64 {
    if g.r_min() > 0.0 {
        g.r_min() * (1.0 + stretch)
    } else {
        0.1 + stretch
    }
}

proptest! {
    #[test]
    fn coefficient_derivatives_match_finite_differences(n in 3usize..=7, m in -1.0f64..3.0, s in 0.05f64..50.0) {
        let g = sch(n, m);
        let r = radius(&g, s);
        for f in [g.a_fn(), g.b_fn(), g.v_fn()] {
            let (e1, e2) = f.derivative_mismatch(r);
            prop_assert!(e1 < 1e-6 && e2 < 1e-4, "n={n} m={m} r={r}: {e1} {e2}");
        }
    }

    #[test]
    fn flux_mass_is_constant(n in 3usize..=7, m in -1.0f64..3.0, s in 0.05f64..50.0, k in 1.5f64..100.0) {
        let g = sch(n, m);
        let r = radius(&g, s);
        let (m1, m2) = (g.adm_mass(r).unwrap(), g.adm_mass(k * r).unwrap());
        prop_assert!((m1 - m).abs() < 1e-11 * m.abs().max(1.0));
        prop_assert!((m1 - m2).abs() < 1e-11 * m.abs().max(1.0));
    }

    #[test]
    fn isotropic_and_area_charts_agree(n in 3usize..=7, m in 0.1f64..3.0, s in 0.05f64..20.0) {
        let p = SchwarzschildParams::new(n, m).unwrap();
        let iso = schwarzschild_isotropic(p).unwrap();
        let area = schwarzschild(p);
        let si = radius(&iso, s);
        let r = iso.b(si).v;
        prop_assume!(r > area.r_min() * (1.0 + 1e-6));
        let a = sphere_geometry(&iso, si).unwrap();
        let b = sphere_geometry(&area, r).unwrap();
        for (x, y) in [(a.area, b.area), (a.h, b.h), (a.v0, b.v0), (a.dv_dnu, b.dv_dnu), (a.m0, b.m0)] {
            prop_assert!((x - y).abs() <= 1e-9 * y.abs().max(1.0), "{x} vs {y}");
        }
        prop_assert!((iso.adm_mass(si).unwrap() - m).abs() < 1e-10);
    }

    #[test]
    fn double_flip_is_identity(n in 3usize..=7, m in -1.0f64..3.0, s in 0.05f64..50.0) {
        let g = sch(n, m);
        let r = radius(&g, s);
        let twice = conformal_flip(&conformal_flip(&g).unwrap().flipped).unwrap().flipped;
        for (x, y) in [(g.a(r), twice.a(r)), (g.b(r), twice.b(r)), (g.potential(r), twice.potential(r))] {
            prop_assert!((x.v - y.v).abs() <= 1e-12 * x.v.abs().max(1.0));
            prop_assert!((x.d1 - y.d1).abs() <= 1e-10 * x.d1.abs().max(1.0));
        }
    }

    #[test]
    fn lambda1_scales_like_inverse_area(n in 3usize..=7, r0 in 0.1f64..20.0, frac in 0.0f64..1.0, k in 0.1f64..10.0) {
        let d = Dim::new(n).unwrap();
        let h0 = (n as f64 - 1.0) / r0 * frac;
        let base = lambda1_round(d, r0, h0, 0.0);
        let scaled = lambda1_round(d, k * r0, h0 / k, 0.0);
        prop_assert!((scaled * k * k - base).abs() <= 1e-12 * base.abs().max(1.0 / (r0 * r0)));
    }

    #[test]
    fn threshold_decreases_in_mean_curvature(n in 3usize..=7, r0 in 0.1f64..20.0, h in 0.01f64..5.0, dh in 1e-3f64..1.0) {
        let d = Dim::new(n).unwrap();
        prop_assert!(schwarzschild_stability_threshold(d, r0, h + dh) < schwarzschild_stability_threshold(d, r0, h));
    }

    #[test]
    fn willmore_dominates_levelset(n in 3usize..=7, m in -1.0f64..3.0, s in 0.05f64..50.0) {
        let g = sch(n, m);
        let r = radius(&g, s);
        let w = willmore_check(&g, r).unwrap();
        let l = levelset_minkowski_check(&g, r).unwrap();
        prop_assert!(w.lhs >= l.lhs - 1e-12 * l.lhs.abs().max(1.0));
    }

    #[test]
    fn codazzi_beta_closed_form(n in 3usize..=7, m in -1.0f64..3.0, s in 0.05f64..50.0) {
        let g = sch(n, m);
        let r = radius(&g, s);
        let nf = n as f64;
        let v2 = 1.0 - 2.0 * m * r.powf(2.0 - nf);
        let expect = (nf - 2.0) * (v2 / r + m * r.powf(1.0 - nf));
        let beta = codazzi_beta(&g, r).unwrap();
        prop_assert!((beta - expect).abs() <= 1e-12 * expect.abs().max(1.0), "{beta} vs {expect}");
    }
}

/// Area Lagrangian of the graph `r = ρ(θ)` per unit `dθ dφ`.
fn lagrangian(g: &WarpedStaticMetric, rho: f64, p: f64, theta: f64) -> f64 {
    let (a, b) = (g.a(rho).v, g.b(rho).v);
    (a * p * p + b * b).sqrt() * b * theta.sin()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // The first variation of area is ∫ H ⟨δρ ∂_r, ν⟩ dσ, so the Euler–Lagrange
    // expression of the area Lagrangian equals H √a b² sin θ.
    #[test]
    fn mean_curvature_is_the_first_variation_of_area(
        m in 0.0f64..1.5,
        r0 in 4.0f64..8.0,
        eps in -0.1f64..0.1,
        theta in 0.2f64..2.9,
    ) {
        let g = sch(3, m);
        let profile = Profile::p2(r0, eps);
        let surf = AxiSurface::new(g.clone(), profile.clone()).unwrap();
        let geo = surf.induced_geometry(theta).unwrap();

        let at = |th: f64| profile.eval(th);
        let dl_drho = |th: f64| {
            let j = at(th);
            let h = 1e-5 * j.v;
            (lagrangian(&g, j.v + h, j.d1, th) - lagrangian(&g, j.v - h, j.d1, th)) / (2.0 * h)
        };
        let dl_dp = |th: f64| {
            let j = at(th);
            let h = 1e-5;
            (lagrangian(&g, j.v, j.d1 + h, th) - lagrangian(&g, j.v, j.d1 - h, th)) / (2.0 * h)
        };
        let ht = 1e-4;
        let el = dl_drho(theta) - (dl_dp(theta + ht) - dl_dp(theta - ht)) / (2.0 * ht);

        let rho = at(theta).v;
        let expect = geo.h * g.a(rho).v.sqrt() * g.b(rho).v.powi(2) * theta.sin();
        prop_assert!((el - expect).abs() <= 1e-6 * expect.abs().max(1.0), "{el} vs {expect}");
    }
}

#[test]
fn first_variation_at_twenty_nodes() {
    // Same identity at fixed nodes for a Legendre profile with several modes.
    let g = sch(3, 1.0);
    let profile = Profile::Legendre { r0: 5.0, coeffs: [(2, 0.05), (3, -0.02), (4, 0.01)].into_iter().collect() };
    let surf = AxiSurface::new(g.clone(), profile.clone()).unwrap();
    for i in 0..20 {
        let theta = 0.1 + 2.9 * i as f64 / 19.0;
        let geo = surf.induced_geometry(theta).unwrap();
        let dl_dp = |th: f64| {
            let j = profile.eval(th);
            (lagrangian(&g, j.v, j.d1 + 1e-5, th) - lagrangian(&g, j.v, j.d1 - 1e-5, th)) / 2e-5
        };
        let j = profile.eval(theta);
        let hr = 1e-5 * j.v;
        let el = (lagrangian(&g, j.v + hr, j.d1, theta) - lagrangian(&g, j.v - hr, j.d1, theta)) / (2.0 * hr)
            - (dl_dp(theta + 1e-4) - dl_dp(theta - 1e-4)) / 2e-4;
        let expect = geo.h * g.a(j.v).v.sqrt() * g.b(j.v).v.powi(2) * theta.sin();
        assert!((el - expect).abs() <= 1e-6 * expect.abs().max(1.0), "θ={theta}: {el} vs {expect}");
    }
}
