//! Rotationally symmetric static systems `g = a(r) dr² + b(r)² σ_std`, with a
//! potential `V(r)`, and the residual and mass primitives built on them.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::jet::Jet;
use crate::radial::RadialFn;

const DEFECT_DIRECT_ABOVE: f64 = 1e-3;
const DEFECT_NODES: usize = 48;
const DEFECT_AGREEMENT: f64 = 1e-12;

/// Ambient dimension `n`, restricted to `3..=7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dim(usize);

impl Dim {
    pub fn new(n: usize) -> Result<Self> {
        if (3..=7).contains(&n) {
            Ok(Self(n))
        } else {
            Err(GeoError::Dimension(n))
        }
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// `n` as a float.
    pub fn f(self) -> f64 {
        self.0 as f64
    }

    pub fn all() -> impl Iterator<Item = Dim> {
        (3..=7).map(Dim)
    }
}

impl TryFrom<usize> for Dim {
    type Error = GeoError;
    fn try_from(n: usize) -> Result<Self> {
        Dim::new(n)
    }
}

impl From<Dim> for usize {
    fn from(d: Dim) -> usize {
        d.0
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Area `w_{n-1} = 2π^{n/2} / Γ(n/2)` of the unit `(n-1)`-sphere.
pub fn unit_sphere_area(n: Dim) -> f64 {
    2.0 * PI.powf(n.f() / 2.0) / gamma_half(n.get())
}

/// `Γ(k/2)` for a positive integer `k`, by the recursion `Γ(x+1) = xΓ(x)`.
fn gamma_half(k: usize) -> f64 {
    let (mut x, mut g) = if k.is_multiple_of(2) { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    while x < k as f64 / 2.0 - 0.25 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Rotationally symmetric static system.
#[derive(Debug, Clone)]
pub struct WarpedStaticMetric {
    dim: Dim,
    a: RadialFn,
    b: RadialFn,
    v: RadialFn,
    r_min: f64,
    label: String,
}

/// Parameters of the Schwarzschild family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchwarzschildParams {
    pub dim: Dim,
    pub m: f64,
}

impl SchwarzschildParams {
    pub fn new(n: usize, m: f64) -> Result<Self> {
        Ok(Self { dim: Dim::new(n)?, m })
    }

    /// Horizon radius `(max{0, 2m})^{1/(n-2)}`.
    pub fn horizon_radius(&self) -> f64 {
        (2.0 * self.m).max(0.0).powf(1.0 / (self.dim.f() - 2.0))
    }
}

/// The three residuals of the static equations reduced to the warped form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticResidual {
    /// `Δ_g V`.
    pub res_harmonic: f64,
    /// `(∇²V − V Ric)(e_r, e_r)` on the unit radial vector.
    pub res_rr: f64,
    /// `(∇²V − V Ric)(e, e)` on a unit vector tangent to the spheres.
    pub res_sph: f64,
    /// Largest magnitude among the terms that cancel in the residuals, at
    /// least 1. Rounding error in the residuals is relative to this.
    pub scale: f64,
}

impl StaticResidual {
    pub fn max_abs(&self) -> f64 {
        self.res_harmonic.abs().max(self.res_rr.abs()).max(self.res_sph.abs())
    }

    /// `max_abs / scale`.
    pub fn relative(&self) -> f64 {
        self.max_abs() / self.scale
    }
}

/// Arclength derivatives of the warping function and potential at one radius.
///
/// With `ds = √a dr`, every curvature quantity of the warped product reduces
/// to these numbers.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ArclengthJets {
    pub b: f64,
    pub b_s: f64,
    pub b_ss: f64,
    pub f: f64,
    pub f_s: f64,
    pub f_ss: f64,
}

impl ArclengthJets {
    pub fn new(a: Jet, b: Jet, f: Jet) -> Self {
        let d_s = |x: Jet| x.d1 / a.v.sqrt();
        let d_ss = |x: Jet| x.d2 / a.v - x.d1 * a.d1 / (2.0 * a.v * a.v);
        Self { b: b.v, b_s: d_s(b), b_ss: d_ss(b), f: f.v, f_s: d_s(f), f_ss: d_ss(f) }
    }

    /// Radial-radial Ricci component.
    pub fn ricci_rr(&self, n: f64) -> f64 {
        -(n - 1.0) * self.b_ss / self.b
    }

    /// Tangential Ricci component.
    pub fn ricci_tan(&self, n: f64) -> f64 {
        -self.b_ss / self.b + (n - 2.0) * (1.0 - self.b_s * self.b_s) / (self.b * self.b)
    }

    pub fn laplacian(&self, n: f64) -> f64 {
        self.f_ss + (n - 1.0) * self.b_s * self.f_s / self.b
    }

    /// Largest magnitude of the individual terms in the Laplacian and in the
    /// Ricci components (weighted by `max(1, |f|)`), at least 1.
    pub fn term_scale(&self, n: f64) -> f64 {
        let b2 = self.b * self.b;
        let curv = [(n - 1.0) * self.b_ss / self.b, (n - 2.0) / b2, (n - 2.0) * self.b_s * self.b_s / b2];
        let weight = self.f.abs().max(1.0);
        curv.iter()
            .map(|c| c.abs() * weight)
            .chain([self.f_ss.abs(), ((n - 1.0) * self.b_s * self.f_s / self.b).abs(), self.f_s * self.f_s])
            .fold(1.0, f64::max)
    }
}

impl WarpedStaticMetric {
    pub fn new(dim: Dim, a: RadialFn, b: RadialFn, v: RadialFn, r_min: f64, label: impl Into<String>) -> Self {
        Self { dim, a, b, v, r_min, label: label.into() }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn a_fn(&self) -> &RadialFn {
        &self.a
    }

    pub fn b_fn(&self) -> &RadialFn {
        &self.b
    }

    pub fn v_fn(&self) -> &RadialFn {
        &self.v
    }

    pub fn a(&self, r: f64) -> Jet {
        self.a.eval(r)
    }

    pub fn b(&self, r: f64) -> Jet {
        self.b.eval(r)
    }

    pub fn potential(&self, r: f64) -> Jet {
        self.v.eval(r)
    }

    /// Same geometry with the potential replaced.
    pub fn with_potential(&self, v: RadialFn, label: impl Into<String>) -> Self {
        Self { v, label: label.into(), ..self.clone() }
    }

    pub fn check_domain(&self, r: f64) -> Result<()> {
        if r.is_finite() && r > self.r_min {
            Ok(())
        } else {
            Err(GeoError::Domain { r, r_min: self.r_min })
        }
    }

    pub(crate) fn arclength_jets(&self, r: f64) -> ArclengthJets {
        ArclengthJets::new(self.a(r), self.b(r), self.potential(r))
    }

    /// Residuals of `Δ_g V = 0` and `∇²V = V Ric_g` at radius `r`.
    pub fn static_residual(&self, r: f64) -> Result<StaticResidual> {
        self.check_domain(r)?;
        let n = self.dim.f();
        let j = self.arclength_jets(r);
        Ok(StaticResidual {
            res_harmonic: j.laplacian(n),
            res_rr: j.f_ss - j.f * j.ricci_rr(n),
            res_sph: j.f_s * j.b_s / j.b - j.f * j.ricci_tan(n),
            scale: j.term_scale(n),
        })
    }

    /// Flux form of the ADM mass on the coordinate sphere at `r_eval`:
    /// `V'(r) b(r)^{n-1} / ((n-2) √a(r))`.
    pub fn adm_mass(&self, r_eval: f64) -> Result<f64> {
        self.check_domain(r_eval)?;
        let n = self.dim.f();
        let (a, b, v) = (self.a(r_eval), self.b(r_eval), self.potential(r_eval));
        Ok(v.d1 * b.v.powf(n - 1.0) / (a.v.sqrt() * (n - 2.0)))
    }

    /// `1 − b_s²` on the coordinate sphere at `r`, which equals
    /// `1 − (r0 H/(n−1))²`.
    ///
    /// Near-Euclidean spheres lose every significant digit in the direct
    /// difference, so small defects are recomputed as the tail integral
    /// `∫_r^∞ 2 b_s √a b_ss dr`, valid when `b_s → 1` at infinity. The tail
    /// value is used only if it agrees with the direct one to rounding.
    pub fn area_defect(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        let j = self.arclength_jets(r);
        let direct = 1.0 - j.b_s * j.b_s;
        if direct.abs() > DEFECT_DIRECT_ABOVE {
            return Ok(direct);
        }
        let k = self.dim.f() - 2.0;
        let (nodes, weights) = crate::quadrature::gauss_legendre(DEFECT_NODES);
        let mut tail = 0.0;
        for (t, w) in nodes.iter().zip(&weights) {
            // r' = r x^{-1/k} makes a pure r^{1-n} integrand constant in x.
            let x = 0.5 * (t + 1.0);
            let rr = r * x.powf(-1.0 / k);
            let j = self.arclength_jets(rr);
            let f = 2.0 * j.b_s * self.a(rr).v.sqrt() * j.b_ss;
            tail += 0.5 * w * f * (r / k) * x.powf(-1.0 / k - 1.0);
        }
        Ok(if (tail - direct).abs() <= DEFECT_AGREEMENT { tail } else { direct })
    }

    /// Richardson extrapolation of `f(r)` to `r → ∞`, assuming
    /// `f(r) = f∞ + c·b(r)^{2-n} + O(b^{4-2n})` on the given radius ladder.
    pub fn extrapolate_to_infinity(&self, ladder: &[f64], f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
        if ladder.len() < 2 {
            return Err(GeoError::Parameter("extrapolation needs at least two radii".into()));
        }
        let n = self.dim.f();
        let mut xs = Vec::with_capacity(ladder.len());
        let mut table = Vec::with_capacity(ladder.len());
        for &r in ladder {
            xs.push(self.b(r).v.powf(2.0 - n));
            table.push(f(r)?);
        }
        // Neville's scheme evaluated at x = 0.
        for k in 1..table.len() {
            for i in (k..table.len()).rev() {
                table[i] = (xs[i - k] * table[i] - xs[i] * table[i - 1]) / (xs[i - k] - xs[i]);
            }
        }
        Ok(*table.last().unwrap())
    }

    /// ADM mass extrapolated along the default ladder `10², 10³, 10⁴`
    /// (shifted outward if the inner boundary is large).
    pub fn adm_mass_at_infinity(&self) -> Result<f64> {
        let base = self.r_min.max(1.0);
        let ladder = [100.0 * base, 1000.0 * base, 10000.0 * base];
        self.extrapolate_to_infinity(&ladder, |r| self.adm_mass(r))
    }

    /// Check the pointwise positivity conditions `a, b, b', V > 0` at `r`.
    pub fn is_admissible_at(&self, r: f64) -> bool {
        let (a, b, v) = (self.a(r), self.b(r), self.potential(r));
        a.v > 0.0 && b.v > 0.0 && b.d1 > 0.0 && v.v > 0.0
    }

    /// Smallest `C` with `|V(r) − 1| ≤ C b(r)^{2-n}` over a geometric ladder.
    pub fn potential_decay_constant(&self, ladder: &[f64]) -> f64 {
        let n = self.dim.f();
        ladder.iter().map(|&r| (self.potential(r).v - 1.0).abs() / self.b(r).v.powf(2.0 - n)).fold(0.0, f64::max)
    }
}

/// Schwarzschild metric in area-radius coordinates:
/// `a = 1/(1 − 2m r^{2-n})`, `b = r`, `V = √(1 − 2m r^{2-n})`.
pub fn schwarzschild(p: SchwarzschildParams) -> WarpedStaticMetric {
    let n = p.dim.f();
    let m = p.m;
    let lapse2 = move |r: Jet| 1.0 - 2.0 * m * r.powf(2.0 - n);
    let label = if m == 0.0 { "flat".to_string() } else { format!("schwarzschild(n={}, m={})", p.dim, m) };
    WarpedStaticMetric::new(
        p.dim,
        RadialFn::from_expr(move |r| lapse2(r).recip()),
        RadialFn::from_expr(|r| r),
        RadialFn::from_expr(move |r| lapse2(r).sqrt()),
        p.horizon_radius(),
        label,
    )
}

/// Euclidean space with `V ≡ 1`.
pub fn flat(dim: Dim) -> WarpedStaticMetric {
    schwarzschild(SchwarzschildParams { dim, m: 0.0 })
}

/// Schwarzschild metric in the isotropic chart `s`, with `k = (m/2) s^{2-n}`:
/// `a = (1+k)^{4/(n-2)}`, `b = s(1+k)^{2/(n-2)}`, `V = (1-k)/(1+k)`.
pub fn schwarzschild_isotropic(p: SchwarzschildParams) -> Result<WarpedStaticMetric> {
    if !(p.m > 0.0) {
        return Err(GeoError::Parameter(format!("isotropic chart needs m > 0, got {}", p.m)));
    }
    let n = p.dim.f();
    let m = p.m;
    let k = move |s: Jet| s.powf(2.0 - n) * (m / 2.0);
    Ok(WarpedStaticMetric::new(
        p.dim,
        RadialFn::from_expr(move |s| (k(s) + 1.0).powf(4.0 / (n - 2.0))),
        RadialFn::from_expr(move |s| s * (k(s) + 1.0).powf(2.0 / (n - 2.0))),
        RadialFn::from_expr(move |s| (1.0 - k(s)) / (k(s) + 1.0)),
        (m / 2.0).powf(1.0 / (n - 2.0)),
        format!("schwarzschild-isotropic(n={}, m={})", p.dim, m),
    ))
}

/// Tabulated metric document: `{"n", "r", "a", "b", "V"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricTable {
    pub n: usize,
    pub r: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(rename = "V")]
    pub v: Vec<f64>,
}

impl MetricTable {
    pub fn into_metric(self, label: impl Into<String>) -> Result<WarpedStaticMetric> {
        let dim = Dim::new(self.n)?;
        let r_min = *self.r.first().ok_or_else(|| GeoError::Table("empty radius column".into()))?;
        Ok(WarpedStaticMetric::new(
            dim,
            RadialFn::spline(self.r.clone(), self.a)?,
            RadialFn::spline(self.r.clone(), self.b)?,
            RadialFn::spline(self.r, self.v)?,
            r_min,
            label,
        ))
    }
}

pub fn load_metric_table(path: &Path) -> Result<WarpedStaticMetric> {
    let text = std::fs::read_to_string(path)?;
    let table: MetricTable = serde_json::from_str(&text)?;
    table.into_metric(format!("file:{}", path.display()))
}

/// Catalog entry description, for listings.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub label: &'static str,
    pub parameters: &'static str,
    pub description: &'static str,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        label: "schwarzschild",
        parameters: "n in 3..=7, m real (domain r > (max{0,2m})^(1/(n-2)))",
        description: "Schwarzschild static system in area-radius coordinates",
    },
    CatalogEntry {
        label: "schwarzschild-isotropic",
        parameters: "n in 3..=7, m > 0 (domain s > (m/2)^(1/(n-2)))",
        description: "Schwarzschild static system in the isotropic chart",
    },
    CatalogEntry { label: "flat", parameters: "n in 3..=7", description: "Euclidean space with V = 1" },
    CatalogEntry {
        label: "file:<path>",
        parameters: "JSON {\"n\", \"r\", \"a\", \"b\", \"V\"} with strictly increasing r",
        description: "tabulated metric, natural cubic spline interpolation",
    },
];

/// Resolve a catalog label. `n` and `m` are ignored where the entry fixes them.
pub fn resolve(label: &str, n: usize, m: f64) -> Result<WarpedStaticMetric> {
    match label {
        "schwarzschild" => Ok(schwarzschild(SchwarzschildParams::new(n, m)?)),
        "schwarzschild-isotropic" => schwarzschild_isotropic(SchwarzschildParams::new(n, m)?),
        "flat" => Ok(flat(Dim::new(n)?)),
        other => match other.strip_prefix("file:") {
            Some(path) => load_metric_table(Path::new(path)),
            None => Err(GeoError::Parameter(format!("unknown metric label {other:?}"))),
        },
    }
}

/// `count` log-spaced radii from `lo` to `hi` inclusive.
pub fn log_ladder(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..count).map(|i| (l0 + (l1 - l0) * i as f64 / (count - 1) as f64).exp()).collect()
}
