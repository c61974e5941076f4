//! Check suites over parameter grids.
//!
//! A [`SuiteConfig`] names a metric family, lists of `n`, `m` and radii, and
//! the checks to run. Each grid point is an independent pure computation;
//! [`run_suite`] evaluates them in order and returns a [`RunRecord`].

use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::conformal::{
    conformal_flip, conformal_minkowski_check, conformal_ricci_residual, mass_flip_check, vh_identity_check,
};
use crate::error::{GeoError, Result};
use crate::metric::{resolve, WarpedStaticMetric};
use crate::quantities::{
    bartnik_mass_identity_check, levelset_minkowski_check, minkowski_check, sphere_geometry, willmore_check,
};
use crate::report::InequalityReport;
use crate::stability::eigenvalue_bound_check;

pub const CHECKS: &[&str] = &[
    "static_residual",
    "adm_flux_constancy",
    "minkowski",
    "levelset_minkowski",
    "willmore",
    "conformal_minkowski",
    "bartnik_mass_identity",
    "mass_flip",
    "vh_identity",
    "conformal_residual",
    "hawking_vs_q",
    "eigenvalue_bound",
];

fn default_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub metric: String,
    pub n: Vec<usize>,
    pub m: Vec<f64>,
    /// Coordinate radii; points at or inside the inner boundary are skipped.
    pub r: Vec<f64>,
    pub checks: Vec<String>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Per-check tolerance overrides.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub seed: u64,
    /// Extra radii drawn uniformly in log-radius between the inner boundary
    /// and the largest ladder radius, per `(n, m)`.
    #[serde(default)]
    pub random_radii: usize,
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(GeoError::Parameter(msg));
        if self.n.is_empty() || self.m.is_empty() || self.r.is_empty() || self.checks.is_empty() {
            return bad("n, m, r and checks must all be non-empty".into());
        }
        if !(self.tol > 0.0) || self.tolerances.values().any(|t| !(*t > 0.0)) {
            return bad("tolerances must be positive".into());
        }
        for c in self.checks.iter().chain(self.tolerances.keys()) {
            if !CHECKS.contains(&c.as_str()) {
                return bad(format!("unknown check {c:?}"));
            }
        }
        for &n in &self.n {
            crate::metric::Dim::new(n)?;
        }
        if self.r.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return bad("radii must be positive".into());
        }
        Ok(())
    }

    pub fn tol_for(&self, check: &str) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(self.tol)
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Grid points in evaluation order.
    pub fn grid(&self) -> Vec<GridPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let r_hi = self.r.iter().copied().fold(0.0, f64::max);
        let mut out = Vec::new();
        for &n in &self.n {
            for &m in &self.m {
                let mut radii = self.r.clone();
                if self.random_radii > 0 {
                    let lo = resolve(&self.metric, n, m).map(|g| g.r_min()).unwrap_or(0.0).max(1e-3) * 1.01;
                    if lo < r_hi {
                        for _ in 0..self.random_radii {
                            radii.push((rng.gen_range(lo.ln()..r_hi.ln())).exp());
                        }
                    }
                }
                out.extend(radii.into_iter().map(|r| GridPoint { n, m, r }));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub n: usize,
    pub m: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub metric: String,
    pub n: usize,
    pub m: f64,
    pub r: f64,
    pub check: String,
    pub report: InequalityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub n: usize,
    pub m: f64,
    pub r: f64,
    pub check: Option<String>,
    pub reason: String,
}

/// Outcome of one grid point.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointOutcome {
    pub records: Vec<CheckRecord>,
    pub skipped: Vec<SkipRecord>,
}

fn run_check(g: &WarpedStaticMetric, check: &str, r: f64) -> Result<Option<InequalityReport>> {
    let rep = match check {
        "static_residual" => {
            let res = g.static_residual(r)?;
            InequalityReport::from_slack("static_residual", res.max_abs(), 0.0, -res.relative())
        }
        "adm_flux_constancy" => InequalityReport::identity("adm_flux_constancy", g.adm_mass(r)?, g.adm_mass(10.0 * r)?),
        "minkowski" => minkowski_check(g, r, g.adm_mass(r)?)?,
        "levelset_minkowski" => levelset_minkowski_check(g, r)?,
        "willmore" => willmore_check(g, r)?,
        "conformal_minkowski" => conformal_minkowski_check(g, r)?,
        "bartnik_mass_identity" => bartnik_mass_identity_check(g, r)?,
        "mass_flip" => mass_flip_check(&conformal_flip(g)?, r)?,
        "vh_identity" => vh_identity_check(&conformal_flip(g)?, r)?,
        "conformal_residual" => {
            let res = conformal_ricci_residual(g, r)?;
            InequalityReport::from_slack("conformal_residual", res.max_abs(), 0.0, -res.relative())
        }
        "hawking_vs_q" => {
            let s = sphere_geometry(g, r)?;
            match (s.q, s.hawking) {
                (Some(q), Some(mh)) => InequalityReport::at_least("hawking_vs_q", q, mh),
                _ => return Ok(None),
            }
        }
        "eigenvalue_bound" => {
            let s = sphere_geometry(g, r)?;
            eigenvalue_bound_check(g.dim(), s.r0, s.h, 0.0)
        }
        other => return Err(GeoError::Parameter(format!("unknown check {other:?}"))),
    };
    Ok(Some(rep))
}

pub fn evaluate_point(cfg: &SuiteConfig, p: GridPoint) -> PointOutcome {
    let mut out = PointOutcome::default();
    let skip = |check: Option<&str>, reason: String| SkipRecord {
        n: p.n,
        m: p.m,
        r: p.r,
        check: check.map(str::to_string),
        reason,
    };
    let g = match resolve(&cfg.metric, p.n, p.m) {
        Ok(g) => g,
        Err(e) => {
            out.skipped.push(skip(None, e.to_string()));
            return out;
        }
    };
    if p.r <= g.r_min() {
        out.skipped.push(skip(None, format!("r = {} inside inner boundary {}", p.r, g.r_min())));
        return out;
    }
    for check in &cfg.checks {
        match run_check(&g, check, p.r) {
            Ok(Some(rep)) => out.records.push(CheckRecord {
                metric: cfg.metric.clone(),
                n: p.n,
                m: p.m,
                r: p.r,
                check: check.clone(),
                report: rep.with_tol(cfg.tol_for(check)),
            }),
            Ok(None) => out.skipped.push(skip(Some(check), "not defined in this dimension".into())),
            Err(e) => out.skipped.push(skip(Some(check), e.to_string())),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub timestamp: u64,
    pub version: String,
    pub config_digest: String,
    pub reports: Vec<CheckRecord>,
    pub skipped: Vec<SkipRecord>,
    pub passed: usize,
    pub failed: usize,
}

impl RunRecord {
    pub fn from_outcomes(cfg: &SuiteConfig, timestamp: u64, outcomes: Vec<PointOutcome>) -> Self {
        let mut reports = Vec::new();
        let mut skipped = Vec::new();
        for o in outcomes {
            reports.extend(o.records);
            skipped.extend(o.skipped);
        }
        let passed = reports.iter().filter(|r| r.report.satisfied).count();
        Self {
            timestamp,
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_digest: cfg.digest(),
            failed: reports.len() - passed,
            passed,
            reports,
            skipped,
        }
    }

    pub fn all_satisfied(&self) -> bool {
        self.failed == 0
    }

    /// JSON lines: a header (the only line with a timestamp), one line per
    /// check, one per skip, and a summary.
    pub fn write_jsonl(&self, mut w: impl Write) -> Result<()> {
        let header = serde_json::json!({
            "kind": "header",
            "timestamp": self.timestamp,
            "version": self.version,
            "config_digest": self.config_digest,
        });
        writeln!(w, "{header}")?;
        for rec in &self.reports {
            let mut v = serde_json::to_value(rec)?;
            v["kind"] = "check".into();
            writeln!(w, "{v}")?;
        }
        for s in &self.skipped {
            let mut v = serde_json::to_value(s)?;
            v["kind"] = "skip".into();
            writeln!(w, "{v}")?;
        }
        let summary = serde_json::json!({
            "kind": "summary",
            "total": self.reports.len(),
            "passed": self.passed,
            "failed": self.failed,
            "skipped": self.skipped.len(),
        });
        writeln!(w, "{summary}")?;
        Ok(())
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "metric,n,m,r,check,lhs,rhs,slack,satisfied")?;
        for r in &self.reports {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                r.metric, r.n, r.m, r.r, r.check, r.report.lhs, r.report.rhs, r.report.slack, r.report.satisfied
            )?;
        }
        Ok(())
    }
}

/// Sequential evaluation of the whole grid.
pub fn run_suite(cfg: &SuiteConfig, timestamp: u64) -> Result<RunRecord> {
    cfg.validate()?;
    let outcomes = cfg.grid().into_iter().map(|p| evaluate_point(cfg, p)).collect();
    Ok(RunRecord::from_outcomes(cfg, timestamp, outcomes))
}

/// The full Schwarzschild equality suite over `n = 3..=7`,
/// `m ∈ {−0.5, 0, 1, 2}`.
pub fn schwarzschild_equality_suite() -> SuiteConfig {
    SuiteConfig {
        metric: "schwarzschild".into(),
        n: (3..=7).collect(),
        m: vec![-0.5, 0.0, 1.0, 2.0],
        r: vec![5.0, 7.5, 12.0, 30.0, 100.0],
        checks: CHECKS.iter().map(|s| s.to_string()).collect(),
        tol: 1e-10,
        tolerances: BTreeMap::new(),
        out: None,
        seed: 0,
        random_radii: 0,
    }
}
