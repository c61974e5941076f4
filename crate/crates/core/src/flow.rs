//! Inverse mean curvature flow of umbilic foliations.
//!
//! Along an umbilic IMCF the induced metric grows self-similarly,
//! `σ(t) = e^{2t/(n−1)} σ(0)`, and the flow speed `u = 1/H` obeys a scalar
//! parabolic equation on the initial surface. Two solvers are provided:
//! the rotationally symmetric ODE reduction, with its closed-form solution as
//! an oracle, and the axisymmetric PDE on a round initial sphere.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::grid::SphereGrid;
use crate::metric::{unit_sphere_area, Dim};
use crate::ode::{Control, Dopri5, OdeFailure, OdeSystem};
use crate::quantities::m0_of;
use crate::report::InequalityReport;

/// Flow speeds outside `[U_MIN, U_MAX]` count as singular.
pub const U_MIN: f64 = 1e-8;
pub const U_MAX: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_max: f64,
    /// Spatial nodes for the PDE.
    pub nodes: usize,
    pub dt_init: f64,
    /// Number of evenly spaced PDE snapshots after the initial one.
    pub snapshots: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-11, abs_tol: 1e-13, t_max: 10.0, nodes: 128, dt_init: 1e-4, snapshots: 10 }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let tol_ok = |x: f64| (1e-13..=1e-3).contains(&x);
        if !tol_ok(self.rel_tol) || !tol_ok(self.abs_tol) {
            return Err(GeoError::Parameter(format!(
                "tolerances must lie in [1e-13, 1e-3]: rel {} abs {}",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.nodes < 32 {
            return Err(GeoError::Parameter(format!("need at least 32 nodes, got {}", self.nodes)));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(GeoError::Parameter(format!("t_max must be positive, got {}", self.t_max)));
        }
        if !(self.dt_init > 0.0) {
            return Err(GeoError::Parameter("dt_init must be positive".into()));
        }
        if self.snapshots == 0 {
            return Err(GeoError::Parameter("snapshots must be positive".into()));
        }
        Ok(())
    }

    fn stepper(&self) -> Dopri5 {
        Dopri5 { rtol: self.rel_tol, atol: self.abs_tol, h_init: self.dt_init, ..Dopri5::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialFlowState {
    pub t: f64,
    /// Area radius `r0 e^{t/(n−1)}`.
    pub r: f64,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialTrajectory {
    pub n: Dim,
    pub r0: f64,
    pub h0: f64,
    pub states: Vec<RadialFlowState>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiFlowState {
    pub t: f64,
    pub theta: Vec<f64>,
    pub u: Vec<f64>,
    pub n: Dim,
    pub r0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiTrajectory {
    pub n: Dim,
    pub r0: f64,
    pub states: Vec<AxiFlowState>,
}

/// Anything that records the flow time and the initial area radius.
pub trait FlowHistory {
    fn dim(&self) -> Dim;
    fn initial_radius(&self) -> f64;
    fn times(&self) -> Vec<f64>;

    /// `|Σ_t| = w_{n−1} (r0 e^{t/(n−1)})^{n−1}` under the self-similar law.
    fn area_at(&self, t: f64) -> f64 {
        let n = self.dim().f();
        unit_sphere_area(self.dim()) * (self.initial_radius() * (t / (n - 1.0)).exp()).powf(n - 1.0)
    }
}

impl FlowHistory for RadialTrajectory {
    fn dim(&self) -> Dim {
        self.n
    }
    fn initial_radius(&self) -> f64 {
        self.r0
    }
    fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }
}

impl FlowHistory for AxiTrajectory {
    fn dim(&self) -> Dim {
        self.n
    }
    fn initial_radius(&self) -> f64 {
        self.r0
    }
    fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }
}

fn radius_at(n: Dim, r0: f64, t: f64) -> f64 {
    r0 * (t / (n.f() - 1.0)).exp()
}

fn check_speed(t: f64, u: f64) -> Result<()> {
    if u.is_finite() && (U_MIN..=U_MAX).contains(&u) {
        Ok(())
    } else {
        Err(GeoError::SingularFlow { t, u })
    }
}

/// Scalar umbilic IMCF:
/// `u' = (n/(2(n−1))) u − ((n−1)(n−2)/(2 r0²)) e^{−2t/(n−1)} u³`.
struct RadialImcf {
    n: f64,
    r0: f64,
}

impl OdeSystem for RadialImcf {
    fn dim(&self) -> usize {
        1
    }
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) {
        let n = self.n;
        let u = y[0];
        let decay = (-2.0 * t / (n - 1.0)).exp();
        dy[0] = n / (2.0 * (n - 1.0)) * u - (n - 1.0) * (n - 2.0) / (2.0 * self.r0 * self.r0) * decay * u * u * u;
    }
}

/// Decide whether a starved step is a blow-up or plain stiffness.
fn classify_starvation(t: f64, dt: f64, initial: (f64, f64), last: (f64, f64)) -> GeoError {
    let (min0, max0) = initial;
    let (min1, max1) = last;
    if max1 > 1e3 * max0 || min1 < 1e-3 * min0 || !max1.is_finite() {
        let u = if max1 > 1e3 * max0 || !max1.is_finite() { max1 } else { min1 };
        GeoError::SingularFlow { t, u }
    } else {
        GeoError::Stiffness { t, dt }
    }
}

fn min_max(u: &[f64]) -> (f64, f64) {
    u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// Integrate the radial reduction from `u(0) = 1/H0`. Every accepted step is
/// recorded.
pub fn imcf_ode_solve(n: Dim, r0: f64, h0: f64, cfg: &FlowConfig) -> Result<RadialTrajectory> {
    cfg.validate()?;
    if !(r0 > 0.0) || !(h0 > 0.0) {
        return Err(GeoError::Parameter(format!("need r0 > 0 and H0 > 0, got {r0}, {h0}")));
    }
    let u0 = 1.0 / h0;
    check_speed(0.0, u0)?;
    let sys = RadialImcf { n: n.f(), r0 };
    let mut states = vec![RadialFlowState { t: 0.0, r: r0, u: u0 }];
    let mut singular = None;
    let outcome = cfg.stepper().integrate(&sys, 0.0, &[u0], cfg.t_max, &[], |t, y, _| {
        if let Err(e) = check_speed(t, y[0]) {
            singular = Some(e);
            return Control::Stop;
        }
        states.push(RadialFlowState { t, r: radius_at(n, r0, t), u: y[0] });
        Control::Continue
    });
    if let Some(e) = singular {
        return Err(e);
    }
    match outcome {
        Ok(_) => Ok(RadialTrajectory { n, r0, h0, states }),
        Err(OdeFailure::StepTooSmall { t, h }) => {
            let last = states.last().map(|s| s.u).unwrap_or(u0);
            Err(classify_starvation(t, h, (u0, u0), (last, last)))
        }
        Err(OdeFailure::TooManySteps { t }) => Err(GeoError::Stiffness { t, dt: 0.0 }),
    }
}

/// Closed-form solution `u = r / ((n−1) √(1 − 2 m0 r^{2−n}))`,
/// `r = r0 e^{t/(n−1)}`, with `m0` the Schwarzschild mass of the data.
pub fn imcf_ode_closed_form(n: Dim, r0: f64, h0: f64, t: f64) -> Result<RadialFlowState> {
    let nf = n.f();
    let m0 = m0_of(n, r0, h0);
    let r = radius_at(n, r0, t);
    let lapse2 = 1.0 - 2.0 * m0 * r.powf(2.0 - nf);
    if !(lapse2 > 0.0) {
        return Err(GeoError::Domain { r, r_min: (2.0 * m0).max(0.0).powf(1.0 / (nf - 2.0)) });
    }
    Ok(RadialFlowState { t, r, u: r / ((nf - 1.0) * lapse2.sqrt()) })
}

/// Largest relative deviation of a radial trajectory from the closed form.
pub fn ode_oracle_max_rel_err(traj: &RadialTrajectory) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for s in &traj.states {
        let exact = imcf_ode_closed_form(traj.n, traj.r0, traj.h0, s.t)?;
        worst = worst.max((s.u - exact.u).abs() / exact.u.abs());
    }
    Ok(worst)
}

/// Background data for the axisymmetric PDE.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeProblem {
    pub n: Dim,
    /// Area radius of the round initial sphere.
    pub r0: f64,
    /// Constant ambient scalar curvature (0 in vacuum).
    pub ambient_scalar: f64,
    /// Nodal scalar curvature of the initial metric; `None` means the round
    /// value `(n−1)(n−2)/r0²`.
    pub surface_scalar: Option<Vec<f64>>,
}

impl PdeProblem {
    pub fn vacuum(n: Dim, r0: f64) -> Self {
        Self { n, r0, ambient_scalar: 0.0, surface_scalar: None }
    }
}

struct AxiImcf {
    grid: SphereGrid,
    n: f64,
    r0: f64,
    ambient_scalar: f64,
    surface_scalar: Vec<f64>,
    lap: std::cell::RefCell<Vec<f64>>,
}

impl OdeSystem for AxiImcf {
    fn dim(&self) -> usize {
        self.grid.len()
    }

    fn rhs(&self, t: f64, u: &[f64], du: &mut [f64]) {
        let n = self.n;
        let decay = (-2.0 * t / (n - 1.0)).exp();
        let mut lap = self.lap.borrow_mut();
        self.grid.apply(u, &mut lap);
        let inv_r02 = 1.0 / (self.r0 * self.r0);
        let linear = n / (2.0 * (n - 1.0));
        for i in 0..u.len() {
            let ui = u[i];
            let cubic = 0.5 * self.ambient_scalar - 0.5 * self.surface_scalar[i] * decay;
            du[i] = decay * ui * ui * lap[i] * inv_r02 + linear * ui + cubic * ui * ui * ui;
        }
    }

    /// Explicit diffusion limit `0.2 h² r0² e^{2t/(n−1)} / max u²`.
    fn max_step(&self, t: f64, u: &[f64]) -> f64 {
        let umax2 = u.iter().fold(0.0f64, |m, v| m.max(v * v));
        0.2 * self.grid.h * self.grid.h * self.r0 * self.r0 * (2.0 * t / (self.n - 1.0)).exp() / umax2
    }
}

/// Method-of-lines solution of the axisymmetric umbilic IMCF on the vacuum
/// round background.
pub fn imcf_pde_solve(n: Dim, r0: f64, u0: &[f64], cfg: &FlowConfig) -> Result<AxiTrajectory> {
    imcf_pde_solve_with(&PdeProblem::vacuum(n, r0), u0, cfg)
}

/// The grid used for `nodes` nodes.
pub fn pde_grid(n: Dim, nodes: usize) -> Vec<f64> {
    SphereGrid::new(n.get(), nodes).theta
}

pub fn imcf_pde_solve_with(problem: &PdeProblem, u0: &[f64], cfg: &FlowConfig) -> Result<AxiTrajectory> {
    cfg.validate()?;
    let n = problem.n;
    let r0 = problem.r0;
    if !(r0 > 0.0) {
        return Err(GeoError::Parameter(format!("need r0 > 0, got {r0}")));
    }
    if u0.len() != cfg.nodes {
        return Err(GeoError::Parameter(format!("{} initial values for {} nodes", u0.len(), cfg.nodes)));
    }
    for &u in u0 {
        check_speed(0.0, u)?;
    }
    let nf = n.f();
    let surface_scalar = match &problem.surface_scalar {
        Some(r) if r.len() != cfg.nodes => {
            return Err(GeoError::Parameter(format!("{} scalar curvature values for {} nodes", r.len(), cfg.nodes)))
        }
        Some(r) => r.clone(),
        None => vec![(nf - 1.0) * (nf - 2.0) / (r0 * r0); cfg.nodes],
    };
    let grid = SphereGrid::new(n.get(), cfg.nodes);
    let theta = grid.theta.clone();
    let sys = AxiImcf {
        grid,
        n: nf,
        r0,
        ambient_scalar: problem.ambient_scalar,
        surface_scalar,
        lap: std::cell::RefCell::new(vec![0.0; cfg.nodes]),
    };
    let stops: Vec<f64> = (1..cfg.snapshots).map(|k| cfg.t_max * k as f64 / cfg.snapshots as f64).collect();
    let snapshot = |t: f64, u: &[f64]| AxiFlowState { t, theta: theta.clone(), u: u.to_vec(), n, r0 };
    let mut states = vec![snapshot(0.0, u0)];
    let mut last = min_max(u0);
    let mut singular = None;
    let outcome = cfg.stepper().integrate(&sys, 0.0, u0, cfg.t_max, &stops, |t, u, at_stop| {
        last = min_max(u);
        if let Err(e) = check_speed(t, last.0).and(check_speed(t, last.1)) {
            singular = Some(e);
            return Control::Stop;
        }
        if at_stop {
            states.push(snapshot(t, u));
        }
        Control::Continue
    });
    if let Some(e) = singular {
        return Err(e);
    }
    match outcome {
        Ok(_) => Ok(AxiTrajectory { n, r0, states }),
        Err(OdeFailure::StepTooSmall { t, h }) => Err(classify_starvation(t, h, min_max(u0), last)),
        Err(OdeFailure::TooManySteps { t }) => Err(GeoError::Stiffness { t, dt: 0.0 }),
    }
}

/// `|Σ_t| / |Σ_0| = e^t` along the recorded times. Slack is the negated
/// largest relative deviation.
pub fn area_growth_check(traj: &impl FlowHistory) -> InequalityReport {
    let a0 = traj.area_at(0.0);
    let mut worst: f64 = 0.0;
    let mut last = (1.0, 1.0);
    for t in traj.times() {
        let ratio = traj.area_at(t) / a0;
        let expect = t.exp();
        worst = worst.max((ratio / expect - 1.0).abs());
        last = (ratio, expect);
    }
    InequalityReport::from_slack("area_growth", last.0, last.1, -worst)
}

/// Metric coefficient `a(r) = ((n−1) u / r)²` read off a radial trajectory,
/// compared with the Schwarzschild coefficient of mass `m0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowMetricComparison {
    pub m0: f64,
    pub r: Vec<f64>,
    pub a: Vec<f64>,
    pub a_schwarzschild: Vec<f64>,
    pub max_rel_deviation: f64,
}

pub fn flow_to_metric(traj: &RadialTrajectory) -> FlowMetricComparison {
    let n = traj.n.f();
    let m0 = m0_of(traj.n, traj.r0, traj.h0);
    let mut out = FlowMetricComparison {
        m0,
        r: Vec::with_capacity(traj.states.len()),
        a: Vec::with_capacity(traj.states.len()),
        a_schwarzschild: Vec::with_capacity(traj.states.len()),
        max_rel_deviation: 0.0,
    };
    for s in &traj.states {
        let a = ((n - 1.0) * s.u / s.r).powi(2);
        let exact = 1.0 / (1.0 - 2.0 * m0 * s.r.powf(2.0 - n));
        out.max_rel_deviation = out.max_rel_deviation.max((a - exact).abs() / exact.abs());
        out.r.push(s.r);
        out.a.push(a);
        out.a_schwarzschild.push(exact);
    }
    out
}

/// `H e^{t/(n−1)}` at the final recorded state; tends to `(n−1)/r0`.
pub fn rescaled_final_mean_curvature(traj: &RadialTrajectory) -> Option<f64> {
    let n = traj.n.f();
    traj.states.last().map(|s| (s.t / (n - 1.0)).exp() / s.u)
}

#[derive(Serialize)]
struct RadialRecord {
    t: f64,
    r: f64,
    u: f64,
    area: f64,
}

#[derive(Serialize)]
struct AxiRecord<'a> {
    t: f64,
    r: f64,
    u: &'a [f64],
    area: f64,
}

impl RadialTrajectory {
    pub fn write_jsonl(&self, mut w: impl Write) -> Result<()> {
        for s in &self.states {
            let rec = RadialRecord { t: s.t, r: s.r, u: s.u, area: self.area_at(s.t) };
            serde_json::to_writer(&mut w, &rec)?;
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "t,r,u,area")?;
        for s in &self.states {
            writeln!(w, "{},{},{},{}", s.t, s.r, s.u, self.area_at(s.t))?;
        }
        Ok(())
    }
}

impl AxiTrajectory {
    pub fn write_jsonl(&self, mut w: impl Write) -> Result<()> {
        for s in &self.states {
            let rec = AxiRecord { t: s.t, r: radius_at(self.n, self.r0, s.t), u: &s.u, area: self.area_at(s.t) };
            serde_json::to_writer(&mut w, &rec)?;
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "t,theta,u")?;
        for s in &self.states {
            for (th, u) in s.theta.iter().zip(&s.u) {
                writeln!(w, "{},{},{}", s.t, th, u)?;
            }
        }
        Ok(())
    }
}

/// `u0 (1 + ε P_2(cos θ))` on the PDE grid.
pub fn p2_perturbed_data(n: Dim, nodes: usize, u0: f64, eps: f64) -> Vec<f64> {
    pde_grid(n, nodes)
        .iter()
        .map(|th| {
            let c = th.cos();
            u0 * (1.0 + eps * 0.5 * (3.0 * c * c - 1.0))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: usize) -> Dim {
        Dim::new(n).unwrap()
    }

    const H_SCH: f64 = 0.3535533906;

    #[test]
    fn closed_form_examples() {
        let s = imcf_ode_closed_form(d(3), 4.0, H_SCH, 0.0).unwrap();
        assert!((s.u - 2.8284271247).abs() < 1e-9);
        let e = imcf_ode_closed_form(d(4), 2.0, 1.5, 1.3).unwrap();
        assert!((e.u - e.r / 3.0).abs() < 1e-14);
        // u e^{−t/2} → r0/(n−1) = 2.
        let late = imcf_ode_closed_form(d(3), 4.0, H_SCH, 40.0).unwrap();
        assert!((late.u * (-20f64).exp() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn closed_form_rejects_horizon() {
        // m0 > 0 data integrated backwards inside the horizon.
        assert!(matches!(imcf_ode_closed_form(d(3), 4.0, H_SCH, -3.0), Err(GeoError::Domain { .. })));
    }

    #[test]
    fn ode_examples() {
        let cfg = FlowConfig { t_max: 2.0 * 2f64.ln(), ..Default::default() };
        let tr = imcf_ode_solve(d(3), 4.0, H_SCH, &cfg).unwrap();
        let last = tr.states.last().unwrap();
        assert!((last.r - 8.0).abs() < 1e-12);
        assert!((last.u - 4.6188021535).abs() < 1e-8, "{}", last.u);

        let cfg = FlowConfig { t_max: 2.0, ..Default::default() };
        let flat = imcf_ode_solve(d(3), 1.0, 2.0, &cfg).unwrap();
        assert!((flat.states.last().unwrap().u - 1.3591409142).abs() < 1e-9);

        let cfg = FlowConfig { t_max: 4.0 * 2f64.ln(), ..Default::default() };
        let five = imcf_ode_solve(d(5), 2.0, 1.0, &cfg).unwrap();
        let last = five.states.last().unwrap();
        assert!((last.r - 4.0).abs() < 1e-12);
        assert!((last.u - 1.0504514629).abs() < 1e-9, "{}", last.u);
    }

    #[test]
    fn singular_initial_speed() {
        let err = imcf_ode_solve(d(3), 4.0, 1e9, &FlowConfig::default()).unwrap_err();
        assert!(matches!(err, GeoError::SingularFlow { t, .. } if t == 0.0));
    }

    #[test]
    fn positive_ambient_scalar_blows_up() {
        let cfg = FlowConfig { t_max: 5.0, nodes: 32, rel_tol: 1e-8, abs_tol: 1e-10, ..Default::default() };
        let problem = PdeProblem { ambient_scalar: 2.0, ..PdeProblem::vacuum(d(3), 1.0) };
        let err = imcf_pde_solve_with(&problem, &vec![1.0; 32], &cfg).unwrap_err();
        assert!(matches!(err, GeoError::SingularFlow { .. }), "{err:?}");
    }

    #[test]
    fn config_validation() {
        let bad = [
            FlowConfig { rel_tol: 1e-14, ..Default::default() },
            FlowConfig { abs_tol: 1e-2, ..Default::default() },
            FlowConfig { nodes: 16, ..Default::default() },
            FlowConfig { t_max: -1.0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
        assert!(FlowConfig::default().validate().is_ok());
    }

    #[test]
    fn area_growth_example() {
        let cfg = FlowConfig { t_max: 2f64.ln(), ..Default::default() };
        let tr = imcf_ode_solve(d(3), 4.0, H_SCH, &cfg).unwrap();
        let rep = area_growth_check(&tr);
        assert!((rep.lhs - 2.0).abs() < 1e-12);
        assert!(rep.slack >= -1e-12);
    }

    #[test]
    fn euclidean_reconstruction_is_flat() {
        let tr = imcf_ode_solve(d(3), 1.0, 2.0, &FlowConfig::default()).unwrap();
        let cmp = flow_to_metric(&tr);
        assert_eq!(cmp.m0, 0.0);
        assert!(cmp.a.iter().all(|a| (a - 1.0).abs() < 1e-9));
    }

    #[test]
    fn pde_requires_matching_lengths() {
        let cfg = FlowConfig { nodes: 64, ..Default::default() };
        assert!(imcf_pde_solve(d(3), 1.0, &vec![0.5; 63], &cfg).is_err());
        let problem = PdeProblem { surface_scalar: Some(vec![2.0; 10]), ..PdeProblem::vacuum(d(3), 1.0) };
        assert!(imcf_pde_solve_with(&problem, &vec![0.5; 64], &cfg).is_err());
    }

    #[test]
    fn jsonl_records_have_expected_keys() {
        let cfg = FlowConfig { t_max: 0.5, ..Default::default() };
        let tr = imcf_ode_solve(d(3), 1.0, 2.0, &cfg).unwrap();
        let mut buf = Vec::new();
        tr.write_jsonl(&mut buf).unwrap();
        let first = String::from_utf8(buf).unwrap().lines().next().unwrap().to_string();
        let v: serde_json::Value = serde_json::from_str(&first).unwrap();
        for key in ["t", "r", "u", "area"] {
            assert!(v.get(key).is_some(), "{first}");
        }
    }
}
