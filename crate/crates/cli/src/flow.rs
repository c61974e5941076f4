use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Subcommand};
use serde_json::json;
use staticgeo::flow::{
    area_growth_check, imcf_ode_closed_form, imcf_ode_solve, imcf_pde_solve, ode_oracle_max_rel_err, p2_perturbed_data,
    rescaled_final_mean_curvature, FlowConfig,
};
use staticgeo::{Dim, GeoError};

use crate::{csv_sink, sink, timestamp, Failure, Outcome};

#[derive(Subcommand)]
pub enum FlowCommand {
    /// Rotationally symmetric flow of a coordinate sphere.
    Ode(FlowArgs),
    /// Axisymmetric flow on a θ grid, starting from `1/H0` times `1 + ε P₂(cos θ)`.
    Pde {
        #[command(flatten)]
        common: FlowArgs,
        #[arg(long, default_value_t = 128)]
        nodes: usize,
        /// P₂ perturbation amplitude of the initial speed.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        eps: f64,
    },
}

#[derive(Args)]
pub struct FlowArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    r0: f64,
    #[arg(long)]
    h0: f64,
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, default_value_t = 1e-11)]
    rel_tol: f64,
    /// JSON-lines trajectory and summary; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the trajectory as CSV.
    #[arg(long)]
    plot_data: Option<PathBuf>,
}

fn classify(e: GeoError) -> Failure {
    match e {
        GeoError::SingularFlow { .. } | GeoError::Stiffness { .. } => Failure::Runtime(e.into()),
        other => Failure::Input(other.into()),
    }
}

fn io(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

pub fn run(cmd: FlowCommand) -> Result<Outcome, Failure> {
    match cmd {
        FlowCommand::Ode(a) => ode(a),
        FlowCommand::Pde { common, nodes, eps } => pde(common, nodes, eps),
    }
}

fn config(a: &FlowArgs, nodes: usize) -> FlowConfig {
    FlowConfig { t_max: a.t_max, rel_tol: a.rel_tol, nodes, ..FlowConfig::default() }
}

fn header(w: &mut dyn Write, kind: &str) -> std::io::Result<()> {
    let h = json!({"kind": "header", "timestamp": timestamp(), "version": env!("CARGO_PKG_VERSION"), "flow": kind});
    writeln!(w, "{h}")
}

fn ode(a: FlowArgs) -> Result<Outcome, Failure> {
    let n = Dim::new(a.n).map_err(classify)?;
    let cfg = config(&a, FlowConfig::default().nodes);
    let traj = imcf_ode_solve(n, a.r0, a.h0, &cfg).map_err(classify)?;
    let oracle = ode_oracle_max_rel_err(&traj).map_err(classify)?;
    let area = area_growth_check(&traj);
    let last = traj.states.last().expect("trajectory has its initial state");

    let mut w = sink(a.out.as_deref()).map_err(io)?;
    header(&mut w, "ode").map_err(io)?;
    traj.write_jsonl(&mut w).map_err(io)?;
    let summary = json!({
        "kind": "summary",
        "n": a.n,
        "r0": a.r0,
        "H0": a.h0,
        "t_final": last.t,
        "u_final": last.u,
        "steps": traj.states.len() - 1,
        "oracle_max_rel_err": oracle,
        "area_growth": area,
        "rescaled_H_final": rescaled_final_mean_curvature(&traj),
    });
    writeln!(w, "{summary}").map_err(io)?;
    w.flush().map_err(io)?;
    if let Some(p) = &a.plot_data {
        let mut c = csv_sink(p).map_err(io)?;
        traj.write_csv(&mut c).map_err(io)?;
        c.flush().map_err(io)?;
    }
    Ok(Outcome::Ok)
}

fn pde(a: FlowArgs, nodes: usize, eps: f64) -> Result<Outcome, Failure> {
    let n = Dim::new(a.n).map_err(classify)?;
    if a.h0.is_nan() || a.h0 <= 0.0 {
        return Err(Failure::Input(anyhow::anyhow!("need H0 > 0, got {}", a.h0)));
    }
    let cfg = config(&a, nodes);
    let u0 = p2_perturbed_data(n, nodes, 1.0 / a.h0, eps);
    let traj = imcf_pde_solve(n, a.r0, &u0, &cfg).map_err(classify)?;
    let area = area_growth_check(&traj);

    // Deviation from the rotationally symmetric solution with the same mean speed data.
    let mut ode_dev: f64 = 0.0;
    for s in &traj.states {
        let exact = imcf_ode_closed_form(n, a.r0, a.h0, s.t).map_err(classify)?;
        for u in &s.u {
            ode_dev = ode_dev.max((u - exact.u).abs() / exact.u);
        }
    }
    let last = traj.states.last().expect("trajectory has its initial state");
    let (u_min, u_max) = last.u.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &u| (lo.min(u), hi.max(u)));

    let mut w = sink(a.out.as_deref()).map_err(io)?;
    header(&mut w, "pde").map_err(io)?;
    traj.write_jsonl(&mut w).map_err(io)?;
    let summary = json!({
        "kind": "summary",
        "n": a.n,
        "r0": a.r0,
        "H0": a.h0,
        "eps": eps,
        "nodes": nodes,
        "t_final": last.t,
        "u_min": u_min,
        "u_max": u_max,
        "ode_max_rel_dev": ode_dev,
        "area_growth": area,
    });
    writeln!(w, "{summary}").map_err(io)?;
    w.flush().map_err(io)?;
    if let Some(p) = &a.plot_data {
        let mut c = csv_sink(p).map_err(io)?;
        traj.write_csv(&mut c).map_err(io)?;
        c.flush().map_err(io)?;
    }
    Ok(Outcome::Ok)
}
