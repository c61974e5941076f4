use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::Args;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use staticgeo::suite::{evaluate_point, RunRecord, SuiteConfig, CHECKS};

use crate::{csv_sink, sink, timestamp, Failure, Outcome};

#[derive(Args)]
pub struct CheckArgs {
    /// JSON file mirroring the suite configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Metric label from `catalog`.
    #[arg(long)]
    metric: Option<String>,
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    m: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<f64>>,
    /// Comma-separated check names, or `all`.
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Extra randomly placed radii per (n, m).
    #[arg(long)]
    random_radii: Option<usize>,
    /// JSON-lines output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the reports as CSV.
    #[arg(long)]
    plot_data: Option<PathBuf>,
}

fn build_config(args: &CheckArgs) -> anyhow::Result<SuiteConfig> {
    let mut obj = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            match serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))? {
                Value::Object(m) => m,
                _ => bail!("config must be a JSON object"),
            }
        }
        None => Map::new(),
    };
    let mut set = |k: &str, v: Value| {
        obj.insert(k.to_string(), v);
    };
    if let Some(v) = &args.metric {
        set("metric", json!(v));
    }
    if let Some(v) = &args.n {
        set("n", json!(v));
    }
    if let Some(v) = &args.m {
        set("m", json!(v));
    }
    if let Some(v) = &args.r {
        set("r", json!(v));
    }
    if let Some(v) = &args.checks {
        let list: Vec<&str> =
            if v.iter().any(|c| c == "all") { CHECKS.to_vec() } else { v.iter().map(String::as_str).collect() };
        set("checks", json!(list));
    }
    if let Some(v) = args.tol {
        set("tol", json!(v));
    }
    if let Some(v) = args.seed {
        set("seed", json!(v));
    }
    if let Some(v) = args.random_radii {
        set("random_radii", json!(v));
    }
    if let Some(v) = &args.out {
        set("out", json!(v));
    }
    if !obj.contains_key("metric") {
        obj.insert("metric".into(), json!("schwarzschild"));
    }
    let cfg: SuiteConfig = serde_json::from_value(Value::Object(obj)).context("invalid suite configuration")?;
    cfg.validate()?;
    Ok(cfg)
}

fn pool() -> anyhow::Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("STATICGEO_THREADS") {
        let k: usize = v.parse().with_context(|| format!("STATICGEO_THREADS={v:?}"))?;
        b = b.num_threads(k.max(1));
    }
    Ok(b.build()?)
}

pub fn run(args: CheckArgs) -> Result<Outcome, Failure> {
    let cfg = build_config(&args)?;
    let stamp = timestamp();
    let outcomes = pool()?.install(|| cfg.grid().into_par_iter().map(|p| evaluate_point(&cfg, p)).collect());
    let record = RunRecord::from_outcomes(&cfg, stamp, outcomes);
    let out = cfg.out.as_ref().map(PathBuf::from);
    let mut w = sink(out.as_deref()).map_err(|e| Failure::Runtime(e.into()))?;
    record.write_jsonl(&mut w).map_err(|e| Failure::Runtime(e.into()))?;
    w.flush().map_err(|e| Failure::Runtime(e.into()))?;
    if let Some(p) = &args.plot_data {
        let mut c = csv_sink(p).map_err(|e| Failure::Runtime(e.into()))?;
        record.write_csv(&mut c).map_err(|e| Failure::Runtime(e.into()))?;
        c.flush().map_err(|e| Failure::Runtime(e.into()))?;
    }
    eprintln!("{} passed, {} failed, {} skipped", record.passed, record.failed, record.skipped.len());
    Ok(if record.all_satisfied() { Outcome::Ok } else { Outcome::Violated })
}
