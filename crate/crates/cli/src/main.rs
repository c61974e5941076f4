//! `staticgeo`: catalog listing, check sweeps and flow runs.
//!
//! Exit codes: 0 when everything requested holds, 1 on a violated check or a
//! singular flow, 2 on malformed input.

mod check;
mod flow;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "staticgeo", version, about = "Static metrics, IMCF and quasi-local mass checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the available metric families and their parameters.
    Catalog,
    /// Run named checks over an (n, m, r) grid.
    Check(check::CheckArgs),
    /// Integrate inverse mean curvature flow.
    #[command(subcommand)]
    Flow(flow::FlowCommand),
}

/// How a command ended, mapped onto the exit-code contract.
pub enum Outcome {
    Ok,
    Violated,
}

pub enum Failure {
    /// Malformed configuration or arguments.
    Input(anyhow::Error),
    /// A computation reached a state the checks cannot pass through.
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

pub fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Output sink: a file when a path is given, stdout otherwise.
pub fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn csv_sink(path: &PathBuf) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn catalog() -> io::Result<()> {
    let mut w = io::stdout().lock();
    for e in staticgeo::metric::CATALOG {
        writeln!(w, "{}\n    parameters: {}\n    {}", e.label, e.parameters, e.description)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        // A closed pipe is not a failure of the listing.
        Command::Catalog => {
            let _ = catalog();
            Ok(Outcome::Ok)
        }
        Command::Check(args) => check::run(args),
        Command::Flow(cmd) => flow::run(cmd),
    };
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Violated) => ExitCode::from(1),
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
