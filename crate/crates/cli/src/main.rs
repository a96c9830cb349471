//! `greenflux`: sweeps, growth runs, inverse solves and oracle checks.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or configuration error,
//! 3 numerical failure.

mod commands;
mod config;
mod output;
mod svg;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use output::OutputDir;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io { path: PathBuf, source: std::io::Error },
    Numerical(greenflux::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

impl From<greenflux::Error> for CliError {
    fn from(e: greenflux::Error) -> Self {
        match e {
            greenflux::Error::EpsilonRange { .. } => CliError::Usage(format!("field `epsilons`: {e}")),
            other => CliError::Numerical(other),
        }
    }
}

#[derive(Parser)]
#[command(name = "greenflux", version, about = "Green functions, boundary fluxes and elliptic growth")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Green function on a grid and Poisson kernel on the boundary.
    Green(Common),
    /// Exact boundary flux against its expansion over a list of epsilon.
    Sweep(Common),
    /// Elliptic growth of a marker curve.
    Grow(Common),
    /// Spectrum and Tikhonov inversion of the first-variation operator.
    Inverse(Common),
    /// Finite-volume reference solution against the series solution.
    Oracle(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; every field has a default.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if absent.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Angular and boundary node count (radial count is half).
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn execute(name: &str, common: &Common, f: fn(&RunConfig, &mut OutputDir) -> Result<(), CliError>) -> Result<(), CliError> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = common.resolution {
        cfg.set_resolution(n);
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    let mut out = OutputDir::create(&common.out)?;
    f(&cfg, &mut out)?;
    out.finish(name, &cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Green(c) => execute("green", c, commands::green),
        Command::Sweep(c) => execute("sweep", c, commands::sweep),
        Command::Grow(c) => execute("grow", c, commands::grow),
        Command::Inverse(c) => execute("inverse", c, commands::inverse),
        Command::Oracle(c) => execute("oracle", c, commands::oracle),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("greenflux: {e}");
            ExitCode::from(e.code())
        }
    }
}
