//! Batch front end: `fracdisp <subcommand> [--config PATH] [--out DIR]
//! [--jobs N] [--tol X] [--force]`.
//!
//! Exit codes: 0 when every verdict passes and the solver converged, 1 when
//! a verdict fails or the solver does not converge, 2 for invalid input,
//! 3 when the applicability gate refuses a solve.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};

mod commands;
pub mod config;

pub use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_GATE: i32 = 3;

/// Default output root when neither --out nor FRACDISP_OUT is given.
pub const DEFAULT_ROOT: &str = "fracdisp-out";

#[derive(Parser, Debug, Clone)]
#[command(name = "fracdisp", version, about = "Space-time fractional Schrödinger toolkit: tables, estimate checks and mild solves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration (a manifest from an earlier run also works)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// run directory; default $FRACDISP_OUT/<subcommand>
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// worker threads
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// solve: Picard tolerance; mlf-table: series tolerance; verify-*: verdict tolerance
    #[arg(long, global = true, value_name = "X")]
    pub tol: Option<f64>,
    /// run a solve even when no well-posedness result applies
    #[arg(long, global = true)]
    pub force: bool,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Mittag-Leffler values along rays, with the Laplace-identity cross-check
    MlfTable,
    /// Fit decay exponents of S_t and P_t
    VerifyDecay,
    /// Fit Hölder-type difference bounds
    VerifyHolder,
    /// Pointwise bounds of the cut-off kernels
    VerifyKernel,
    /// Picard solve of the mild formulation with monitors
    Solve,
    /// Aggregate earlier runs
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::MlfTable => "mlf-table",
            Command::VerifyDecay => "verify-decay",
            Command::VerifyHolder => "verify-holder",
            Command::VerifyKernel => "verify-kernel",
            Command::Solve => "solve",
            Command::Report => "report",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            Command::MlfTable,
            Command::VerifyDecay,
            Command::VerifyHolder,
            Command::VerifyKernel,
            Command::Solve,
            Command::Report,
        ]
        .into_iter()
        .find(|c| c.name() == s)
    }
}

/// Result of one subcommand.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub status: String,
    pub run_dir: PathBuf,
    pub summary: Vec<String>,
}

pub fn output_root() -> PathBuf {
    std::env::var_os("FRACDISP_OUT")
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_ROOT))
}

fn run_dir(cli: &Cli, cfg: &RunConfig) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| output_root().join(cli.command.name()))
}

/// Load the configuration and fold the command-line overrides into it, so
/// that the manifest alone reproduces the run.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Config(format!("--tol must be positive (got {t})")));
        }
        match cli.command {
            Command::Solve => cfg.solver.tol = t,
            _ => cfg.experiment.tol = Some(t),
        }
    }
    if cli.force {
        cfg.experiment.force = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Run one subcommand inside a worker pool of `--jobs` threads.
pub fn execute(cli: &Cli) -> Result<Outcome> {
    let cfg = resolve_config(cli)?;
    let dir = run_dir(cli, &cfg);
    std::fs::create_dir_all(&dir)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
    let start = Instant::now();
    let mut outcome = pool.install(|| commands::dispatch(cli.command, &cfg, &dir))?;
    let elapsed = start.elapsed().as_secs_f64();
    commands::write_manifest(&dir, cli.command, &cfg, &outcome, pool.current_num_threads(), elapsed)?;
    outcome.run_dir = dir;
    Ok(outcome)
}

/// Parse arguments, run, print a summary and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(o) => {
            for line in &o.summary {
                println!("{line}");
            }
            println!("{}: {} ({})", cli.command.name(), o.status, o.run_dir.display());
            o.exit_code
        }
        Err(e) => {
            eprintln!("fracdisp {}: {e}", cli.command.name());
            EXIT_INVALID
        }
    }
}

pub(crate) fn relative_to(path: &Path, base: &Path) -> String {
    path.strip_prefix(base).unwrap_or(path).display().to_string()
}
