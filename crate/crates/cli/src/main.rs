mod anchors;
mod commands;
mod config;
mod field;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use report::{RunManifest, Sink};

/// Exit codes: 0 every check passed, 1 a check failed, 2 usage or config error.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Check(String),
}

impl From<twisted_core::Error> for Failure {
    fn from(e: twisted_core::Error) -> Self {
        use twisted_core::Error as E;
        match e {
            E::Guardrail(_)
            | E::InvalidParameter(_)
            | E::DimensionMismatch { .. }
            | E::Format(_)
            | E::Domain { .. }
            | E::OutOfBall { .. }
            | E::NotHarmonic(_)
            | E::InadmissibleParameter(_) => Failure::Usage(e.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "twisted", version, about = "Exact and numeric checks for Laguerre functions, Weyl operators and twisted convolution on C^n")]
#[command(after_help = "Examples:
  twisted verify symbolic --pq-max 3 --k-max 6 --n-max 3
  twisted verify numeric --orthogonality --kmax 5
  twisted verify all --config fault.toml             (a [fault] section corrupts a table)
  twisted expand --f gaussian:a=0.5 --k 2 --out run/
  twisted expand --f phi:k=0,n=2 --harmonic 1,0,0 --k 1 --format csv
  twisted tsm --f gaussian:a=0.3,n=2 --radius 1.2 --point 0.3,0.1,0,0.2 --weight 1,0,0
  twisted experiment sphere --config sphere.toml --out run/
  twisted experiment cone --config cone.toml --f corpus:6
  twisted zeros --k-max 20 --n 3
  twisted demo-heisenberg

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration error.")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// TOML configuration file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory for reports and artifacts (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every random choice (probe points, corpus scalars, monomials).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Tolerance override for numeric checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Report format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run identity suites; every row carries the identity it checks.
    Verify(commands::verify::VerifyArgs),
    /// Spectral projection of f expanded in bigraded harmonics.
    Expand(commands::expand::ExpandArgs),
    /// Twisted spherical means of f, optionally weighted by a harmonic.
    Tsm(commands::expand::TsmArgs),
    /// Injectivity experiments on spheres and cones.
    Experiment(commands::experiment::ExperimentArgs),
    /// Exact isolation of Laguerre zeros and common-zero scans.
    Zeros(commands::zeros::ZerosArgs),
    /// Group convolution on a Heisenberg slice versus twisted convolution.
    DemoHeisenberg(commands::zeros::HeisenbergArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Verify(_) => "verify",
            Command::Expand(_) => "expand",
            Command::Tsm(_) => "tsm",
            Command::Experiment(_) => "experiment",
            Command::Zeros(_) => "zeros",
            Command::DemoHeisenberg(_) => "demo-heisenberg",
        }
    }
}

/// Resolved settings shared by every command.
pub struct Ctx {
    pub cfg: config::Config,
    pub seed: u64,
    pub tol: Option<f64>,
    pub sink: Sink,
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let (cfg, cfg_path) = config::load(cli.global.config.as_deref())?;
    let seed = cli.global.seed.or(cfg.seed).unwrap_or(0);
    let threads = cli.global.threads.or(cfg.threads);
    if let Some(t) = threads {
        if t == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let tol = cli.global.tol.or(cfg.tol);
    if let Some(t) = tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::Usage(format!("--tol must be positive, got {t}")));
        }
    }
    let format = cli.global.format.or(cfg.format).unwrap_or_default();
    let overrides: Vec<String> = std::env::args().skip(1).collect();
    let manifest = RunManifest::new(cli.command.name(), cfg_path.as_deref(), overrides, seed, cli.global.out.as_deref(), threads);
    let ctx = Ctx { cfg, seed, tol, sink: Sink { manifest, out: cli.global.out.clone(), format } };
    match cli.command {
        Command::Verify(a) => commands::verify::run(&ctx, a),
        Command::Expand(a) => commands::expand::run_expand(&ctx, a),
        Command::Tsm(a) => commands::expand::run_tsm(&ctx, a),
        Command::Experiment(a) => commands::experiment::run(&ctx, a),
        Command::Zeros(a) => commands::zeros::run_zeros(&ctx, a),
        Command::DemoHeisenberg(a) => commands::zeros::run_heisenberg(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
    }
}
