//! `ncreal`: compile, evaluate and certify NC rational functions from the
//! command line. Reports are JSON; the exit code is 0 on success, 2 when a
//! verification fails and 1 on bad input.

mod commands;
mod input;
mod report;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ncreal::error::Error;
use ncreal::tol::Tolerances;
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "ncreal", version, about = "NC rational realizations, inner functions and peak certificates")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Relative singular-value cutoff for numerical rank.
    #[arg(long, global = true)]
    pub tol_rank: Option<f64>,
    /// Distance at which an eigenvalue counts as the target.
    #[arg(long, global = true)]
    pub tol_eig: Option<f64>,
    /// Spectral gap required for a simple eigenvalue.
    #[arg(long, global = true)]
    pub tol_gap: Option<f64>,
    /// JSON file with tolerance overrides; flags take precedence.
    #[arg(long, global = true)]
    pub tolerances: Option<PathBuf>,
    /// Truncation degree N.
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    /// Worker threads for batch and fixture work; 1 runs sequentially.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized selftest sweeps.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

/// A realization given as a JSON file or an expression.
#[derive(Args, Debug, Clone, Serialize)]
pub struct RealizationSource {
    /// Realization JSON (or a report containing one); `-` reads stdin.
    pub realization: Option<PathBuf>,
    /// Expression to compile instead of reading a file.
    #[arg(long, conflicts_with = "realization")]
    pub expr: Option<String>,
    /// Number of variables for `--expr`; inferred when omitted.
    #[arg(short = 'd', long = "vars")]
    pub d: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Compile an expression to an FM realization.
    Compile {
        expr: String,
        #[arg(short = 'd', long = "vars")]
        d: Option<usize>,
    },
    /// Evaluate a realization at a matrix tuple.
    Eval {
        #[command(flatten)]
        source: RealizationSource,
        #[arg(long)]
        point: PathBuf,
    },
    /// Taylor coefficients up to the degree (default 6).
    Taylor {
        #[command(flatten)]
        source: RealizationSource,
    },
    /// Minimal descriptor realization.
    Minimize {
        #[command(flatten)]
        source: RealizationSource,
    },
    /// Joint spectral radius of a tuple.
    Jsr {
        tuple: PathBuf,
        #[arg(long, default_value_t = 64)]
        steps: usize,
    },
    /// Transpose (coefficient reversal) of a realization.
    Transpose {
        #[command(flatten)]
        source: RealizationSource,
    },
    /// Truncated check that a function is inner (default degree 8).
    InnerCheck {
        #[command(flatten)]
        source: RealizationSource,
    },
    /// Unital-channel check of a pair and of its transpose.
    ChannelCheck { pair: PathBuf },
    /// Similarity of a tuple with joint spectral radius 1 to a row coisometry.
    Coisometrize { tuple: PathBuf },
    /// Schur-complement eigenvalue test for λ in the spectrum of r(Z).
    Eigencheck {
        #[command(flatten)]
        source: RealizationSource,
        #[arg(long)]
        point: PathBuf,
        /// `re` or `re,im`.
        #[arg(long, default_value = "1")]
        lambda: String,
    },
    /// Peak-state certificate for an irreducible pair.
    PeakCertify {
        pair: PathBuf,
        #[arg(long, default_value_t = 4)]
        gns_degree: usize,
    },
    /// Truncated GNS model of the state of a pair (default degree 3).
    Gns { pair: PathBuf },
    /// Run the bundled fixtures.
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Compile { .. } => "compile",
            Command::Eval { .. } => "eval",
            Command::Taylor { .. } => "taylor",
            Command::Minimize { .. } => "minimize",
            Command::Jsr { .. } => "jsr",
            Command::Transpose { .. } => "transpose",
            Command::InnerCheck { .. } => "inner-check",
            Command::ChannelCheck { .. } => "channel-check",
            Command::Coisometrize { .. } => "coisometrize",
            Command::Eigencheck { .. } => "eigencheck",
            Command::PeakCertify { .. } => "peak-certify",
            Command::Gns { .. } => "gns",
            Command::Selftest => "selftest",
        }
    }

    pub fn default_degree(&self) -> Option<usize> {
        match self {
            Command::Taylor { .. } => Some(6),
            Command::InnerCheck { .. } | Command::ChannelCheck { .. } | Command::PeakCertify { .. } => Some(8),
            Command::Gns { .. } => Some(3),
            _ => None,
        }
    }
}

/// Why a run did not succeed.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Verification(String),
}

impl Failure {
    pub fn input(msg: impl Into<String>) -> Self {
        Failure::Input(msg.into())
    }

    pub fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Verification(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Verification(m) => m,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Failure::Input(_) => "input",
            Failure::Verification(_) => "verification",
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionMismatch(_)
            | Error::LetterOutOfRange { .. }
            | Error::SizeMismatch(..)
            | Error::Syntax { .. }
            | Error::VarOutOfRange { .. }
            | Error::NotRegularAtZero
            | Error::LambdaEqualsValueAtZero
            | Error::NotCoisometry { .. }
            | Error::NotUnitVector { .. }
            | Error::CyclicityFailure(_)
            | Error::TooLarge { .. }
            | Error::Invalid(_) => Failure::Input(e.to_string()),
            _ => Failure::Verification(e.to_string()),
        }
    }
}

/// The effective configuration, embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub degree: Option<usize>,
    pub tolerances: Tolerances,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    pub max_n: usize,
    pub out: Option<PathBuf>,
    pub parallel: bool,
}

fn tolerances(common: &Common) -> Result<Tolerances, Failure> {
    let mut tol = match &common.tolerances {
        Some(path) => {
            let v = input::read_json(path)?;
            Tolerances::deserialize(&v)
                .map_err(|e| Failure::input(format!("{}: invalid tolerances: {e}", path.display())))?
        }
        None => Tolerances::default(),
    };
    if let Some(v) = common.tol_rank {
        tol.rank = v;
    }
    if let Some(v) = common.tol_eig {
        tol.eig = v;
    }
    if let Some(v) = common.tol_gap {
        tol.gap = v;
    }
    tol.validate().map_err(Failure::from)?;
    Ok(tol)
}

fn run(cli: Cli) -> (Option<RunConfig>, Result<report::Outcome, Failure>) {
    let tol = match tolerances(&cli.common) {
        Ok(t) => t,
        Err(e) => return (None, Err(e)),
    };
    if cli.common.jobs == Some(0) {
        return (None, Err(Failure::input("--jobs must be at least 1")));
    }
    let config = RunConfig {
        command: cli.command.clone(),
        degree: cli.common.degree.or(cli.command.default_degree()),
        tolerances: tol,
        jobs: cli.common.jobs,
        seed: cli.common.seed,
        max_n: ncreal::tol::max_matrix_size(),
        out: cli.common.out.clone(),
        parallel: cfg!(feature = "parallel"),
    };
    let result = with_jobs(cli.common.jobs, || commands::dispatch(&config));
    (Some(config), result)
}

#[cfg(feature = "parallel")]
fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match jobs {
        Some(k) if k > 1 => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_jobs<R: Send>(_jobs: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    f()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let command = cli.command.name();
    let out = cli.common.out.clone();
    let (config, result) = run(cli);
    let code = match &result {
        Ok(o) if o.passed => 0,
        Ok(_) => 2,
        Err(f) => {
            eprintln!("ncreal {command}: {} error: {}", f.kind(), f.message());
            f.code()
        }
    };
    let doc = report::envelope(command, config.as_ref(), &result);
    if let Err(e) = report::emit(&doc, out.as_deref()) {
        eprintln!("ncreal {command}: cannot write report: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
