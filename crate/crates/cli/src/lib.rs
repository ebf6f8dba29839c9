//! Command-line front end for the nestcast solvers.
//!
//! Every subcommand returns a [`Report`] that embeds a [`RunManifest`]; the
//! same manifest always renders to the same bytes. Wall-clock time is kept
//! out of reports and printed to standard error by the binary.

mod commands;
mod manifest;
mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nestcast::model::DEFAULT_TRAJECTORY_CAP;
use nestcast::search::{DpOptions, DEFAULT_ENCODER_CAP};

pub use manifest::RunManifest;
pub use report::{Format, Report, Status};

pub const EXIT_OK: u8 = 0;
pub const EXIT_OTHER: u8 = 1;
pub const EXIT_VALIDATION: u8 = 3;
pub const EXIT_CAP: u8 = 4;
pub const EXIT_FALSIFIED: u8 = 5;

#[derive(Debug, Parser)]
#[command(name = "nestcast", version, about = "Optimal real-time transmission over degraded broadcast channels with nested feedback")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Emit CSV rows after a `# manifest:` comment line.
    #[arg(long, global = true, conflicts_with = "structured")]
    pub csv: bool,
    /// Emit one JSON document with the manifest and the report.
    #[arg(long, global = true)]
    pub structured: bool,
    /// Arithmetic; defaults to rational, except float for `simulate`.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Worker threads, 0 for all cores. Never changes the output.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Most positive-probability trajectories enumerated by exact evaluation.
    #[arg(long, global = true, default_value_t = DEFAULT_TRAJECTORY_CAP)]
    pub cap_trajectories: u64,
    /// Largest encoder class searched exhaustively.
    #[arg(long, global = true, default_value_t = DEFAULT_ENCODER_CAP)]
    pub cap_encoders: u128,
    /// Most actions enumerated at one belief node of the dynamic program.
    #[arg(long, global = true, default_value_t = DpOptions::default().action_cap)]
    pub cap_actions: u128,
    /// Most belief nodes memoized by the dynamic program.
    #[arg(long, global = true, default_value_t = DpOptions::default().node_cap)]
    pub cap_nodes: usize,
    /// Recorded verbatim in the manifest; reports carry no clock reading.
    #[arg(long, global = true)]
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Rational,
    Float,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Rational => "rational",
            Mode::Float => "float",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Brute,
    Dp,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model file.
    Validate { model: PathBuf },
    /// Compare the recursive filters with the joint-law oracle on random encoders.
    FilterCheck {
        model: PathBuf,
        #[arg(long, default_value_t = 10)]
        trials: u64,
    },
    /// Compute the optimal expected total distortion.
    Solve {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        /// Write optimal strategies to `<PREFIX>.<method>.json`.
        #[arg(long, value_name = "PREFIX")]
        save: Option<PathBuf>,
    },
    /// Estimate a strategy's cost by simulation.
    Simulate {
        model: PathBuf,
        strategy: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Print the first K simulated episodes.
        #[arg(long, value_name = "K", default_value_t = 0)]
        trace: u64,
        /// Also report the exact cost.
        #[arg(long)]
        exact: bool,
    },
    /// Try to beat the structured optimum with random general strategies.
    Falsify {
        model: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        /// Also score the optimal strategy itself.
        #[arg(long)]
        plant: bool,
        /// Where to write a counterexample strategy, if one is found.
        #[arg(long)]
        counterexample: Option<PathBuf>,
    },
    /// Print the fixed-message scenario model: a uniform source pair that
    /// never changes and Hamming distortion at the last stage.
    Scenario {
        #[arg(long, default_value_t = 2)]
        u: usize,
        #[arg(long, default_value_t = 2)]
        v: usize,
        /// Channel alphabet size; defaults to `u * v`.
        #[arg(long)]
        x: Option<usize>,
        #[arg(long, default_value_t = 1)]
        horizon: usize,
        /// Inner symmetric-channel crossover probability (noiseless if both are absent).
        #[arg(long)]
        inner: Option<String>,
        /// Outer symmetric-channel crossover probability.
        #[arg(long)]
        outer: Option<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::FilterCheck { .. } => "filter-check",
            Command::Solve { .. } => "solve",
            Command::Simulate { .. } => "simulate",
            Command::Falsify { .. } => "falsify",
            Command::Scenario { .. } => "scenario",
        }
    }
}

/// Runs one subcommand and renders its report.
pub fn run(cli: &Cli) -> anyhow::Result<(String, u8)> {
    let report = commands::dispatch(cli)?;
    let format = if cli.global.csv {
        Format::Csv
    } else if cli.global.structured {
        Format::Structured
    } else {
        Format::Text
    };
    let code = match report.status {
        Status::Ok => EXIT_OK,
        Status::Failed => EXIT_OTHER,
        Status::Falsified => EXIT_FALSIFIED,
    };
    Ok((report.render(format), code))
}

/// Exit status for an error: validation and schema problems, exceeded caps
/// and everything else get distinct codes.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    use nestcast::Error as E;
    match err.downcast_ref::<E>() {
        Some(
            E::Schema(_)
            | E::DimensionMismatch { .. }
            | E::EmptyAlphabet(_)
            | E::ZeroHorizon
            | E::NegativeEntry { .. }
            | E::NotStochastic { .. }
            | E::DistortionOutOfRange { .. }
            | E::InvalidStrategy(_),
        ) => EXIT_VALIDATION,
        Some(E::CapExceeded { .. }) => EXIT_CAP,
        _ => EXIT_OTHER,
    }
}
