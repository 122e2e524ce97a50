//! `qdburst` command-line interface.

mod commands;
mod figure;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qdburst::BoundError;
use serde_json::json;

use table::Format;

/// Probabilistic burstiness bounds for aggregates of independent periodic
/// flows with uniformly random phases.
///
/// Bursts are given on a grid in units of the scenario quantum. Thread count
/// follows RAYON_NUM_THREADS.
#[derive(Parser)]
#[command(name = "qdburst", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// DKW-type tail bound of a single homogeneous group.
    BoundDkw {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact order-statistics tail bound of a single homogeneous group.
    BoundExact {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Print the bound as an exact "num/den" string.
        #[arg(long)]
        rational: bool,
    },
    /// Smallest burst whose violation probability is at most EPS.
    BurstForEps {
        /// Target violation probability, in (0, 1).
        #[arg(long)]
        eps: f64,
        /// Comma-separated flow counts to sweep.
        #[arg(long, value_delimiter = ',')]
        flows: Vec<u64>,
        /// Packet size for --flows, as an integer, decimal or "p/q".
        #[arg(long, default_value = "1")]
        packet_size: String,
        /// Single-group scenario used when --flows is absent.
        #[arg(short, long)]
        scenario: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Methods::Both)]
        method: Methods,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bound for flows sharing one period with different packet sizes.
    SamePeriod {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value_t = Methods::Both)]
        method: Methods,
        /// Print the exact bound as "num/den".
        #[arg(long)]
        rational: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Per-group bounds combined by convolution and/or union bound.
    Combine {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        grid: GridArgs,
        /// Bound used for each group.
        #[arg(long, value_enum, default_value_t = Method::Dkw)]
        method: Method,
        #[arg(long, value_enum, default_value_t = Combiners::Both)]
        combiner: Combiners,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo estimate of P(B > b) with its Kolmogorov-Smirnov band.
    Simulate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Writes the data behind each figure panel, one file per panel.
    Figure(figure::FigureArgs),
}

#[derive(Args)]
struct Input {
    /// Scenario JSON file.
    #[arg(short, long)]
    scenario: PathBuf,
}

/// Burst grid in quanta: `b_min, b_min + step, ..., <= b_max`.
#[derive(Args, Clone, Copy)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0)]
    b_min: u64,
    /// Defaults to the deterministic bound.
    #[arg(long)]
    b_max: Option<u64>,
    #[arg(long, default_value_t = 1)]
    step: u64,
}

#[derive(Args, Clone, Copy)]
pub struct SimArgs {
    #[arg(long, default_value_t = qdburst::simulator::DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Significance of the confidence band.
    #[arg(long, default_value_t = qdburst::simulator::DEFAULT_ALPHA)]
    alpha: f64,
}

#[derive(Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Dkw,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Methods {
    Dkw,
    Exact,
    Both,
}

impl Methods {
    fn dkw(self) -> bool {
        self != Methods::Exact
    }

    fn exact(self) -> bool {
        self != Methods::Dkw
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Combiners {
    Conv,
    Union,
    Both,
}

#[derive(Debug)]
pub enum CliError {
    Bound(BoundError),
    Io { path: String, source: std::io::Error },
}

impl From<BoundError> for CliError {
    fn from(e: BoundError) -> Self {
        CliError::Bound(e)
    }
}

impl CliError {
    pub fn arg(msg: impl Into<String>) -> Self {
        CliError::Bound(BoundError::InvalidArg(msg.into()))
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Bound(BoundError::InvalidSpec(_)) => "InvalidSpec",
            CliError::Bound(BoundError::InvalidArg(_)) => "InvalidArg",
            CliError::Bound(BoundError::EmptyIndexSet(_)) => "EmptyIndexSet",
            CliError::Bound(BoundError::QuantumMismatch(..)) => "QuantumMismatch",
            CliError::Bound(BoundError::HyperperiodOverflow { .. }) => "HyperperiodOverflow",
            CliError::Io { .. } => "Io",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Bound(e) => e.to_string(),
            CliError::Io { path, source } => format!("{path}: {source}"),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Bound(_) => 1,
            CliError::Io { .. } => 2,
        }
    }
}

fn report(err: &CliError) -> ExitCode {
    eprintln!("{}", json!({ "error": err.kind(), "message": err.message() }));
    ExitCode::from(err.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report(&CliError::arg(e.to_string().trim_end())),
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
