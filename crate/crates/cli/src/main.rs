mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use strata_core::dynamics::StrategyKind;

/// Stable b-matchings of peers under a global ranking.
///
/// Ranks are 1-based (rank 1 is the best peer). Tables are written as CSV to
/// stdout or to `--out`; a one-line parameter echo goes to stderr.
#[derive(Debug, Parser)]
#[command(name = "strata", version, arg_required_else_help = true)]
struct Cli {
    /// Write the result to this file instead of stdout. Relative paths are
    /// resolved against $STRATA_OUT_DIR when it is set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for multi-run commands (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the stable configuration of an instance; writes an edge list.
    Solve(SolveArgs),
    /// Simulate decentralized initiatives; one CSV row per base unit.
    Dynamics(DynamicsArgs),
    /// Cluster size and MMO on complete graphs with normally distributed slots.
    Sweep(SweepArgs),
    /// Independent-events matching probabilities on G(n, p).
    Analytic(AnalyticArgs),
    /// Compare the recurrences with exhaustive enumeration or Monte Carlo.
    Oracle(OracleArgs),
    /// Expected BitTorrent share ratios for an upload bandwidth distribution.
    Btapp(BtappArgs),
    /// Write a random acceptance graph as an edge list.
    GenGraph(GenGraphArgs),
    /// Write a slot-capacity file, one capacity per line.
    GenCaps(GenCapsArgs),
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
struct GraphSource {
    /// Complete acceptance graph on N peers.
    #[arg(long, value_name = "N", group = "source")]
    complete: Option<usize>,
    /// Acceptance graph edge list.
    #[arg(long, value_name = "FILE", group = "source")]
    graph: Option<PathBuf>,
    /// Erdős–Rényi graph on N peers with expected degree --d.
    #[arg(long, value_name = "N", group = "source", requires = "d")]
    er: Option<usize>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    source: GraphSource,
    /// Expected degree for --er.
    #[arg(long)]
    d: Option<f64>,
    /// Seed for --er and --b-sigma.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Constant slot count.
    #[arg(long, conflicts_with_all = ["caps", "b_mean"])]
    b: Option<usize>,
    /// Slot capacities file.
    #[arg(long, value_name = "FILE", conflicts_with = "b_mean")]
    caps: Option<PathBuf>,
    /// Mean of normally distributed slot counts (rounded, at least 1).
    #[arg(long, requires = "b_sigma")]
    b_mean: Option<f64>,
    /// Standard deviation of normally distributed slot counts.
    #[arg(long, requires = "b_mean")]
    b_sigma: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    /// Start from --start and run until stable.
    Convergence,
    /// Start stable, remove --victim, run until stable again.
    Removal,
    /// Continuous arrivals and departures for --max-units.
    Churn,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Start {
    Empty,
    Stable,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Strategy {
    BestMate,
    Decremental,
    Random,
}

impl From<Strategy> for StrategyKind {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::BestMate => StrategyKind::BestMate,
            Strategy::Decremental => StrategyKind::Decremental,
            Strategy::Random => StrategyKind::Random,
        }
    }
}

#[derive(Debug, Args)]
struct DynamicsArgs {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Expected degree of the Erdős–Rényi acceptance graph.
    #[arg(long, default_value_t = 10.0)]
    d: f64,
    /// Slots per peer; the disorder metric needs 1.
    #[arg(long, default_value_t = 1)]
    b: usize,
    #[arg(long, value_enum, default_value = "best-mate")]
    strategy: Strategy,
    #[arg(long, value_enum, default_value = "convergence")]
    mode: Mode,
    /// Initial configuration for convergence and churn runs.
    #[arg(long, value_enum, default_value = "empty")]
    start: Start,
    /// Rank of the peer removed in removal mode.
    #[arg(long, required_if_eq("mode", "removal"))]
    victim: Option<usize>,
    /// Expected arrival/departure events per base unit in churn mode.
    #[arg(long, default_value_t = 0.0)]
    rate: f64,
    /// Number of independent runs; run k uses seed + k.
    #[arg(long, default_value_t = 1)]
    seeds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    max_units: usize,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Mean slot count.
    #[arg(long, default_value_t = 3.0)]
    bbar: f64,
    /// Comma-separated standard deviations.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,0.05,0.1,0.15,0.2,0.25,0.3"
    )]
    sigmas: Vec<f64>,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    /// Runs per sigma; run k uses seed + k.
    #[arg(long, default_value_t = 20)]
    seeds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
#[group(id = "edge", required = true, multiple = false)]
struct EdgeProbability {
    /// Edge probability.
    #[arg(long, group = "edge")]
    p: Option<f64>,
    /// Expected degree; p = d / (n - 1).
    #[arg(long, group = "edge")]
    d: Option<f64>,
}

#[derive(Debug, Args)]
struct AnalyticArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    edge: EdgeProbability,
    #[arg(long, default_value_t = 1)]
    b0: usize,
    /// Comma-separated 1-based ranks to emit (default: all).
    #[arg(long, value_delimiter = ',')]
    rows: Option<Vec<usize>>,
    /// Emit the per-peer mass profile `i,mass` instead of rows.
    #[arg(long, conflicts_with_all = ["rows", "by_choice"])]
    mass: bool,
    /// Emit `i,c,j,prob` with the choice index c instead of summing choices.
    #[arg(long)]
    by_choice: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OracleKind {
    /// Enumerate every graph (n <= 6).
    Exact,
    /// Sample --draws graphs.
    MonteCarlo,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    edge: EdgeProbability,
    #[arg(long, default_value_t = 1)]
    b0: usize,
    #[arg(long, value_enum, default_value = "exact")]
    kind: OracleKind,
    #[arg(long, default_value_t = 100_000)]
    draws: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct BtappArgs {
    /// Bandwidth CDF file (`kbps fraction` per line); defaults to the
    /// built-in synthetic distribution.
    #[arg(long, value_name = "FILE")]
    cdf: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    b0: usize,
    #[arg(long, default_value_t = 20.0)]
    d: f64,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    /// Slots a partner's upload is split over (default: b0).
    #[arg(long)]
    slot_divisor: Option<f64>,
}

#[derive(Debug, Args)]
struct GenGraphArgs {
    #[arg(long)]
    n: usize,
    /// Expected degree; omit for the complete graph.
    #[arg(long)]
    d: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct GenCapsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    b_mean: f64,
    #[arg(long, default_value_t = 0.0)]
    b_sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    eprintln!("strata {:?}", cli.command);
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e
                .downcast_ref::<strata_core::Error>()
                .is_some_and(|e| matches!(e, strata_core::Error::InvalidParameter { .. }));
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}
