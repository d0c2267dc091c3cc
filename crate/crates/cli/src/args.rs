use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isingbench_core::Family;
use isingbench_solvers::BetaLadder;

/// Generate, solve and benchmark hardware-native Ising instances.
#[derive(Debug, Parser)]
#[command(name = "isingbench", version, args_override_self = true)]
pub struct Cli {
    /// Seed for all randomness; solvers default to 0 when unset.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// TOML file with default flag values (top-level keys and a table per subcommand).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample CBFM / CBFM-P instances on a Pegasus graph.
    Generate(GenerateArgs),
    /// Run one solver on one instance and write its trace.
    Solve(SolveArgs),
    /// Exhaustive ground state of a small instance.
    Oracle(OracleArgs),
    /// Write the QUBO (IQP) or linearised (ILP) model in LP format.
    Export(ExportArgs),
    /// Run a benchmark grid into a results directory.
    Benchmark(BenchmarkArgs),
    /// Compute run-time ratios against a reference solver.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Cbfm,
    CbfmP,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Cbfm => Family::Cbfm,
            FamilyArg::CbfmP => Family::CbfmP,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Pegasus size parameter m.
    #[arg(long)]
    pub size: usize,
    /// Instance seeds: `7`, `1..50` (inclusive) or `1,4,9`. Defaults to the global seed.
    #[arg(long)]
    pub seeds: Option<String>,
    /// JSON mask of dead hardware: `{"dead_nodes": [...], "dead_edges": [[a, b], ...]}`.
    #[arg(long, value_name = "FILE")]
    pub mask: Option<PathBuf>,
    /// Also write the topology as an `i,j` adjacency CSV.
    #[arg(long, value_name = "FILE")]
    pub adjacency: Option<PathBuf>,
    /// Output directory (default: $ISINGBENCH_OUT or `out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Scd,
    Glauber,
    Tabu,
    Sa,
    Svmc,
    PtIcm,
    MinSum,
}

impl SolverArg {
    pub fn name(self) -> &'static str {
        match self {
            SolverArg::Scd => "scd",
            SolverArg::Glauber => "glauber",
            SolverArg::Tabu => "tabu",
            SolverArg::Sa => "sa",
            SolverArg::Svmc => "svmc",
            SolverArg::PtIcm => "pt-icm",
            SolverArg::MinSum => "min-sum",
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub solver: SolverArg,
    #[arg(long, value_name = "FILE")]
    pub instance: PathBuf,
    /// Trace CSV (default: <out dir>/<instance>_<solver>_trace.csv).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Also write the best configuration as JSON.
    #[arg(long, value_name = "FILE")]
    pub solution: Option<PathBuf>,
    #[command(flatten)]
    pub params: SolverFlags,
}

/// Solver parameters; each applies to the solvers listed in its help.
#[derive(Debug, Args, Default)]
pub struct SolverFlags {
    /// Wall-clock limit in seconds (all solvers).
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Restart count (scd, glauber, svmc, pt-icm).
    #[arg(long)]
    pub restarts: Option<u64>,
    /// Independent reads (tabu, sa).
    #[arg(long)]
    pub reads: Option<u64>,
    /// Sweeps per anneal (sa).
    #[arg(long)]
    pub sweeps: Option<u64>,
    /// Inverse temperatures `HOT,COLD` (sa).
    #[arg(long, value_name = "HOT,COLD")]
    pub beta_range: Option<String>,
    /// Tabu tenure (tabu).
    #[arg(long)]
    pub tenure: Option<usize>,
    /// Per-read time limit in seconds (tabu).
    #[arg(long)]
    pub read_timeout: Option<f64>,
    /// Non-improving iterations before a read ends (tabu).
    #[arg(long)]
    pub stall_limit: Option<u64>,
    /// Schedule CSV with `s,A_GHz,B_GHz` (svmc).
    #[arg(long, value_name = "FILE")]
    pub schedule: Option<PathBuf>,
    /// Anneal steps (svmc).
    #[arg(long)]
    pub steps: Option<u64>,
    /// Sweeps at each step (svmc).
    #[arg(long)]
    pub sweeps_per_step: Option<u64>,
    /// Inverse temperature (svmc).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Inverse-temperature ladder: default, tuned or 64 comma-separated values (pt-icm).
    #[arg(long)]
    pub betas: Option<BetaLadder>,
    /// Rounds per restart (pt-icm).
    #[arg(long)]
    pub rounds: Option<u64>,
    /// Recheck energies and overlaps around every cluster move (pt-icm).
    #[arg(long)]
    pub check_invariants: bool,
    /// Independent runs in parallel, best reported (svmc, pt-icm).
    #[arg(long)]
    pub parallel: Option<usize>,
    /// Message-passing iterations (min-sum).
    #[arg(long)]
    pub max_iterations: Option<u64>,
    /// Fixed-point tolerance (min-sum).
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, value_name = "FILE")]
    pub instance: PathBuf,
    /// Write the result as JSON.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ExportFormat {
    Iqp,
    Ilp,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, value_name = "FILE")]
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub format: ExportFormat,
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[arg(long, value_name = "FILE")]
    pub grid: PathBuf,
    /// Concurrent cells.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Results directory (default: $ISINGBENCH_OUT or `out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Results directory written by `benchmark`.
    #[arg(long, value_name = "DIR")]
    pub results: PathBuf,
    /// Reference solver label.
    #[arg(long, required_unless_present = "reference_file")]
    pub reference: Option<String>,
    /// External reference targets: CSV with `instance,energy,elapsed_s`.
    #[arg(long, value_name = "FILE", conflicts_with = "reference")]
    pub reference_file: Option<PathBuf>,
    /// Extra external results as `LABEL=FILE` (same CSV format); repeatable.
    #[arg(long, value_name = "LABEL=FILE")]
    pub splice: Vec<String>,
    /// Report CSV.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Per-instance times to match.
    #[arg(long, value_name = "FILE")]
    pub details: Option<PathBuf>,
}
