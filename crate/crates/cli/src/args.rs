use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "curveball", version, about = "Degree-preserving graph randomization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a powerlaw degree sequence (or read one) and write its Havel-Hakimi realization
    Gen(GenArgs),
    /// Randomize an edge list with global trades or edge switches
    Randomize(RandomizeArgs),
    /// Record Markov chains and report the fraction of correlated edges per thinning
    Mix(MixArgs),
    /// Macrochunk size and batch dependency estimates for the parallel engine
    Estimate(EstimateArgs),
    /// Fraction of neighbors that change owner per super step
    Swapfrac(SwapfracArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// a = 10, b = n/20, gamma = 2
    Lin,
    /// a = 50, b = 10000, gamma = 2
    Const,
}

/// Degree sequence source: a preset, explicit powerlaw parameters or a file.
#[derive(Clone, Debug, Args)]
pub struct DegreeArgs {
    #[arg(long)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub pld_a: Option<u32>,
    #[arg(long)]
    pub pld_b: Option<u32>,
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    /// One degree per line
    #[arg(long, value_name = "FILE", conflicts_with_all = ["preset", "pld_a", "pld_b"])]
    pub degrees: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub nodes: Option<usize>,
    #[command(flatten)]
    pub degrees: DegreeArgs,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Imcb,
    Emcb,
    Pgcb,
    Esmc,
}

/// Engine tuning shared by the trade engines.
#[derive(Clone, Debug, Args)]
pub struct EngineArgs {
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Macrochunks per round (default: derived from --mem-budget)
    #[arg(long)]
    pub k: Option<usize>,
    /// Batches per macrochunk (default: max(64, ceil(n / (k * threads * 1024))))
    #[arg(long)]
    pub z: Option<usize>,
    /// Internal memory in items (M)
    #[arg(long, default_value_t = 1 << 24)]
    pub mem_budget: u64,
    /// Back sorters and queues with files in DIR
    #[arg(long, value_name = "DIR")]
    pub scratch: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RandomizeArgs {
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub algo: Algo,
    /// Global trades, or multiples of m switches for esmc
    #[arg(long, default_value_t = 10)]
    pub super_steps: u64,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MixArgs {
    /// Start graph; alternatively generate one with --nodes and a degree source
    #[arg(long = "in", value_name = "PATH", conflicts_with = "nodes")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[command(flatten)]
    pub degrees: DegreeArgs,
    /// Comma-separated subset of cb-uniform, cb-global, esmc
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub algo: Vec<String>,
    #[arg(long, default_value_t = 6000)]
    pub super_steps: u64,
    /// Comma-separated thinning values
    #[arg(long, value_delimiter = ',')]
    pub thin_grid: Option<Vec<u64>>,
    #[arg(long, default_value = "occurring")]
    pub edge_universe: String,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Edge count; defaults to n times the mean degree over two
    #[arg(long)]
    pub edges: Option<u64>,
    #[command(flatten)]
    pub degrees: DegreeArgs,
    #[arg(long, default_value_t = 1)]
    pub k: u64,
    #[arg(long)]
    pub z: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub threads: u64,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SwapfracArgs {
    /// Comma-separated node counts
    #[arg(long, value_delimiter = ',', required = true)]
    pub nodes: Vec<usize>,
    /// Use d-regular graphs instead of a powerlaw degree source
    #[arg(long, conflicts_with_all = ["preset", "pld_a", "pld_b", "degrees"])]
    pub regular: Option<u32>,
    #[command(flatten)]
    pub degrees: DegreeArgs,
    /// Random global trades applied to the Havel-Hakimi graph before measuring
    #[arg(long, default_value_t = 20)]
    pub burn_in: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}
