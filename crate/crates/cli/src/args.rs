use std::path::PathBuf;

use advlab::cluster::PohMethod;
use advlab::search::ProblemKind;
use advlab::Execution;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "advlab", version, about = "Adversarial instances for classic heuristics: score, generate, search, reproduce")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Seed for every random choice the command makes.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the command's artifact (instance, best program, or report).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Results log; one JSON record per line is appended.
    #[arg(long, global = true)]
    pub log: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// `parallel` or `sequential`; results are identical either way.
    #[arg(long, global = true, default_value = "parallel")]
    pub exec: Execution,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score an instance read from a file or built by a generator.
    #[command(subcommand)]
    Score(ScoreCmd),
    /// Write a generated instance in its file format.
    #[command(subcommand)]
    Generate(GenerateCmd),
    /// Search for a bad instance by local search or program evolution.
    Search(SearchCmd),
    /// Recompute a published table and compare it with the reference values.
    #[command(subcommand)]
    Reproduce(ReproduceCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    I1,
    I2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Mode {
    /// Packings with equal totals count once.
    #[default]
    Values,
    /// Every Pareto-optimal subset counts.
    Subsets,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Method {
    Exhaustive,
    #[default]
    Memoized,
}

impl From<Method> for PohMethod {
    fn from(m: Method) -> PohMethod {
        match m {
            Method::Exhaustive => PohMethod::Exhaustive,
            Method::Memoized => PohMethod::Memoized,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct KnapsackGen {
    #[arg(long, value_enum, default_value_t = Family::I2)]
    pub family: Family,
    #[arg(long, default_value_t = 8)]
    pub n: u32,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
}

#[derive(Debug, Clone, Args)]
pub struct BinpackGen {
    /// Construction parameter; bins have capacity m(m+1).
    #[arg(long, default_value_t = 6)]
    pub m: u32,
}

#[derive(Debug, Clone, Args)]
pub struct ClusterGen {
    #[arg(long, default_value_t = 4)]
    pub d: usize,
}

#[derive(Debug, Clone, Args)]
pub struct GasolineGen {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    /// Build the one-dimensional instance with this `k` instead.
    #[arg(long, conflicts_with = "d")]
    pub lorieau: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum GenerateCmd {
    Knapsack(KnapsackGen),
    Binpack(BinpackGen),
    Cluster(ClusterGen),
    Gasoline(GasolineGen),
}

#[derive(Debug, Subcommand)]
pub enum ScoreCmd {
    Knapsack {
        /// Read the instance from a file instead of generating it.
        #[arg(long)]
        file: Option<PathBuf>,
        #[command(flatten)]
        gen: KnapsackGen,
        #[arg(long, value_enum, default_value_t = Mode::Values)]
        mode: Mode,
    },
    Binpack {
        #[arg(long)]
        file: Option<PathBuf>,
        #[command(flatten)]
        gen: BinpackGen,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Largest instance the exact optimum is computed for.
        #[arg(long, default_value_t = advlab::binpack::DEFAULT_OPT_BUDGET)]
        opt_budget: usize,
    },
    Cluster {
        #[arg(long)]
        file: Option<PathBuf>,
        #[command(flatten)]
        gen: ClusterGen,
        #[arg(long, value_enum, default_value_t = Method::Memoized)]
        method: Method,
        #[arg(long, default_value_t = 10)]
        max_points: usize,
    },
    Gasoline {
        #[arg(long)]
        file: Option<PathBuf>,
        #[command(flatten)]
        gen: GasolineGen,
        /// Time limit for the exact optimum.
        #[arg(long, default_value_t = 600.0)]
        opt_secs: f64,
        /// Node limit for the exact optimum.
        #[arg(long)]
        opt_nodes: Option<u64>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Knobs {
    /// Items, points or vectors per side; defaults to the problem's usual size.
    #[arg(long)]
    pub size: Option<usize>,
    /// Random orders per bin-packing score.
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
}

#[derive(Debug, Args)]
pub struct SearchCmd {
    pub problem: ProblemKind,
    #[command(flatten)]
    pub knobs: Knobs,
    #[command(subcommand)]
    pub method: SearchMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProviderKind {
    Mock,
    Http,
}

#[derive(Debug, Subcommand)]
pub enum SearchMethod {
    Local {
        /// Iterations.
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        /// Run for this many seconds instead of a fixed number of iterations.
        #[arg(long)]
        time_secs: Option<f64>,
        /// Noise scale; defaults to the problem's.
        #[arg(long)]
        noise: Option<f64>,
        /// Probability of taking an improving step.
        #[arg(long, default_value_t = 1.0)]
        accept: f64,
        /// Per-step trace as JSON lines; defaults to `<out>.trace.jsonl`.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    Evolve {
        #[arg(long, value_enum)]
        provider: ProviderKind,
        /// Replies for the mock provider, separated by `---` lines.
        #[arg(long, required_if_eq("provider", "mock"))]
        script: Option<PathBuf>,
        /// Provider calls; defaults to the script length for the mock provider.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value_t = 1)]
        in_flight: usize,
        /// Softmax temperature of parent sampling.
        #[arg(long, default_value_t = advlab::search::database::DEFAULT_TEMPERATURE)]
        db_temperature: f64,
        /// Sampling temperature sent to the provider.
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ReproduceCmd {
    /// Iterative rounding against the optimum on the generated gasoline instances.
    Table3 {
        #[arg(long, default_value_t = 4)]
        max_d: usize,
        #[arg(long, default_value_t = 3)]
        max_k: u32,
        /// Time limit per row for the exact optimum.
        #[arg(long, default_value_t = 60.0)]
        opt_secs: f64,
        /// Node limit per row for the exact optimum.
        #[arg(long)]
        opt_nodes: Option<u64>,
    },
    /// Pareto-set sizes of the two knapsack families against their closed forms.
    KnapsackRatios {
        #[arg(long, default_value_t = 8)]
        max_n: u32,
    },
    /// Price of hierarchy of the lower-bound instances.
    ClusteringPoh {
        #[arg(long, default_values_t = vec![4])]
        d: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Method::Exhaustive)]
        method: Method,
    },
    /// Random-order Best-Fit ratio of the coprime construction.
    BinpackRatio {
        #[arg(long, default_values_t = vec![6])]
        m: Vec<u32>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
}
