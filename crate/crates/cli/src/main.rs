//! `markmix`: command-line front end for the mixture, HMM and lemma-checking tools.
//!
//! Exit status: 0 success or pass, 1 check failed, 2 usage or input error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "markmix", version, about = "Mixtures of Markov chains, HMMs and their exact laws")]
struct Cli {
    /// JSON file overriding tolerances and budgets.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a model file and list every violated constraint.
    Validate { model: PathBuf },
    /// Sample trajectories, one line of symbols each.
    Simulate(SimulateArgs),
    /// Print the exact law of a model as "symbols<TAB>probability" lines.
    Law {
        model: PathBuf,
        #[arg(long)]
        horizon: usize,
    },
    /// Compare the exact laws of two models; passes when the largest gap is within tol_exact.
    Compare {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        horizon: usize,
    },
    /// Convert between model classes.
    Convert(ConvertArgs),
    /// Recurrence classes, transient states and stationary laws of a model's chains.
    Analyze { model: PathBuf },
    /// Print the successors array of each trajectory.
    Successors(SuccessorsArgs),
    /// Recover a mixing measure from independent trajectories.
    Recover(RecoverArgs),
    /// Permutation test of partial exchangeability for one trajectory.
    TestExchangeability(ExchangeabilityArgs),
    /// Check the splitting and hitting-time identities of an HMM.
    VerifyLemmas(LemmaArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    model: PathBuf,
    #[arg(long)]
    length: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Follow each trajectory with its hidden path (HMMs only).
    #[arg(long)]
    trace_hidden: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum TargetClass {
    Hmm,
    IidMixture,
    MarkovMixture,
}

#[derive(Args, Debug)]
struct ConvertArgs {
    #[arg(long)]
    from: PathBuf,
    #[arg(long, value_enum)]
    to: TargetClass,
    /// Compare the laws of input and output at this horizon.
    #[arg(long)]
    check: Option<usize>,
    /// Comma-separated law of the initial previous cell for partitioned mixtures (default uniform).
    #[arg(long, value_delimiter = ',')]
    i0: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct SuccessorsArgs {
    trajectories: PathBuf,
    /// One cell per line, whitespace-separated labels.
    #[arg(long)]
    partition: Option<PathBuf>,
    /// Take the alphabet from this model instead of the labels in the file.
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RecoverArgs {
    #[arg(required = true)]
    trajectories: Vec<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    /// Start symbol of the emitted Markov mixture (default: first symbol of the first trajectory).
    #[arg(long)]
    y0: Option<String>,
    /// Write the recovered Markov mixture here when every row was observed.
    #[arg(long)]
    model_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExchangeabilityArgs {
    trajectories: PathBuf,
    /// Which trajectory of the file to test.
    #[arg(long, default_value_t = 0)]
    trajectory: usize,
    #[arg(long, default_value_t = markmix_core::recovery::DEFAULT_PERMUTATIONS)]
    permutations: usize,
    /// Overall level (default: alpha from the config).
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    partition: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LemmaArgs {
    #[arg(long)]
    model: PathBuf,
    /// splitting, strong_splitting, generalized_strong_splitting, shifted_strong_splitting,
    /// readout_at_stopping_time, strong_readout, conditional_independence or all.
    #[arg(long, default_value = "all")]
    lemma: String,
    /// Comma-separated target symbols (default: the first symbol).
    #[arg(long, value_delimiter = ',')]
    target: Option<Vec<String>>,
    /// Comma-separated hidden:symbol target pairs, replacing --target.
    #[arg(long, value_delimiter = ',', conflicts_with = "target")]
    target_pairs: Option<Vec<String>>,
    #[arg(long, default_value_t = 8)]
    horizon: usize,
    /// Number of hitting times N for the multi-time identities.
    #[arg(long, default_value_t = 2)]
    occurrences: usize,
    /// Window length of the fixed-time splitting identity.
    #[arg(long, default_value_t = 3)]
    steps: usize,
    /// Lag k of the strong splitting identity.
    #[arg(long, default_value_t = 1)]
    lag: usize,
    /// Estimate by simulation instead of enumeration.
    #[arg(long)]
    mc: bool,
    /// Monte Carlo sample count (default: mc_samples from the config).
    #[arg(long)]
    samples: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
