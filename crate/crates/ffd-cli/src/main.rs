use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ffd_cli::{
    cmd_ablate, cmd_baselines, cmd_communities, cmd_embed, cmd_run, cmd_split, cmd_theorem,
    Overrides,
};

/// Link prediction on directed graphs with fused structural features.
#[derive(Debug, Parser)]
#[command(name = "ffd", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train the model on one dataset and write every run artifact.
    Run(CommonArgs),
    /// Check the community-advantage condition: closed form, grid sweep,
    /// monotonicity, and a Monte-Carlo simulation.
    Theorem(CommonArgs),
    /// Score all heuristic link-prediction indices on one split.
    Baselines(CommonArgs),
    /// Train once per feature-block combination and tabulate the metrics.
    Ablate(CommonArgs),
    /// Split a dataset into an observed graph and labeled pairs.
    Split(CommonArgs),
    /// Write the spectral node embedding of a dataset.
    Embed(CommonArgs),
    /// Detect communities in a dataset.
    Communities(CommonArgs),
}

/// Flags shared by every subcommand. Values given here override the config
/// file; anything set in neither place falls back to library defaults,
/// except `--seed` and `--out`, which are mandatory one way or the other.
#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON config file.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Root random seed; every random choice in a run derives from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory the artifacts are written into.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Edge-list dataset file (one "src<TAB>dst" line per edge).
    #[arg(long, value_name = "FILE")]
    dataset: Option<PathBuf>,
    /// Fraction of edges kept for training, strictly between 0 and 1.
    #[arg(long)]
    train_fraction: Option<f64>,
}

impl From<CommonArgs> for Overrides {
    fn from(a: CommonArgs) -> Self {
        Overrides {
            config: a.config,
            seed: a.seed,
            out: a.out,
            dataset: a.dataset,
            train_fraction: a.train_fraction,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a.into()),
        Command::Theorem(a) => cmd_theorem(&a.into()),
        Command::Baselines(a) => cmd_baselines(&a.into()),
        Command::Ablate(a) => cmd_ablate(&a.into()),
        Command::Split(a) => cmd_split(&a.into()),
        Command::Embed(a) => cmd_embed(&a.into()),
        Command::Communities(a) => cmd_communities(&a.into()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
