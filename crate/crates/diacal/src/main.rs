//! Thin command-line front end over [`diacal::cli`].

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use diacal::cli::{
    cmd_calibration, cmd_ckpt_select, cmd_curves, cmd_der, cmd_oracle_label, cmd_reliability,
    cmd_select, cmd_synth, RunConfig,
};
use diacal::selection::StrategyKind;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StrategyArg {
    Random,
    WorstConfidence,
}

impl From<StrategyArg> for StrategyKind {
    fn from(value: StrategyArg) -> Self {
        match value {
            StrategyArg::Random => StrategyKind::Random,
            StrategyArg::WorstConfidence => StrategyKind::WorstConfidence,
        }
    }
}

/// Calibration and local-DER analysis for powerset diarization posteriors.
#[derive(Debug, Parser)]
#[command(name = "diacal", version, about)]
struct Cli {
    /// JSON run configuration; flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Number of calibration bins.
    #[arg(long, global = true)]
    bins: Option<usize>,

    /// Selection region length in seconds.
    #[arg(long, global = true)]
    region_length: Option<f64>,

    /// Candidate stride in seconds.
    #[arg(long, global = true)]
    stride: Option<f64>,

    /// Selection budget in seconds.
    #[arg(long, global = true)]
    budget: Option<f64>,

    /// Region-selection strategy.
    #[arg(long, global = true, value_enum)]
    strategy: Option<StrategyArg>,

    /// Seed for randomized selection and generation.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-dataset ECE/DER summary plus the per-bin reliability CSV.
    Calibration,
    /// Per-bin reliability and binwise-DER CSV only.
    Reliability,
    /// Per-file and total local DER breakdowns.
    Der,
    /// Budgeted region selection written as a JSON-lines manifest.
    Select,
    /// Cumulative DER/composition budget curves plus whole-set baselines.
    Curves,
    /// Reveal withheld annotations inside selected regions and emit a
    /// training manifest.
    OracleLabel,
    /// Checkpoint selection from minimal validation subsets.
    CkptSelect,
    /// Generate a synthetic dataset (RTTM + PST1) from the configured
    /// scenario.
    Synth,
}

fn run(cli: Cli) -> diacal::Result<Vec<PathBuf>> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(bins) = cli.bins {
        config.bins = bins;
    }
    if let Some(length) = cli.region_length {
        config.region_length = length;
    }
    if let Some(stride) = cli.stride {
        config.stride = stride;
    }
    if let Some(budget) = cli.budget {
        config.budget = Some(budget);
    }
    if let Some(strategy) = cli.strategy {
        config.strategy = strategy.into();
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = cli.out {
        config.out_dir = out;
    }
    match cli.command {
        Command::Calibration => cmd_calibration(&config),
        Command::Reliability => cmd_reliability(&config),
        Command::Der => cmd_der(&config),
        Command::Select => cmd_select(&config),
        Command::Curves => cmd_curves(&config),
        Command::OracleLabel => cmd_oracle_label(&config),
        Command::CkptSelect => cmd_ckpt_select(&config),
        Command::Synth => cmd_synth(&config),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(
        env_logger::Env::new().filter_or("DIACAL_LOG", "warn"),
    )
    .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(outputs) => {
            for path in outputs {
                println!("{}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
