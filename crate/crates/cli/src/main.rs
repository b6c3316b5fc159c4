//! Command-line pipeline for the biotrig trigger tagger.

mod commands;
mod config;
mod manifest;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "biotrig",
    version,
    about = "Biomedical event trigger tagging with bidirectional RNNs",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a standoff corpus into tokenized, aligned datasets
    Prepare(commands::prepare::PrepareArgs),
    /// Train one or more seeded models with dev-set selection
    Train(commands::train::TrainArgs),
    /// Score a checkpoint and write prediction and report files
    Eval(commands::eval::EvalArgs),
    /// Write predictions for a dataset (gold labels optional)
    Predict(commands::predict::PredictArgs),
    /// Train and score all four feature/head variants with shared seeds
    Ablate(commands::ablate::AblateArgs),
    /// Print per-split trigger and entity counts from a prepared dataset
    Stats(commands::stats::StatsArgs),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Prepare(args) => commands::prepare::run(&args),
        Command::Train(args) => commands::train::run(&args),
        Command::Eval(args) => commands::eval::run(&args),
        Command::Predict(args) => commands::predict::run(&args),
        Command::Ablate(args) => commands::ablate::run(&args),
        Command::Stats(args) => commands::stats::run(&args),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        // single machine-parsable line: error[<Class>]: <chain>
        let class = err
            .chain()
            .find_map(|cause| cause.downcast_ref::<biotrig_core::Error>())
            .map(|e| e.class())
            .unwrap_or("Runtime");
        eprintln!("error[{class}]: {err:#}");
        std::process::exit(1);
    }
}
