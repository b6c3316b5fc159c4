//! `biotrig predict`: predictions only, for datasets with or without gold
//! labels.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use biotrig_core::model::load_checkpoint;
use biotrig_core::standoff::{parse_dataset, write_predictions};

use crate::manifest::{self, CommandRecord};

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Checkpoint to predict with
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Dataset file in the prepared line format (gold column may be "-")
    #[arg(long)]
    pub dataset: PathBuf,
    /// Output run directory
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &PredictArgs) -> Result<()> {
    let model = load_checkpoint(&args.checkpoint)?;
    let content = fs::read_to_string(&args.dataset)
        .with_context(|| format!("cannot read dataset {}", args.dataset.display()))?;
    let sentences = parse_dataset(&content, &args.dataset.display().to_string())?;
    let predictions = super::eval::predict_dataset(&model, &sentences)?;

    let reports = super::ensure_dir(&args.out, "reports")?;
    let out_path = reports.join("predictions.tsv");
    write_predictions(&out_path, &predictions.sentences, &predictions.labels)?;

    let mut record = CommandRecord::new();
    record.input(&args.checkpoint)?;
    record.input(&args.dataset)?;
    record.output("reports/predictions.tsv");
    manifest::write(&args.out, "predict", &record)?;
    println!("wrote {}", out_path.display());
    Ok(())
}
