//! `biotrig eval`: score a checkpoint against a prepared split, writing
//! the prediction file, rendered report, machine record, confusion matrix,
//! and category rollup.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;

use biotrig_core::error::Error as CoreError;
use biotrig_core::eval::{
    category_rollup, confusion_tsv, machine_record, micro_prf, render_report, CategoryMap,
};
use biotrig_core::model::{load_checkpoint, TriggerModel};
use biotrig_core::standoff::{
    dataset_is_gold_free, parse_dataset, write_predictions, AlignedSentence,
};

use crate::manifest::{self, CommandRecord};

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Checkpoint to evaluate
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Prepared dataset directory; its vocabulary must hash-match the
    /// checkpoint's
    #[arg(long)]
    pub prepared: PathBuf,
    /// Which split to score
    #[arg(long, default_value = "test")]
    pub split: String,
    /// Score this dataset file instead of the split file
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Output run directory
    #[arg(long)]
    pub out: PathBuf,
}

pub fn check_vocab_hash(model: &TriggerModel, prepared: &super::PreparedDir) -> Result<()> {
    let dataset_hash = prepared.vocab_sha256()?;
    let checkpoint_hash = model.vocabs.sha256_hex();
    if dataset_hash != checkpoint_hash {
        return Err(CoreError::VocabularyMismatch(format!(
            "checkpoint vocabulary {checkpoint_hash} != prepared vocabulary {dataset_hash}; \
             refusing to evaluate across vocabularies"
        ))
        .into());
    }
    Ok(())
}

pub struct Predictions {
    pub sentences: Vec<AlignedSentence>,
    pub labels: Vec<Vec<String>>,
    pub gold: Vec<usize>,
    pub pred: Vec<usize>,
}

pub fn predict_dataset(model: &TriggerModel, sentences: &[AlignedSentence]) -> Result<Predictions> {
    let mut labels = Vec::with_capacity(sentences.len());
    let mut gold = Vec::new();
    let mut pred = Vec::new();
    for sent in sentences {
        if sent.tokens.is_empty() {
            labels.push(Vec::new());
            continue;
        }
        let seq = model.vocabs.index_sentence(sent)?;
        let p = model.predict(&seq)?;
        labels.push(
            p.iter()
                .map(|&id| model.vocabs.label_name(id).to_string())
                .collect(),
        );
        gold.extend(seq.gold_labels());
        pred.extend(p);
    }
    Ok(Predictions {
        sentences: sentences.to_vec(),
        labels,
        gold,
        pred,
    })
}

pub fn run(args: &EvalArgs) -> Result<()> {
    let model = load_checkpoint(&args.checkpoint)?;
    let prepared = super::PreparedDir::open(&args.prepared)?;
    check_vocab_hash(&model, &prepared)?;

    let dataset_path = match &args.dataset {
        Some(p) => p.clone(),
        None => prepared.file(&format!("{}.tsv", args.split))?,
    };
    let content = fs::read_to_string(&dataset_path)
        .with_context(|| format!("cannot read dataset {}", dataset_path.display()))?;
    let gold_free = dataset_is_gold_free(&content);
    let sentences = parse_dataset(&content, &dataset_path.display().to_string())?;

    let mut record = CommandRecord::new();
    record.input(&args.checkpoint)?;
    record.input(&dataset_path)?;

    let reports = super::ensure_dir(&args.out, "reports")?;
    let predictions = predict_dataset(&model, &sentences)?;
    let pred_rel = format!("reports/predictions-{}.tsv", args.split);
    write_predictions(
        &reports.join(format!("predictions-{}.tsv", args.split)),
        &predictions.sentences,
        &predictions.labels,
    )?;
    record.output(pred_rel);

    if gold_free {
        println!("dataset carries no gold labels; wrote predictions only");
        manifest::write(&args.out, "eval", &record)?;
        return Ok(());
    }

    let report = micro_prf(&predictions.gold, &predictions.pred, &model.vocabs)?;
    let categories = match category_rollup(&report.per_label, &CategoryMap::mlee()) {
        Ok(c) => Some(c),
        Err(CoreError::UnmappedLabel(label)) => {
            eprintln!("note: label {label:?} has no category mapping; skipping category rollup");
            None
        }
        Err(e) => return Err(e.into()),
    };

    let rendered = render_report(&report, categories.as_ref());
    fs::write(reports.join(format!("report-{}.txt", args.split)), &rendered)
        .with_context(|| "cannot write report".to_string())?;
    record.output(format!("reports/report-{}.txt", args.split));
    fs::write(
        reports.join(format!("report-{}.kv", args.split)),
        machine_record(&report, categories.as_ref()),
    )
    .with_context(|| "cannot write machine record".to_string())?;
    record.output(format!("reports/report-{}.kv", args.split));
    fs::write(
        reports.join(format!("confusion-{}.tsv", args.split)),
        confusion_tsv(&report),
    )
    .with_context(|| "cannot write confusion matrix".to_string())?;
    record.output(format!("reports/confusion-{}.tsv", args.split));
    if let Some(cats) = &categories {
        let mut tsv = String::from("category\tprecision\trecall\tf1\n");
        for (name, m) in &cats.rows {
            tsv.push_str(&format!("{name}\t{}\t{}\t{}\n", m.precision, m.recall, m.f1));
        }
        tsv.push_str(&format!(
            "Overall\t{}\t{}\t{}\n",
            cats.overall.precision, cats.overall.recall, cats.overall.f1
        ));
        fs::write(reports.join(format!("categories-{}.tsv", args.split)), tsv)
            .with_context(|| "cannot write category rollup".to_string())?;
        record.output(format!("reports/categories-{}.tsv", args.split));
    }

    manifest::write(&args.out, "eval", &record)?;
    print!("{rendered}");
    Ok(())
}
