//! `biotrig train`: SGD training with dev-set model selection, optional
//! best-of-N multi-run protocol, and optional train+dev final retraining.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use biotrig_core::error::Error as CoreError;
use biotrig_core::eval::EvalReport;
use biotrig_core::model::{save_checkpoint, ModelConfig, TriggerModel};
use biotrig_core::standoff::{TokenSequence, Vocabularies};
use biotrig_core::train::{
    evaluate, load_word2vec, load_word2vec_binary, load_word2vec_text, mask_deferred,
    stream_rng, train, train_epoch, EpochLog, PretrainedVectors, TrainConfig,
};

use crate::config::{merge, ConfigFile, EffectiveConfig, TrainOverrides};
use crate::manifest::{self, CommandRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum VectorsFormat {
    Auto,
    Text,
    Binary,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Prepared dataset directory (from `biotrig prepare`)
    #[arg(long)]
    pub prepared: PathBuf,
    /// Output run directory
    #[arg(long)]
    pub out: PathBuf,
    /// Pretrained word2vec vector file for word-embedding initialization
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Vector file format
    #[arg(long, value_enum, default_value_t = VectorsFormat::Auto)]
    pub vectors_format: VectorsFormat,
    /// Flat key=value configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: TrainOverrides,
}

pub struct LoadedData {
    pub vocabs: Vocabularies,
    pub train_masked: Vec<TokenSequence>,
    pub dev: Vec<TokenSequence>,
    pub dev_masked: Vec<TokenSequence>,
    pub test: Vec<TokenSequence>,
}

pub fn load_prepared_data(prepared: &super::PreparedDir) -> Result<LoadedData> {
    let vocabs = prepared.vocab()?;
    let train_raw = prepared.split("train")?;
    let dev_raw = prepared.split("dev")?;
    let test_raw = prepared.split("test")?;
    let train_seqs = super::index_sentences(&train_raw, &vocabs)?;
    let dev = super::index_sentences(&dev_raw, &vocabs)?;
    let test = super::index_sentences(&test_raw, &vocabs)?;
    let train_masked = mask_deferred(&train_seqs, &vocabs);
    let dev_masked = mask_deferred(&dev, &vocabs);
    Ok(LoadedData {
        vocabs,
        train_masked,
        dev,
        dev_masked,
        test,
    })
}

pub fn load_vectors(
    path: &std::path::Path,
    format: VectorsFormat,
    expected_dim: usize,
) -> Result<PretrainedVectors> {
    let vectors = match format {
        VectorsFormat::Auto => load_word2vec(path)?,
        VectorsFormat::Text => load_word2vec_text(path)?,
        VectorsFormat::Binary => load_word2vec_binary(path)?,
    };
    if vectors.dimension() != expected_dim {
        return Err(CoreError::DimensionMismatch {
            context: format!("vector file {} vs word_dim", path.display()),
            expected: expected_dim,
            actual: vectors.dimension(),
        }
        .into());
    }
    Ok(vectors)
}

pub struct RunArtifacts {
    pub seed: u64,
    pub model: TriggerModel,
    pub log: Vec<EpochLog>,
    pub best_epoch: usize,
    pub dev_f1: f64,
    pub test_report: EvalReport,
}

/// One seeded run: train with dev selection, optionally retrain on
/// train+dev for the selected epoch count, then score the test split.
pub fn run_one(
    cfg: &EffectiveConfig,
    data: &LoadedData,
    vectors: Option<&PretrainedVectors>,
    seed: u64,
) -> Result<RunArtifacts> {
    let model_cfg = ModelConfig {
        seed,
        ..cfg.model.clone()
    };
    let train_cfg = TrainConfig {
        seed,
        ..cfg.train.clone()
    };
    let model = TriggerModel::new(model_cfg.clone(), data.vocabs.clone(), vectors)?;
    let outcome = train(&model, &data.train_masked, &data.dev, &train_cfg)?;

    let (model, log) = if cfg.combine_train_dev {
        // retrain from scratch on train+dev for the selected epoch count
        let mut combined = data.train_masked.clone();
        combined.extend(data.dev_masked.iter().cloned());
        let final_model = TriggerModel::new(model_cfg, data.vocabs.clone(), vectors)?;
        let mut order_rng = stream_rng(seed, 1);
        let mut dropout_rng = stream_rng(seed, 2);
        let mut log = Vec::with_capacity(outcome.best_epoch);
        for epoch in 1..=outcome.best_epoch {
            let mean_loss = train_epoch(
                &final_model,
                &combined,
                &train_cfg,
                &mut order_rng,
                &mut dropout_rng,
            )?;
            let report = evaluate(&final_model, &data.dev)?;
            log.push(EpochLog {
                epoch,
                mean_train_loss: mean_loss,
                dev_precision: report.micro.precision,
                dev_recall: report.micro.recall,
                dev_f1: report.micro.f1,
            });
        }
        (final_model, log)
    } else {
        (model, outcome.log)
    };

    let test_report = evaluate(&model, &data.test)?;
    Ok(RunArtifacts {
        seed,
        model,
        log,
        best_epoch: outcome.best_epoch,
        dev_f1: outcome.best_dev_f1,
        test_report,
    })
}

pub fn summary_tsv(runs: &[&RunArtifacts]) -> String {
    let mut out =
        String::from("seed\tbest_epoch\tdev_f1\ttest_precision\ttest_recall\ttest_f1\n");
    for run in runs {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            run.seed,
            run.best_epoch,
            run.dev_f1,
            run.test_report.micro.precision,
            run.test_report.micro.recall,
            run.test_report.micro.f1
        )
        .unwrap();
    }
    out
}

pub fn run(args: &TrainArgs) -> Result<()> {
    let file_cfg = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let cfg = merge(&file_cfg, &args.overrides)?;

    let prepared = super::PreparedDir::open(&args.prepared)?;
    let data = load_prepared_data(&prepared)?;
    let vectors = match &args.vectors {
        Some(path) => Some(load_vectors(path, args.vectors_format, cfg.model.word_dim)?),
        None => None,
    };
    if data.train_masked.is_empty() {
        bail!("prepared train split has no non-empty sentences");
    }
    if let Some(v) = &vectors {
        let covered = data
            .vocabs
            .words()
            .iter()
            .filter(|w| v.lookup(w).is_some())
            .count();
        println!(
            "pretrained vectors: {covered}/{} vocabulary words covered",
            data.vocabs.word_count()
        );
    }

    let mut record = CommandRecord::new();
    record.input(&prepared.file("vocab.txt")?)?;
    for split in ["train", "dev", "test"] {
        record.input(&prepared.file(&format!("{split}.tsv"))?)?;
    }
    if let Some(path) = &args.vectors {
        record.input(path)?;
    }
    if let Some(path) = &args.config {
        record.input(path)?;
    }
    record.config(&cfg)?;

    let checkpoints = super::ensure_dir(&args.out, "checkpoints")?;
    let logs = super::ensure_dir(&args.out, "logs")?;
    let reports = super::ensure_dir(&args.out, "reports")?;

    let mut runs = Vec::with_capacity(cfg.train.runs);
    for r in 0..cfg.train.runs {
        let seed = cfg.train.seed + r as u64;
        record.seeds.push(seed);
        let artifacts = run_one(&cfg, &data, vectors.as_ref(), seed)?;
        let ckpt_rel = format!("checkpoints/run-{seed}.ckpt");
        save_checkpoint(&artifacts.model, &checkpoints.join(format!("run-{seed}.ckpt")))?;
        record.output(ckpt_rel);
        let log_rel = format!("logs/train-seed{seed}.tsv");
        fs::write(logs.join(format!("train-seed{seed}.tsv")), super::log_to_tsv(&artifacts.log))
            .with_context(|| "cannot write training log".to_string())?;
        record.output(log_rel);
        println!(
            "run seed {seed}: best epoch {} (dev F1 {:.2}), test F1 {:.2}",
            artifacts.best_epoch,
            artifacts.dev_f1 * 100.0,
            artifacts.test_report.micro.f1 * 100.0
        );
        runs.push(artifacts);
    }

    let best = runs
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| {
            a.test_report
                .micro
                .f1
                .partial_cmp(&b.test_report.micro.f1)
                .expect("finite F1")
        })
        .map(|(i, _)| i)
        .expect("at least one run");
    let refs: Vec<&RunArtifacts> = runs.iter().collect();
    let mut summary = summary_tsv(&refs);
    let n = runs.len() as f64;
    let mean = runs.iter().map(|r| r.test_report.micro.f1).sum::<f64>() / n;
    let std = if runs.len() > 1 {
        (runs
            .iter()
            .map(|r| (r.test_report.micro.f1 - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0))
            .sqrt()
    } else {
        0.0
    };
    writeln!(
        summary,
        "# best seed {} test_f1 {}; mean {} std {}",
        runs[best].seed, runs[best].test_report.micro.f1, mean, std
    )
    .unwrap();
    fs::write(reports.join("train-summary.tsv"), &summary)
        .with_context(|| "cannot write train summary".to_string())?;
    record.output("reports/train-summary.tsv");

    fs::copy(
        checkpoints.join(format!("run-{}.ckpt", runs[best].seed)),
        checkpoints.join("best.ckpt"),
    )
    .with_context(|| "cannot write best checkpoint".to_string())?;
    record.output("checkpoints/best.ckpt");

    manifest::write(&args.out, "train", &record)?;
    println!(
        "best of {}: seed {} test F1 {:.2} (mean {:.2} ± {:.2})",
        runs.len(),
        runs[best].seed,
        runs[best].test_report.micro.f1 * 100.0,
        mean * 100.0,
        std * 100.0
    );
    Ok(())
}
