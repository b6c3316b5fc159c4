//! `biotrig prepare`: standoff triples -> tokenized, aligned, line-oriented
//! datasets plus the vocabulary and deferred-label set.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;

use biotrig_core::standoff::{
    align_sentences, annotation_stats, corpus_stats, dataset_to_string, filter_rare_labels,
    parse_standoff, split_sentences, AlignedSentence, AnnotatedDocument, Vocabularies,
};

use crate::manifest::{self, CommandRecord};

#[derive(Debug, Args)]
pub struct PrepareArgs {
    /// Corpus root holding train/, dev/, test/ subdirectories of standoff
    /// triples (defaults to $BIOTRIG_CORPUS)
    #[arg(long, env = "BIOTRIG_CORPUS")]
    pub corpus: PathBuf,
    /// Output run directory (datasets land in <out>/prepared/)
    #[arg(long)]
    pub out: PathBuf,
    /// Trigger classes with test-set count <= this threshold are excluded
    /// from training and scored as forced false negatives
    #[arg(long, default_value_t = 10)]
    pub rare_threshold: u64,
}

const SPLIT_ALIASES: [(&str, &[&str]); 3] = [
    ("train", &["train", "training"]),
    ("dev", &["dev", "devel", "development"]),
    ("test", &["test", "testing"]),
];

fn find_split_dir(corpus: &Path, canonical: &str, aliases: &[&str]) -> Result<PathBuf> {
    for alias in aliases {
        let dir = corpus.join(alias);
        if dir.is_dir() {
            return Ok(dir);
        }
    }
    bail!(
        "corpus {} has no {canonical} split (looked for {})",
        corpus.display(),
        aliases.join(", ")
    );
}

fn load_split(dir: &Path) -> Result<(Vec<AnnotatedDocument>, String)> {
    let mut stems: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot read corpus split {}", dir.display()))?
        .filter_map(|entry| {
            let path = entry.ok()?.path();
            (path.extension().and_then(|e| e.to_str()) == Some("txt"))
                .then(|| path.with_extension(""))
        })
        .collect();
    stems.sort();
    if stems.is_empty() {
        bail!("corpus split {} contains no .txt documents", dir.display());
    }
    let mut docs = Vec::with_capacity(stems.len());
    let mut hash_lines = String::new();
    for stem in &stems {
        let doc_id = stem
            .file_name()
            .map(|n| n.to_string_lossy().to_string())
            .unwrap_or_default();
        let txt_path = stem.with_extension("txt");
        let a1_path = stem.with_extension("a1");
        let a2_path = stem.with_extension("a2");
        let text = fs::read_to_string(&txt_path)
            .with_context(|| format!("cannot read {}", txt_path.display()))?;
        if !a1_path.exists() {
            bail!("document {doc_id}: missing entity file {}", a1_path.display());
        }
        if !a2_path.exists() {
            bail!("document {doc_id}: missing trigger file {}", a2_path.display());
        }
        let a1 = fs::read_to_string(&a1_path)
            .with_context(|| format!("cannot read {}", a1_path.display()))?;
        let a2 = fs::read_to_string(&a2_path)
            .with_context(|| format!("cannot read {}", a2_path.display()))?;
        for (path, content) in [(&txt_path, &text), (&a1_path, &a1), (&a2_path, &a2)] {
            writeln!(
                hash_lines,
                "{}:{}",
                path.file_name().unwrap().to_string_lossy(),
                manifest::sha256_hex(content.as_bytes())
            )
            .unwrap();
        }
        docs.push(parse_standoff(&doc_id, &text, &a1, &a2)?);
    }
    Ok((docs, manifest::sha256_hex(hash_lines.as_bytes())))
}

fn align_split(docs: &[AnnotatedDocument]) -> Vec<AlignedSentence> {
    docs.iter()
        .flat_map(|doc| {
            let spans = split_sentences(&doc.text, &doc.annotation_spans());
            align_sentences(doc, &spans)
                .into_iter()
                .filter(|s| !s.tokens.is_empty())
        })
        .collect()
}

fn stats_tsv(
    splits: &[(&str, &(BTreeMap<String, u64>, BTreeMap<String, u64>))],
) -> String {
    let mut labels: BTreeMap<(&str, String), ()> = BTreeMap::new();
    for (_, (trig, ent)) in splits {
        for label in trig.keys() {
            labels.insert(("trigger", label.clone()), ());
        }
        for label in ent.keys() {
            labels.insert(("entity", label.clone()), ());
        }
    }
    let mut out = String::from("kind\tlabel\ttrain\tdev\ttest\n");
    for ((kind, label), _) in labels {
        out.push_str(kind);
        out.push('\t');
        out.push_str(&label);
        for (_, (trig, ent)) in splits {
            let map = if kind == "trigger" { trig } else { ent };
            write!(out, "\t{}", map.get(&label).copied().unwrap_or(0)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn run(args: &PrepareArgs) -> Result<()> {
    let mut record = CommandRecord::new();
    let mut splits = Vec::new();
    for (canonical, aliases) in SPLIT_ALIASES {
        let dir = find_split_dir(&args.corpus, canonical, aliases)?;
        let (docs, hash) = load_split(&dir)?;
        record.input_hash(dir.display().to_string(), hash);
        splits.push((canonical, docs));
    }
    let aligned: Vec<(&str, Vec<AlignedSentence>)> = splits
        .iter()
        .map(|(name, docs)| (*name, align_split(docs)))
        .collect();

    // vocabulary from training + development portions only
    let mut vocab_source = aligned[0].1.clone();
    vocab_source.extend(aligned[1].1.iter().cloned());
    let mut vocabs = Vocabularies::build(&vocab_source)?;

    // deferred labels from test-split trigger counts
    let (test_trigger_counts, _) = corpus_stats(&aligned[2].1);
    let (_, deferred_names) = filter_rare_labels(&test_trigger_counts, args.rare_threshold);
    let deferred = deferred_names
        .iter()
        .filter_map(|name| vocabs.label_id(Some(name)).ok())
        .collect();
    vocabs.set_deferred_labels(deferred);

    let prepared = super::ensure_dir(&args.out, "prepared")?;
    for (name, sentences) in &aligned {
        let path = prepared.join(format!("{name}.tsv"));
        fs::write(&path, dataset_to_string(sentences))
            .with_context(|| format!("cannot write {}", path.display()))?;
        record.output(format!("prepared/{name}.tsv"));
    }
    fs::write(prepared.join("vocab.txt"), vocabs.to_text())
        .with_context(|| "cannot write vocabulary file".to_string())?;
    record.output("prepared/vocab.txt");

    // parse-level statistics per split; also sanity-check that the
    // sequence-level per-annotation counts agree (token cover)
    let per_split: Vec<(BTreeMap<String, u64>, BTreeMap<String, u64>)> = splits
        .iter()
        .zip(&aligned)
        .map(|((name, docs), (_, sents))| {
            let parse_level = annotation_stats(docs);
            let seq_level = corpus_stats(sents);
            if parse_level != seq_level {
                eprintln!(
                    "warning: {name}: tokenization dropped annotations \
                     (parse-level and sequence-level counts differ)"
                );
            }
            parse_level
        })
        .collect();
    let named: Vec<(&str, &(BTreeMap<String, u64>, BTreeMap<String, u64>))> = splits
        .iter()
        .map(|(name, _)| *name)
        .zip(per_split.iter())
        .collect();
    fs::write(prepared.join("stats.tsv"), stats_tsv(&named))
        .with_context(|| "cannot write stats file".to_string())?;
    record.output("prepared/stats.tsv");

    record.config(serde_json::json!({ "rare_threshold": args.rare_threshold }))?;
    manifest::write(&args.out, "prepare", &record)?;

    let deferred_list: Vec<&str> = vocabs
        .deferred_labels()
        .iter()
        .map(|&id| vocabs.label_name(id))
        .collect();
    println!(
        "prepared {} train / {} dev / {} test sentences; {} words, {} entity types, {} labels",
        aligned[0].1.len(),
        aligned[1].1.len(),
        aligned[2].1.len(),
        vocabs.word_count(),
        vocabs.entity_count(),
        vocabs.label_count()
    );
    println!(
        "deferred labels (test count <= {}): {}",
        args.rare_threshold,
        if deferred_list.is_empty() {
            "none".to_string()
        } else {
            deferred_list.join(", ")
        }
    );
    Ok(())
}
