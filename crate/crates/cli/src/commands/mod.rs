pub mod ablate;
pub mod eval;
pub mod predict;
pub mod prepare;
pub mod stats;
pub mod train;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use biotrig_core::standoff::{read_dataset, AlignedSentence, TokenSequence, Vocabularies};

/// A prepared-dataset directory (either the directory holding the files or
/// a run directory whose `prepared/` subdirectory holds them).
pub struct PreparedDir {
    root: PathBuf,
}

impl PreparedDir {
    pub fn open(path: &Path) -> Result<PreparedDir> {
        let root = if path.join("vocab.txt").exists() {
            path.to_path_buf()
        } else if path.join("prepared").join("vocab.txt").exists() {
            path.join("prepared")
        } else {
            bail!(
                "no prepared dataset at {} (expected vocab.txt, train.tsv, dev.tsv, test.tsv)",
                path.display()
            );
        };
        Ok(PreparedDir { root })
    }

    pub fn file(&self, name: &str) -> Result<PathBuf> {
        let p = self.root.join(name);
        if !p.exists() {
            bail!("prepared dataset is missing {}", p.display());
        }
        Ok(p)
    }

    pub fn vocab(&self) -> Result<Vocabularies> {
        let path = self.file("vocab.txt")?;
        let text = fs::read_to_string(&path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        Ok(Vocabularies::from_text(&text)?)
    }

    pub fn vocab_sha256(&self) -> Result<String> {
        let path = self.file("vocab.txt")?;
        crate::manifest::sha256_file(&path)
    }

    pub fn split(&self, name: &str) -> Result<Vec<AlignedSentence>> {
        let path = self.file(&format!("{name}.tsv"))?;
        Ok(read_dataset(&path)?)
    }
}

/// Indexes raw sentences against a vocabulary, dropping empty sentences.
pub fn index_sentences(
    raw: &[AlignedSentence],
    vocabs: &Vocabularies,
) -> Result<Vec<TokenSequence>> {
    let mut out = Vec::with_capacity(raw.len());
    for sent in raw {
        if sent.tokens.is_empty() {
            continue;
        }
        out.push(vocabs.index_sentence(sent)?);
    }
    Ok(out)
}

/// Creates the fixed output layout subdirectory on demand.
pub fn ensure_dir(out: &Path, sub: &str) -> Result<PathBuf> {
    let dir = out.join(sub);
    fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    Ok(dir)
}

/// Per-epoch log rows as tab-separated text.
pub fn log_to_tsv(log: &[biotrig_core::train::EpochLog]) -> String {
    let mut out = String::from("epoch\tmean_train_loss\tdev_precision\tdev_recall\tdev_f1\n");
    for row in log {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            row.epoch, row.mean_train_loss, row.dev_precision, row.dev_recall, row.dev_f1
        ));
    }
    out
}
