//! Run manifests: one record per command, merged into `manifest.json` at
//! the output-directory root so every produced artifact is reachable from
//! it and reruns with identical inputs produce identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes =
        fs::read(path).with_context(|| format!("cannot hash input {}", path.display()))?;
    Ok(sha256_hex(&bytes))
}

#[derive(Debug, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct CommandRecord {
    pub toolkit_version: String,
    pub inputs: Vec<InputRecord>,
    pub seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
    /// Artifacts, relative to the output directory root.
    pub outputs: Vec<String>,
}

impl CommandRecord {
    pub fn new() -> CommandRecord {
        CommandRecord {
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: Vec::new(),
            seeds: Vec::new(),
            config: None,
            outputs: Vec::new(),
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(InputRecord {
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
        });
        Ok(())
    }

    pub fn input_hash(&mut self, path: String, sha256: String) {
        self.inputs.push(InputRecord { path, sha256 });
    }

    pub fn config(&mut self, value: impl Serialize) -> Result<()> {
        self.config = Some(serde_json::to_value(value)?);
        Ok(())
    }

    pub fn output(&mut self, rel: impl Into<String>) {
        self.outputs.push(rel.into());
    }
}

/// Merges `record` under `command` into `<out>/manifest.json`, keeping
/// records of other commands intact.
pub fn write(out_dir: &Path, command: &str, record: &CommandRecord) -> Result<()> {
    let path = out_dir.join("manifest.json");
    let mut all: BTreeMap<String, serde_json::Value> = match fs::read_to_string(&path) {
        Ok(text) => serde_json::from_str(&text)
            .with_context(|| format!("existing manifest {} is not valid JSON", path.display()))?,
        Err(_) => BTreeMap::new(),
    };
    all.insert(command.to_string(), serde_json::to_value(record)?);
    let text = serde_json::to_string_pretty(&all)?;
    fs::write(&path, text + "\n")
        .with_context(|| format!("cannot write manifest {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_merges_commands_deterministically() {
        let dir = tempfile::tempdir().unwrap();
        let mut rec = CommandRecord::new();
        rec.output("prepared/train.tsv");
        write(dir.path(), "prepare", &rec).unwrap();
        let mut rec2 = CommandRecord::new();
        rec2.seeds.push(5);
        write(dir.path(), "train", &rec2).unwrap();
        let text = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
        assert!(text.contains("\"prepare\""));
        assert!(text.contains("\"train\""));

        // rewriting the same records reproduces identical bytes
        let mut rec3 = CommandRecord::new();
        rec3.output("prepared/train.tsv");
        write(dir.path(), "prepare", &rec3).unwrap();
        let text2 = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
        assert_eq!(text, text2);
    }
}
