//! Versioned binary checkpoint container.
//!
//! Layout: magic `BTRGCKPT`, u32 LE format version, u64 LE header length,
//! JSON header (config, vocabularies, vocabulary hash, parameter manifest
//! with names and shapes in store order), then each parameter's values as
//! row-major little-endian f64. Loading reproduces forward outputs
//! bit-for-bit.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ModelConfig, ParameterStore, TriggerModel};
use crate::autodiff::Tensor;
use crate::error::{Error, Result};
use crate::standoff::Vocabularies;

const MAGIC: &[u8; 8] = b"BTRGCKPT";
const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ParamEntry {
    name: String,
    shape: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct Header {
    format_version: u32,
    config: ModelConfig,
    vocab: Vocabularies,
    vocab_sha256: String,
    params: Vec<ParamEntry>,
}

pub fn save_checkpoint(model: &TriggerModel, path: &Path) -> Result<()> {
    let header = Header {
        format_version: FORMAT_VERSION,
        config: model.config.clone(),
        vocab: model.vocabs.clone(),
        vocab_sha256: model.vocabs.sha256_hex(),
        params: model
            .params
            .iter()
            .map(|(name, t)| ParamEntry {
                name: name.to_string(),
                shape: t.shape(),
            })
            .collect(),
    };
    let header_json = serde_json::to_vec(&header)
        .map_err(|e| Error::BadCheckpoint(format!("header serialization failed: {e}")))?;
    let ctx = || path.display().to_string();
    let file = File::create(path).map_err(|e| Error::io(ctx(), e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| Error::io(ctx(), e);
    w.write_all(MAGIC).map_err(io_err)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes()).map_err(io_err)?;
    w.write_all(&(header_json.len() as u64).to_le_bytes())
        .map_err(io_err)?;
    w.write_all(&header_json).map_err(io_err)?;
    for (_, t) in model.params.iter() {
        t.with_values(|vals| -> Result<()> {
            for v in vals {
                w.write_all(&v.to_le_bytes()).map_err(io_err)?;
            }
            Ok(())
        })?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<TriggerModel> {
    let ctx = || path.display().to_string();
    let file = File::open(path).map_err(|e| Error::io(ctx(), e))?;
    let mut r = BufReader::new(file);
    let io_err = |e| Error::io(ctx(), e);

    let mut magic = [0u8; 8];
    r.read_exact(&mut magic).map_err(io_err)?;
    if &magic != MAGIC {
        return Err(Error::BadCheckpoint("bad magic bytes".to_string()));
    }
    let mut buf4 = [0u8; 4];
    r.read_exact(&mut buf4).map_err(io_err)?;
    let version = u32::from_le_bytes(buf4);
    if version != FORMAT_VERSION {
        return Err(Error::BadCheckpoint(format!(
            "unsupported format version {version}"
        )));
    }
    let mut buf8 = [0u8; 8];
    r.read_exact(&mut buf8).map_err(io_err)?;
    let header_len = u64::from_le_bytes(buf8) as usize;
    let mut header_json = vec![0u8; header_len];
    r.read_exact(&mut header_json).map_err(io_err)?;
    let header: Header = serde_json::from_slice(&header_json)
        .map_err(|e| Error::BadCheckpoint(format!("bad header: {e}")))?;
    if header.vocab.sha256_hex() != header.vocab_sha256 {
        return Err(Error::BadCheckpoint(
            "vocabulary hash does not match embedded vocabulary".to_string(),
        ));
    }

    let mut store = ParameterStore::new();
    for entry in &header.params {
        let n: usize = entry.shape.iter().product();
        let mut values = vec![0.0f64; n];
        for v in values.iter_mut() {
            r.read_exact(&mut buf8).map_err(io_err)?;
            *v = f64::from_le_bytes(buf8);
        }
        store.add(&entry.name, Tensor::from_vec(&entry.shape, values));
    }
    TriggerModel::from_store(header.config, header.vocab, store)
}
