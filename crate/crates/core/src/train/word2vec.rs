//! Loader for word2vec vector files, text and binary variants.
//!
//! Both variants start with an ASCII header line `count dim`. The text
//! variant has one `word v1 .. v_dim` line per entry; the binary variant
//! has the word bytes up to a space followed by `dim` little-endian f32
//! values (widened to f64 on load) and an optional trailing newline.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Pretrained word vectors with case-insensitive fallback lookup.
#[derive(Debug, Clone)]
pub struct PretrainedVectors {
    dimension: usize,
    entries: HashMap<String, Vec<f64>>,
    /// lowercase form -> first file-order key with that lowercase form
    lower_index: HashMap<String, String>,
}

impl PretrainedVectors {
    pub fn from_entries(dimension: usize, ordered: Vec<(String, Vec<f64>)>) -> PretrainedVectors {
        let mut entries = HashMap::with_capacity(ordered.len());
        let mut lower_index = HashMap::with_capacity(ordered.len());
        for (word, vec) in ordered {
            debug_assert_eq!(vec.len(), dimension);
            let lower = word.to_lowercase();
            lower_index.entry(lower).or_insert_with(|| word.clone());
            entries.entry(word).or_insert(vec);
        }
        PretrainedVectors {
            dimension,
            entries,
            lower_index,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Exact-case match first, then the first file-order case variant.
    /// Vocabulary words are lowercased, so "exact" here means the file
    /// carried the lowercase form itself.
    pub fn lookup(&self, word: &str) -> Option<&[f64]> {
        if let Some(v) = self.entries.get(word) {
            return Some(v);
        }
        self.lower_index
            .get(&word.to_lowercase())
            .and_then(|orig| self.entries.get(orig))
            .map(|v| v.as_slice())
    }
}

fn parse_header(line: &str, context: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let count = it.next().and_then(|s| s.parse::<usize>().ok());
    let dim = it.next().and_then(|s| s.parse::<usize>().ok());
    match (count, dim, it.next()) {
        (Some(c), Some(d), None) if d > 0 => Ok((c, d)),
        _ => Err(Error::MalformedEntry {
            context: context.to_string(),
            entry: 0,
            reason: format!("bad header line {line:?}, expected \"count dim\""),
        }),
    }
}

/// Loads a text-format vector file.
pub fn load_word2vec_text(path: &Path) -> Result<PretrainedVectors> {
    let context = path.display().to_string();
    let content = fs::read_to_string(path).map_err(|e| Error::io(context.clone(), e))?;
    parse_word2vec_text(&content, &context)
}

pub fn parse_word2vec_text(content: &str, context: &str) -> Result<PretrainedVectors> {
    let mut lines = content.lines();
    let header = lines.next().ok_or_else(|| Error::MalformedEntry {
        context: context.to_string(),
        entry: 0,
        reason: "empty file".to_string(),
    })?;
    let (count, dim) = parse_header(header, context)?;
    let mut ordered = Vec::with_capacity(count);
    for (entry_no, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let entry_no = entry_no + 1;
        let mut fields = line.split_whitespace();
        let Some(word) = fields.next().map(String::from) else {
            continue; // whitespace-only line
        };
        let values: Vec<f64> = fields
            .map(|f| {
                f.parse::<f64>().map_err(|_| Error::MalformedEntry {
                    context: context.to_string(),
                    entry: entry_no,
                    reason: format!("bad float {f:?}"),
                })
            })
            .collect::<Result<_>>()?;
        if values.len() != dim {
            return Err(Error::MalformedEntry {
                context: context.to_string(),
                entry: entry_no,
                reason: format!("expected {dim} values, got {}", values.len()),
            });
        }
        ordered.push((word, values));
    }
    if ordered.len() != count {
        return Err(Error::MalformedEntry {
            context: context.to_string(),
            entry: ordered.len(),
            reason: format!("header promised {count} entries, found {}", ordered.len()),
        });
    }
    Ok(PretrainedVectors::from_entries(dim, ordered))
}

/// Loads a binary-format vector file.
pub fn load_word2vec_binary(path: &Path) -> Result<PretrainedVectors> {
    let context = path.display().to_string();
    let bytes = fs::read(path).map_err(|e| Error::io(context.clone(), e))?;
    parse_word2vec_binary(&bytes, &context)
}

pub fn parse_word2vec_binary(bytes: &[u8], context: &str) -> Result<PretrainedVectors> {
    let malformed = |entry: usize, reason: String| Error::MalformedEntry {
        context: context.to_string(),
        entry,
        reason,
    };
    let header_end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| malformed(0, "missing header line".to_string()))?;
    let header = std::str::from_utf8(&bytes[..header_end])
        .map_err(|_| malformed(0, "header is not UTF-8".to_string()))?;
    let (count, dim) = parse_header(header, context)?;

    let mut pos = header_end + 1;
    let mut ordered = Vec::with_capacity(count);
    for entry_no in 1..=count {
        while pos < bytes.len() && (bytes[pos] == b'\n' || bytes[pos] == b'\r') {
            pos += 1;
        }
        let word_start = pos;
        while pos < bytes.len() && bytes[pos] != b' ' {
            pos += 1;
        }
        if pos >= bytes.len() {
            return Err(malformed(entry_no, "unexpected end of file in word".to_string()));
        }
        let word = std::str::from_utf8(&bytes[word_start..pos])
            .map_err(|_| malformed(entry_no, "word is not UTF-8".to_string()))?
            .to_string();
        pos += 1; // the separating space
        let need = dim * 4;
        if pos + need > bytes.len() {
            return Err(malformed(entry_no, "unexpected end of file in vector".to_string()));
        }
        let values: Vec<f64> = bytes[pos..pos + need]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect();
        pos += need;
        ordered.push((word, values));
    }
    Ok(PretrainedVectors::from_entries(dim, ordered))
}

/// Loads a vector file, sniffing text vs binary. The text form is valid
/// UTF-8 with parsable floats on its second line; anything else is read as
/// binary.
pub fn load_word2vec(path: &Path) -> Result<PretrainedVectors> {
    let context = path.display().to_string();
    let bytes = fs::read(path).map_err(|e| Error::io(context.clone(), e))?;
    if looks_like_text(&bytes) {
        parse_word2vec_text(
            std::str::from_utf8(&bytes).expect("checked UTF-8"),
            &context,
        )
    } else {
        parse_word2vec_binary(&bytes, &context)
    }
}

fn looks_like_text(bytes: &[u8]) -> bool {
    let Ok(text) = std::str::from_utf8(bytes) else {
        return false;
    };
    let mut lines = text.lines();
    let Some(header) = lines.next() else {
        return false;
    };
    if parse_header(header, "sniff").is_err() {
        return false;
    }
    match lines.next() {
        // a single-line file with a valid header is a degenerate text file
        None => true,
        Some(second) => {
            let mut fields = second.split_whitespace();
            fields.next().is_some() && fields.all(|f| f.parse::<f64>().is_ok())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_two_entry_text_file() {
        let v = parse_word2vec_text("2 3\na 1 2 3\nb 4 5 6\n", "t").unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v.dimension(), 3);
        assert_eq!(v.lookup("a"), Some(&[1.0, 2.0, 3.0][..]));
        assert_eq!(v.lookup("b"), Some(&[4.0, 5.0, 6.0][..]));
    }

    #[test]
    fn short_entry_is_malformed() {
        let err = parse_word2vec_text("1 3\na 1 2\n", "t").unwrap_err();
        assert!(matches!(err, Error::MalformedEntry { .. }));
    }

    #[test]
    fn entry_count_must_match_header() {
        let err = parse_word2vec_text("3 2\na 1 2\nb 3 4\n", "t").unwrap_err();
        assert!(matches!(err, Error::MalformedEntry { .. }));
    }

    #[test]
    fn binary_roundtrip() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"2 2\n");
        bytes.extend_from_slice(b"hot ");
        bytes.extend_from_slice(&1.5f32.to_le_bytes());
        bytes.extend_from_slice(&(-2.0f32).to_le_bytes());
        bytes.push(b'\n');
        bytes.extend_from_slice(b"cold ");
        bytes.extend_from_slice(&0.25f32.to_le_bytes());
        bytes.extend_from_slice(&4.0f32.to_le_bytes());
        bytes.push(b'\n');
        let v = parse_word2vec_binary(&bytes, "t").unwrap();
        assert_eq!(v.lookup("hot"), Some(&[1.5, -2.0][..]));
        assert_eq!(v.lookup("cold"), Some(&[0.25, 4.0][..]));
    }

    #[test]
    fn truncated_binary_is_malformed() {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"1 4\nword ");
        bytes.extend_from_slice(&1.0f32.to_le_bytes());
        let err = parse_word2vec_binary(&bytes, "t").unwrap_err();
        assert!(matches!(err, Error::MalformedEntry { .. }));
    }

    #[test]
    fn case_insensitive_lookup_prefers_exact() {
        let v = PretrainedVectors::from_entries(
            1,
            vec![
                ("VEGF".to_string(), vec![1.0]),
                ("vegf".to_string(), vec![2.0]),
            ],
        );
        // vocabulary words are lowercase; the file's own lowercase entry wins
        assert_eq!(v.lookup("vegf"), Some(&[2.0][..]));
        // no lowercase form in the file: fall back to the case variant
        let v2 = PretrainedVectors::from_entries(1, vec![("VEGF".to_string(), vec![1.0])]);
        assert_eq!(v2.lookup("vegf"), Some(&[1.0][..]));
        assert_eq!(v2.lookup("unknown"), None);
    }

    #[test]
    fn sniffer_distinguishes_formats() {
        assert!(looks_like_text(b"2 3\na 1 2 3\nb 4 5 6\n"));
        let mut bin = Vec::new();
        bin.extend_from_slice(b"1 1\nw ");
        bin.extend_from_slice(&1.0f32.to_le_bytes());
        assert!(!looks_like_text(&bin));
    }
}
