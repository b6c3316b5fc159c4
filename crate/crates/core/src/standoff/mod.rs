//! BioNLP-style standoff corpus handling: parsing `.txt`/`.a1`/`.a2`
//! triples, sentence splitting, tokenization, and projection of
//! character-offset annotations onto token-level entity and trigger labels.

mod align;
mod dataset;
mod tokenize;
mod vocab;

pub use align::{align_labels, align_sentences, AlignedSentence, AlignedToken, Token, TokenSequence};
pub use dataset::{
    dataset_is_gold_free, dataset_to_string, parse_dataset, read_dataset, write_dataset,
    write_predictions,
};
pub use tokenize::{split_sentences, tokenize, TokenSpan};
pub use vocab::{filter_rare_labels, Vocabularies, NONE_LABEL, NUM_WORD, UNK_WORD};

use std::collections::BTreeMap;
use std::collections::HashSet;

use crate::error::{Error, Result};

/// One standoff annotation: a typed `[start, end)` code-point span whose
/// surface must equal the corresponding slice of the document text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanAnnotation {
    pub ann_id: String,
    pub label: String,
    pub start: usize,
    pub end: usize,
    pub surface: String,
}

/// Source text plus its entity (`.a1`) and trigger (`.a2`) annotations.
#[derive(Debug, Clone)]
pub struct AnnotatedDocument {
    pub doc_id: String,
    pub text: String,
    pub entities: Vec<SpanAnnotation>,
    pub triggers: Vec<SpanAnnotation>,
}

impl AnnotatedDocument {
    /// Spans of all annotations, used to protect sentence splitting.
    pub fn annotation_spans(&self) -> Vec<(usize, usize)> {
        self.entities
            .iter()
            .chain(&self.triggers)
            .map(|a| (a.start, a.end))
            .collect()
    }
}

/// Parses a standoff triple. All `T` lines in `a1` become entities and all
/// `T` lines in `a2` become triggers; event (`E`), modification (`M`),
/// relation (`R`), attribute (`A`) and comment lines are ignored. Offsets
/// are validated against `text`.
pub fn parse_standoff(doc_id: &str, text: &str, a1: &str, a2: &str) -> Result<AnnotatedDocument> {
    let chars: Vec<char> = text.chars().collect();
    let mut seen_ids = HashSet::new();
    let entities = parse_t_lines(doc_id, "a1", a1, &chars, &mut seen_ids)?;
    let triggers = parse_t_lines(doc_id, "a2", a2, &chars, &mut seen_ids)?;
    Ok(AnnotatedDocument {
        doc_id: doc_id.to_string(),
        text: text.to_string(),
        entities,
        triggers,
    })
}

fn parse_t_lines(
    doc_id: &str,
    kind: &str,
    content: &str,
    chars: &[char],
    seen_ids: &mut HashSet<String>,
) -> Result<Vec<SpanAnnotation>> {
    let context = format!("{doc_id}.{kind}");
    let malformed = |line: usize, reason: String| Error::MalformedLine {
        context: context.clone(),
        line,
        reason,
    };
    let mut anns = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        let lineno = lineno + 1;
        if line.is_empty() || !line.starts_with('T') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(malformed(
                lineno,
                format!("expected 3 tab-separated fields, got {}", fields.len()),
            ));
        }
        let (ann_id, middle, surface) = (fields[0], fields[1], fields[2]);
        if middle.contains(';') {
            return Err(malformed(
                lineno,
                "discontinuous spans are not supported".to_string(),
            ));
        }
        let parts: Vec<&str> = middle.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(malformed(
                lineno,
                format!("expected \"Type start end\", got {middle:?}"),
            ));
        }
        let label = parts[0].to_string();
        let start: usize = parts[1]
            .parse()
            .map_err(|_| malformed(lineno, format!("bad start offset {:?}", parts[1])))?;
        let end: usize = parts[2]
            .parse()
            .map_err(|_| malformed(lineno, format!("bad end offset {:?}", parts[2])))?;
        if start >= end || end > chars.len() {
            return Err(malformed(
                lineno,
                format!("span {start}..{end} out of bounds for text of length {}", chars.len()),
            ));
        }
        let found: String = chars[start..end].iter().collect();
        if found != surface {
            return Err(Error::OffsetMismatch {
                doc_id: doc_id.to_string(),
                ann_id: ann_id.to_string(),
                start,
                end,
                expected: surface.to_string(),
                found,
            });
        }
        if !seen_ids.insert(ann_id.to_string()) {
            return Err(malformed(lineno, format!("duplicate annotation id {ann_id}")));
        }
        anns.push(SpanAnnotation {
            ann_id: ann_id.to_string(),
            label,
            start,
            end,
            surface: surface.to_string(),
        });
    }
    Ok(anns)
}

/// Per-annotation trigger and entity counts over aligned sentences.
/// Each annotation counts once no matter how many tokens it spans.
pub fn corpus_stats(
    sentences: &[AlignedSentence],
) -> (BTreeMap<String, u64>, BTreeMap<String, u64>) {
    let mut trigger_counts = BTreeMap::new();
    let mut entity_counts = BTreeMap::new();
    let mut seen_triggers = HashSet::new();
    let mut seen_entities = HashSet::new();
    for sent in sentences {
        for tok in &sent.tokens {
            if let (Some(label), Some(ann)) = (&tok.trigger_label, &tok.trigger_ann) {
                if seen_triggers.insert((sent.doc_id.clone(), ann.clone())) {
                    *trigger_counts.entry(label.clone()).or_insert(0) += 1;
                }
            }
            if let (Some(label), Some(ann)) = (&tok.entity_type, &tok.entity_ann) {
                if seen_entities.insert((sent.doc_id.clone(), ann.clone())) {
                    *entity_counts.entry(label.clone()).or_insert(0) += 1;
                }
            }
        }
    }
    (trigger_counts, entity_counts)
}

/// Trigger and entity counts straight from the parsed annotations,
/// independent of tokenization.
pub fn annotation_stats(
    docs: &[AnnotatedDocument],
) -> (BTreeMap<String, u64>, BTreeMap<String, u64>) {
    let mut trigger_counts = BTreeMap::new();
    let mut entity_counts = BTreeMap::new();
    for doc in docs {
        for t in &doc.triggers {
            *trigger_counts.entry(t.label.clone()).or_insert(0) += 1;
        }
        for e in &doc.entities {
            *entity_counts.entry(e.label.clone()).or_insert(0) += 1;
        }
    }
    (trigger_counts, entity_counts)
}
