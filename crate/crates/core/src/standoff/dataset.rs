//! Line-oriented prepared-dataset records: one token per line
//! `doc_id<TAB>sent_idx<TAB>tok_idx<TAB>surface<TAB>start<TAB>end<TAB>entity_type<TAB>trigger_label`,
//! blank line between sentences. Prediction files append a ninth
//! `predicted_label` column.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::align::{AlignedSentence, AlignedToken};
use crate::error::{Error, Result};

const NONE_FIELD: &str = "None";
const GOLD_FREE_FIELD: &str = "-";

/// True when every token line carries the `-` no-gold marker in its
/// trigger-label column (and there is at least one token).
pub fn dataset_is_gold_free(content: &str) -> bool {
    let mut any = false;
    for line in content.lines().filter(|l| !l.is_empty()) {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() >= 8 {
            any = true;
            if fields[7] != GOLD_FREE_FIELD {
                return false;
            }
        }
    }
    any
}

fn render_sentence(out: &mut String, sent: &AlignedSentence, predicted: Option<&[String]>) {
    for (tok_idx, tok) in sent.tokens.iter().enumerate() {
        let entity = tok.entity_type.as_deref().unwrap_or(NONE_FIELD);
        let label = tok.trigger_label.as_deref().unwrap_or(NONE_FIELD);
        write!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            sent.doc_id, sent.sent_index, tok_idx, tok.surface, tok.start, tok.end, entity, label
        )
        .unwrap();
        if let Some(preds) = predicted {
            out.push('\t');
            out.push_str(&preds[tok_idx]);
        }
        out.push('\n');
    }
    out.push('\n');
}

pub fn dataset_to_string(sentences: &[AlignedSentence]) -> String {
    let mut out = String::new();
    for sent in sentences {
        render_sentence(&mut out, sent, None);
    }
    out
}

pub fn write_dataset(path: &Path, sentences: &[AlignedSentence]) -> Result<()> {
    fs::write(path, dataset_to_string(sentences))
        .map_err(|e| Error::io(path.display().to_string(), e))
}

/// Writes a prediction file: the dataset columns plus one predicted label
/// per token. `predictions` is per-sentence, parallel to `sentences`.
pub fn write_predictions(
    path: &Path,
    sentences: &[AlignedSentence],
    predictions: &[Vec<String>],
) -> Result<()> {
    assert_eq!(sentences.len(), predictions.len());
    let mut out = String::new();
    for (sent, preds) in sentences.iter().zip(predictions) {
        assert_eq!(sent.tokens.len(), preds.len());
        render_sentence(&mut out, sent, Some(preds));
    }
    fs::write(path, out).map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn read_dataset(path: &Path) -> Result<Vec<AlignedSentence>> {
    let content =
        fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_dataset(&content, &path.display().to_string())
}

pub fn parse_dataset(content: &str, context: &str) -> Result<Vec<AlignedSentence>> {
    let mut sentences: Vec<AlignedSentence> = Vec::new();
    let mut current: Option<AlignedSentence> = None;
    for (lineno, line) in content.lines().enumerate() {
        let lineno = lineno + 1;
        if line.is_empty() {
            if let Some(sent) = current.take() {
                sentences.push(sent);
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 8 && fields.len() != 9 {
            return Err(Error::MalformedLine {
                context: context.to_string(),
                line: lineno,
                reason: format!("expected 8 or 9 tab-separated fields, got {}", fields.len()),
            });
        }
        let bad = |what: &str| Error::MalformedLine {
            context: context.to_string(),
            line: lineno,
            reason: format!("bad {what} field"),
        };
        let doc_id = fields[0].to_string();
        let sent_index: usize = fields[1].parse().map_err(|_| bad("sent_idx"))?;
        let start: usize = fields[4].parse().map_err(|_| bad("start"))?;
        let end: usize = fields[5].parse().map_err(|_| bad("end"))?;
        // "-" marks an absent value (gold-free datasets)
        let entity = match fields[6] {
            NONE_FIELD | GOLD_FREE_FIELD => None,
            other => Some(other.to_string()),
        };
        let label = match fields[7] {
            NONE_FIELD | GOLD_FREE_FIELD => None,
            other => Some(other.to_string()),
        };
        let tok = AlignedToken {
            surface: fields[3].to_string(),
            start,
            end,
            entity_type: entity,
            trigger_label: label,
            entity_ann: None,
            trigger_ann: None,
        };
        match &mut current {
            Some(sent) if sent.doc_id == doc_id && sent.sent_index == sent_index => {
                sent.tokens.push(tok)
            }
            Some(_) => {
                // sentence boundary without a blank line
                sentences.push(current.take().unwrap());
                current = Some(AlignedSentence {
                    doc_id,
                    sent_index,
                    tokens: vec![tok],
                });
            }
            None => {
                current = Some(AlignedSentence {
                    doc_id,
                    sent_index,
                    tokens: vec![tok],
                })
            }
        }
    }
    if let Some(sent) = current.take() {
        sentences.push(sent);
    }
    Ok(sentences)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<AlignedSentence> {
        vec![AlignedSentence {
            doc_id: "d1".into(),
            sent_index: 0,
            tokens: vec![
                AlignedToken {
                    surface: "VEGF".into(),
                    start: 0,
                    end: 4,
                    entity_type: Some("Gene_or_gene_product".into()),
                    trigger_label: None,
                    entity_ann: Some("T1".into()),
                    trigger_ann: None,
                },
                AlignedToken {
                    surface: "induces".into(),
                    start: 5,
                    end: 12,
                    entity_type: None,
                    trigger_label: Some("Positive_regulation".into()),
                    trigger_ann: Some("T2".into()),
                    entity_ann: None,
                },
            ],
        }]
    }

    #[test]
    fn roundtrip_loses_only_annotation_ids() {
        let sents = sample();
        let text = dataset_to_string(&sents);
        let back = parse_dataset(&text, "test").unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].tokens.len(), 2);
        assert_eq!(back[0].tokens[0].surface, "VEGF");
        assert_eq!(
            back[0].tokens[1].trigger_label.as_deref(),
            Some("Positive_regulation")
        );
        assert!(back[0].tokens[0].entity_ann.is_none());
    }

    #[test]
    fn line_format_matches_contract() {
        let text = dataset_to_string(&sample());
        let first = text.lines().next().unwrap();
        assert_eq!(first, "d1\t0\t0\tVEGF\t0\t4\tGene_or_gene_product\tNone");
    }

    #[test]
    fn malformed_line_is_reported_with_position() {
        let err = parse_dataset("only\tthree\tfields", "ctx").unwrap_err();
        match err {
            Error::MalformedLine { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
