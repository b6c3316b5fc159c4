//! Projection of character-offset annotations onto tokens.
//!
//! Every token whose span overlaps an annotation receives that annotation's
//! type; a multi-word annotation stamps the same type on each token it
//! spans. Tokens outside any annotation carry no type (rendered as the
//! `None` type downstream). When two annotations of the same kind overlap a
//! token, the one starting earliest wins, ties broken by the longer span.

use super::tokenize::{tokenize, TokenSpan};
use super::vocab::Vocabularies;
use super::{AnnotatedDocument, SpanAnnotation};

/// A token with resolved string-level annotation types, before vocabulary
/// indexing. `*_ann` keep the winning annotation ids for per-annotation
/// statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedToken {
    pub surface: String,
    pub start: usize,
    pub end: usize,
    pub entity_type: Option<String>,
    pub trigger_label: Option<String>,
    pub entity_ann: Option<String>,
    pub trigger_ann: Option<String>,
}

/// One sentence of aligned tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedSentence {
    pub doc_id: String,
    pub sent_index: usize,
    pub tokens: Vec<AlignedToken>,
}

/// A vocabulary-indexed token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub start: usize,
    pub end: usize,
    pub word_id: usize,
    pub entity_id: usize,
    pub label_id: usize,
}

/// One sentence as model input: word, entity-type, and gold trigger label
/// ids per token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSequence {
    pub doc_id: String,
    pub sent_index: usize,
    pub tokens: Vec<Token>,
}

impl TokenSequence {
    pub fn gold_labels(&self) -> Vec<usize> {
        self.tokens.iter().map(|t| t.label_id).collect()
    }
}

/// Picks the annotation covering `[start, end)`: earliest start wins, ties
/// broken by longer span.
fn winning<'a>(
    anns: &'a [SpanAnnotation],
    start: usize,
    end: usize,
) -> Option<&'a SpanAnnotation> {
    anns.iter()
        .filter(|a| a.start < end && start < a.end)
        .min_by_key(|a| (a.start, usize::MAX - a.end))
}

fn align_token(doc: &AnnotatedDocument, span: &TokenSpan) -> AlignedToken {
    let entity = winning(&doc.entities, span.start, span.end);
    let trigger = winning(&doc.triggers, span.start, span.end);
    AlignedToken {
        surface: span.surface.clone(),
        start: span.start,
        end: span.end,
        entity_type: entity.map(|a| a.label.clone()),
        trigger_label: trigger.map(|a| a.label.clone()),
        entity_ann: entity.map(|a| a.ann_id.clone()),
        trigger_ann: trigger.map(|a| a.ann_id.clone()),
    }
}

/// Tokenizes each sentence span of `doc` and aligns annotations onto the
/// tokens. This is the string-level path used when building datasets and
/// vocabularies.
pub fn align_sentences(
    doc: &AnnotatedDocument,
    sentence_spans: &[(usize, usize)],
) -> Vec<AlignedSentence> {
    let chars: Vec<char> = doc.text.chars().collect();
    sentence_spans
        .iter()
        .enumerate()
        .map(|(sent_index, &(s, e))| {
            let sent_text: String = chars[s..e].iter().collect();
            let tokens = tokenize(&sent_text)
                .into_iter()
                .map(|mut t| {
                    t.start += s;
                    t.end += s;
                    align_token(doc, &t)
                })
                .collect();
            AlignedSentence {
                doc_id: doc.doc_id.clone(),
                sent_index,
                tokens,
            }
        })
        .collect()
}

/// Aligns annotations onto pre-tokenized text and indexes the result
/// against frozen vocabularies. Tokens are grouped into the sentence whose
/// span contains their start offset.
pub fn align_labels(
    doc: &AnnotatedDocument,
    sentence_spans: &[(usize, usize)],
    tokens: &[TokenSpan],
    vocabs: &Vocabularies,
) -> crate::error::Result<Vec<TokenSequence>> {
    let mut out = Vec::with_capacity(sentence_spans.len());
    for (sent_index, &(s, e)) in sentence_spans.iter().enumerate() {
        let sent_tokens: Vec<AlignedToken> = tokens
            .iter()
            .filter(|t| t.start >= s && t.start < e)
            .map(|t| align_token(doc, t))
            .collect();
        let aligned = AlignedSentence {
            doc_id: doc.doc_id.clone(),
            sent_index,
            tokens: sent_tokens,
        };
        out.push(vocabs.index_sentence(&aligned)?);
    }
    Ok(out)
}
