//! Deterministic synthetic corpora for tests and benchmarks.
//!
//! Labels are a pure function of word identity, so the corpora are
//! separable by construction and a working model must be able to overfit
//! them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::standoff::{Token, TokenSequence, Vocabularies};

/// Shape of a generated corpus.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub sentences: usize,
    pub vocab_words: usize,
    pub label_names: Vec<String>,
    pub entity_names: Vec<String>,
    pub min_len: usize,
    pub max_len: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            sentences: 50,
            vocab_words: 40,
            label_names: vec!["Alpha".into(), "Beta".into(), "Gamma".into()],
            entity_names: vec!["Cell".into(), "Organism".into()],
            min_len: 4,
            max_len: 8,
            seed: 0,
        }
    }
}

/// The deterministic word→label rule: words at index `w` (0-based over the
/// content words, after the two reserved ids) get label `w % (labels+2)`
/// when that falls inside the label range, otherwise None. Entity types
/// cycle over `w % (entities+1)`.
fn label_for_word(content_index: usize, label_count: usize) -> usize {
    let slot = content_index % (label_count + 2);
    if slot >= 1 && slot <= label_count {
        slot
    } else {
        0
    }
}

fn entity_for_word(content_index: usize, entity_count: usize) -> usize {
    content_index % (entity_count + 1)
}

/// Generates the corpus and its vocabularies. Word surfaces are
/// `w0..w{n-1}`; every occurrence of a word carries the same entity type
/// and gold label, so token labels are a deterministic function of word
/// identity.
pub fn synthetic_corpus(spec: &SyntheticSpec) -> (Vec<TokenSequence>, Vocabularies) {
    let words: Vec<String> = (0..spec.vocab_words).map(|i| format!("w{i}")).collect();
    let word_refs: Vec<&str> = words.iter().map(String::as_str).collect();
    let label_refs: Vec<&str> = spec.label_names.iter().map(String::as_str).collect();
    let entity_refs: Vec<&str> = spec.entity_names.iter().map(String::as_str).collect();
    let vocabs = Vocabularies::from_inventories(&word_refs, &entity_refs, &label_refs);

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n_labels = spec.label_names.len();
    let n_entities = spec.entity_names.len();
    let sentences = (0..spec.sentences)
        .map(|s| {
            let len = rng.random_range(spec.min_len..=spec.max_len);
            let tokens = (0..len)
                .map(|k| {
                    let content = rng.random_range(0..spec.vocab_words);
                    let word_id = content + 2; // after <unk>, <num>
                    Token {
                        surface: format!("w{content}"),
                        start: k * 3,
                        end: k * 3 + 2,
                        word_id,
                        entity_id: entity_for_word(content, n_entities),
                        label_id: label_for_word(content, n_labels),
                    }
                })
                .collect();
            TokenSequence {
                doc_id: format!("synth{s}"),
                sent_index: 0,
                tokens,
            }
        })
        .collect();
    (sentences, vocabs)
}

/// Token accuracy of model predictions against gold labels.
pub fn token_accuracy(gold: &[usize], pred: &[usize]) -> f64 {
    assert_eq!(gold.len(), pred.len());
    if gold.is_empty() {
        return 0.0;
    }
    let hits = gold.iter().zip(pred).filter(|(g, p)| g == p).count();
    hits as f64 / gold.len() as f64
}
