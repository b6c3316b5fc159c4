//! Word, entity-type, and trigger-label dictionaries.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::align::{AlignedSentence, Token, TokenSequence};
use crate::error::{Error, Result};

/// Reserved word index 0: out-of-vocabulary words.
pub const UNK_WORD: &str = "<unk>";
/// Reserved word index 1: out-of-vocabulary all-digit tokens.
pub const NUM_WORD: &str = "<num>";
/// Index 0 of both the entity and the trigger-label dictionaries.
pub const NONE_LABEL: &str = "None";

/// The three dictionaries plus the deferred-label set.
///
/// Indices are dense, 0-based, and stable across save/load: the `Vec`s are
/// the source of truth and the hash maps are derived. Words are lowercased
/// before indexing. `None` is entity id 0 and label id 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "VocabulariesSer", into = "VocabulariesSer")]
pub struct Vocabularies {
    words: Vec<String>,
    entities: Vec<String>,
    labels: Vec<String>,
    deferred: BTreeSet<usize>,
    #[serde(skip)]
    word_index: HashMap<String, usize>,
    #[serde(skip)]
    entity_index: HashMap<String, usize>,
    #[serde(skip)]
    label_index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct VocabulariesSer {
    words: Vec<String>,
    entities: Vec<String>,
    labels: Vec<String>,
    deferred: Vec<usize>,
}

impl From<VocabulariesSer> for Vocabularies {
    fn from(s: VocabulariesSer) -> Self {
        Vocabularies::from_parts(s.words, s.entities, s.labels, s.deferred.into_iter().collect())
    }
}

impl From<Vocabularies> for VocabulariesSer {
    fn from(v: Vocabularies) -> Self {
        VocabulariesSer {
            words: v.words,
            entities: v.entities,
            labels: v.labels,
            deferred: v.deferred.into_iter().collect(),
        }
    }
}

fn index_of(items: &[String]) -> HashMap<String, usize> {
    items
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i))
        .collect()
}

fn is_all_digits(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_digit())
}

impl Vocabularies {
    fn from_parts(
        words: Vec<String>,
        entities: Vec<String>,
        labels: Vec<String>,
        deferred: BTreeSet<usize>,
    ) -> Self {
        let word_index = index_of(&words);
        let entity_index = index_of(&entities);
        let label_index = index_of(&labels);
        Vocabularies {
            words,
            entities,
            labels,
            deferred,
            word_index,
            entity_index,
            label_index,
        }
    }

    /// Builds dictionaries from aligned sentences (training + development
    /// portions only). Words are lowercased; entity and label inventories
    /// are enumerated in first-occurrence order after the reserved `None`.
    pub fn build(sentences: &[AlignedSentence]) -> Result<Vocabularies> {
        if sentences.iter().all(|s| s.tokens.is_empty()) {
            return Err(Error::EmptyCorpus);
        }
        let mut words = vec![UNK_WORD.to_string(), NUM_WORD.to_string()];
        let mut word_seen: HashMap<String, usize> = index_of(&words);
        let mut entities = vec![NONE_LABEL.to_string()];
        let mut entity_seen: HashMap<String, usize> = index_of(&entities);
        let mut labels = vec![NONE_LABEL.to_string()];
        let mut label_seen: HashMap<String, usize> = index_of(&labels);
        for sent in sentences {
            for tok in &sent.tokens {
                let w = tok.surface.to_lowercase();
                if !word_seen.contains_key(&w) {
                    word_seen.insert(w.clone(), words.len());
                    words.push(w);
                }
                if let Some(e) = &tok.entity_type {
                    if !entity_seen.contains_key(e) {
                        entity_seen.insert(e.clone(), entities.len());
                        entities.push(e.clone());
                    }
                }
                if let Some(l) = &tok.trigger_label {
                    if !label_seen.contains_key(l) {
                        label_seen.insert(l.clone(), labels.len());
                        labels.push(l.clone());
                    }
                }
            }
        }
        Ok(Vocabularies::from_parts(words, entities, labels, BTreeSet::new()))
    }

    /// Builds a vocabulary directly from explicit inventories (tests and
    /// synthetic corpora). `None` and the reserved words are prepended.
    pub fn from_inventories(
        words: &[&str],
        entities: &[&str],
        labels: &[&str],
    ) -> Vocabularies {
        let mut ws = vec![UNK_WORD.to_string(), NUM_WORD.to_string()];
        ws.extend(words.iter().map(|w| w.to_lowercase()));
        let mut es = vec![NONE_LABEL.to_string()];
        es.extend(entities.iter().map(|e| e.to_string()));
        let mut ls = vec![NONE_LABEL.to_string()];
        ls.extend(labels.iter().map(|l| l.to_string()));
        Vocabularies::from_parts(ws, es, ls, BTreeSet::new())
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn entity_names(&self) -> &[String] {
        &self.entities
    }

    pub fn label_names(&self) -> &[String] {
        &self.labels
    }

    pub fn none_entity_id(&self) -> usize {
        0
    }

    pub fn none_label_id(&self) -> usize {
        0
    }

    pub fn unk_word_id(&self) -> usize {
        0
    }

    /// Word id for a raw surface: lowercased exact match, else `<num>` for
    /// all-digit tokens, else `<unk>`.
    pub fn word_id(&self, surface: &str) -> usize {
        let w = surface.to_lowercase();
        if let Some(&id) = self.word_index.get(&w) {
            return id;
        }
        if is_all_digits(&w) {
            self.word_index[NUM_WORD]
        } else {
            self.word_index[UNK_WORD]
        }
    }

    pub fn entity_id(&self, ty: Option<&str>) -> Result<usize> {
        match ty {
            None => Ok(0),
            Some(t) => self
                .entity_index
                .get(t)
                .copied()
                .ok_or_else(|| Error::UnknownLabel(t.to_string())),
        }
    }

    pub fn label_id(&self, label: Option<&str>) -> Result<usize> {
        match label {
            None => Ok(0),
            Some(l) => self
                .label_index
                .get(l)
                .copied()
                .ok_or_else(|| Error::UnknownLabel(l.to_string())),
        }
    }

    pub fn label_name(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn entity_name(&self, id: usize) -> &str {
        &self.entities[id]
    }

    /// Ids of labels excluded from training; their gold tokens score as
    /// forced false negatives.
    pub fn deferred_labels(&self) -> &BTreeSet<usize> {
        &self.deferred
    }

    pub fn set_deferred_labels(&mut self, deferred: BTreeSet<usize>) {
        assert!(
            !deferred.contains(&self.none_label_id()),
            "the None label cannot be deferred"
        );
        self.deferred = deferred;
    }

    /// Non-None labels that stay active during training.
    pub fn train_label_set(&self) -> BTreeSet<usize> {
        (1..self.labels.len())
            .filter(|id| !self.deferred.contains(id))
            .collect()
    }

    /// Training-time view of a gold label: deferred labels collapse to
    /// `None`.
    pub fn train_label(&self, label_id: usize) -> usize {
        if self.deferred.contains(&label_id) {
            self.none_label_id()
        } else {
            label_id
        }
    }

    /// Indexes one aligned sentence into model input.
    pub fn index_sentence(&self, sent: &AlignedSentence) -> Result<TokenSequence> {
        let tokens = sent
            .tokens
            .iter()
            .map(|t| {
                Ok(Token {
                    surface: t.surface.clone(),
                    start: t.start,
                    end: t.end,
                    word_id: self.word_id(&t.surface),
                    entity_id: self.entity_id(t.entity_type.as_deref())?,
                    label_id: self.label_id(t.trigger_label.as_deref())?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TokenSequence {
            doc_id: sent.doc_id.clone(),
            sent_index: sent.sent_index,
            tokens,
        })
    }

    /// Canonical line-oriented text form; its bytes define the vocabulary
    /// hash used to pair checkpoints with prepared datasets.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# biotrig vocabulary v1\n");
        out.push_str("[words]\n");
        for w in &self.words {
            out.push_str(w);
            out.push('\n');
        }
        out.push_str("[entities]\n");
        for e in &self.entities {
            out.push_str(e);
            out.push('\n');
        }
        out.push_str("[labels]\n");
        for l in &self.labels {
            out.push_str(l);
            out.push('\n');
        }
        out.push_str("[deferred]\n");
        for id in &self.deferred {
            out.push_str(&self.labels[*id]);
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Vocabularies> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Words,
            Entities,
            Labels,
            Deferred,
        }
        let mut section = Section::None;
        let mut words = Vec::new();
        let mut entities = Vec::new();
        let mut labels = Vec::new();
        let mut deferred_names = Vec::new();
        for line in text.lines() {
            if line.starts_with('#') || line.is_empty() {
                continue;
            }
            match line {
                "[words]" => section = Section::Words,
                "[entities]" => section = Section::Entities,
                "[labels]" => section = Section::Labels,
                "[deferred]" => section = Section::Deferred,
                entry => match section {
                    Section::Words => words.push(entry.to_string()),
                    Section::Entities => entities.push(entry.to_string()),
                    Section::Labels => labels.push(entry.to_string()),
                    Section::Deferred => deferred_names.push(entry.to_string()),
                    Section::None => {
                        return Err(Error::VocabularyMismatch(format!(
                            "unexpected entry {entry:?} before any section header"
                        )))
                    }
                },
            }
        }
        let mut vocab = Vocabularies::from_parts(words, entities, labels, BTreeSet::new());
        let deferred = deferred_names
            .iter()
            .map(|name| {
                vocab
                    .label_index
                    .get(name)
                    .copied()
                    .ok_or_else(|| Error::UnknownLabel(name.clone()))
            })
            .collect::<Result<BTreeSet<usize>>>()?;
        vocab.deferred = deferred;
        Ok(vocab)
    }

    /// Hex SHA-256 of the canonical text form.
    pub fn sha256_hex(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Splits labels by test-set count: `count <= threshold` goes to the
/// deferred set, the rest stay active for training. The map should contain
/// the labels that occur in the test split; `None` is never included.
pub fn filter_rare_labels(
    test_counts: &BTreeMap<String, u64>,
    threshold: u64,
) -> (BTreeSet<String>, BTreeSet<String>) {
    let mut train = BTreeSet::new();
    let mut deferred = BTreeSet::new();
    for (label, &count) in test_counts {
        if count <= threshold {
            deferred.insert(label.clone());
        } else {
            train.insert(label.clone());
        }
    }
    (train, deferred)
}
