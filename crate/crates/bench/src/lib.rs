//! Fixture builders shared by the criterion benches.

use biotrig_core::model::{ModelConfig, TriggerModel};
use biotrig_core::standoff::TokenSequence;
use biotrig_core::synthetic::{synthetic_corpus, SyntheticSpec};

/// A model at the tuned default dimensions over a small synthetic
/// vocabulary, plus one sentence to drive it with.
pub fn default_model_and_sentence() -> (TriggerModel, TokenSequence) {
    let spec = SyntheticSpec {
        sentences: 8,
        vocab_words: 200,
        min_len: 12,
        max_len: 12,
        seed: 7,
        ..SyntheticSpec::default()
    };
    let (sentences, vocabs) = synthetic_corpus(&spec);
    let config = ModelConfig {
        seed: 7,
        ..ModelConfig::default()
    };
    let model = TriggerModel::new(config, vocabs, None).expect("model builds");
    (model, sentences.into_iter().next().expect("nonempty corpus"))
}

/// A paragraph of tokenizer input.
pub fn sample_paragraph() -> String {
    "VEGF-induced angiogenesis requires p53-dependent expression in endothelial cells. \
     Inhibition of tumor growth (e.g. by knockdown) reduces vessel density. "
        .repeat(20)
}
