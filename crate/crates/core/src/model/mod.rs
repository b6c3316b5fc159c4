//! The trigger tagger network: embedding lookup, bidirectional RNN
//! encoder, and a feed-forward classifier over the concatenated
//! sentence-level (`g`) and word-level (`l`) features.

mod checkpoint;
mod params;
mod rnn;

pub use checkpoint::{load_checkpoint, save_checkpoint};
pub use params::{Initializer, ParameterStore};
pub use rnn::{bi_rnn, gru_step, lstm_step, rnn_step, CellKind, RnnCellParams, RnnState};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::{softmax, Tape, Tensor};
use crate::error::{Error, Result};
use crate::standoff::{TokenSequence, Vocabularies};
use crate::train::PretrainedVectors;

/// Which embedding features feed the network input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureVariant {
    WordOnly,
    WordPlusEntity,
}

impl std::str::FromStr for FeatureVariant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "w" | "word" | "word_only" => Ok(FeatureVariant::WordOnly),
            "we" | "word_entity" | "word_plus_entity" => Ok(FeatureVariant::WordPlusEntity),
            other => Err(format!("unknown feature variant {other:?} (expected w or we)")),
        }
    }
}

/// Which features reach the classifier head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeadVariant {
    /// Sentence-level feature only.
    GlobalOnly,
    /// Word-level concatenated with sentence-level.
    LocalPlusGlobal,
}

impl std::str::FromStr for HeadVariant {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "g" | "global" | "global_only" => Ok(HeadVariant::GlobalOnly),
            "lg" | "l+g" | "local_plus_global" => Ok(HeadVariant::LocalPlusGlobal),
            other => Err(format!("unknown head variant {other:?} (expected g or lg)")),
        }
    }
}

/// Network hyperparameters. Defaults are the tuned configuration: 200-dim
/// word and 50-dim entity embeddings, 250-dim RNN hidden state, hidden
/// layers of 150 and 100 with dropout 0.2, GRU cells, both features, and
/// the local+global head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub word_dim: usize,
    pub entity_dim: usize,
    pub rnn_hidden: usize,
    pub hidden_dims: Vec<usize>,
    pub dropout_rate: f64,
    pub cell: CellKind,
    pub features: FeatureVariant,
    pub head: HeadVariant,
    pub seed: u64,
    pub train_embeddings: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            word_dim: 200,
            entity_dim: 50,
            rnn_hidden: 250,
            hidden_dims: vec![150, 100],
            dropout_rate: 0.2,
            cell: CellKind::Gru,
            features: FeatureVariant::WordPlusEntity,
            head: HeadVariant::LocalPlusGlobal,
            seed: 0,
            train_embeddings: true,
        }
    }
}

impl ModelConfig {
    /// Dimension of the word-level feature `l`.
    pub fn local_dim(&self) -> usize {
        match self.features {
            FeatureVariant::WordOnly => self.word_dim,
            FeatureVariant::WordPlusEntity => self.word_dim + self.entity_dim,
        }
    }

    /// Dimension of the sentence-level feature `g`.
    pub fn global_dim(&self) -> usize {
        2 * self.rnn_hidden
    }

    /// Dimension of the fused feature fed to the classifier head.
    pub fn fused_dim(&self) -> usize {
        match self.head {
            HeadVariant::GlobalOnly => self.global_dim(),
            HeadVariant::LocalPlusGlobal => self.global_dim() + self.local_dim(),
        }
    }
}

/// Feed-forward classifier: tanh hidden layers with dropout, then a
/// softmax output layer as wide as the trigger label set (including None).
#[derive(Debug)]
pub struct ClassifierHead {
    pub hidden: Vec<(Tensor, Tensor)>,
    pub output: (Tensor, Tensor),
    pub dropout_rate: f64,
}

impl ClassifierHead {
    fn build(
        store: &mut ParameterStore,
        fused_dim: usize,
        hidden_dims: &[usize],
        label_count: usize,
        dropout_rate: f64,
        init: &mut Initializer,
    ) -> Self {
        let mut hidden = Vec::new();
        let mut in_dim = fused_dim;
        for (i, &dim) in hidden_dims.iter().enumerate() {
            let w = store.add(format!("head.w{i}"), init.glorot_matrix(dim, in_dim));
            let b = store.add(format!("head.b{i}"), Tensor::zeros(&[dim]));
            hidden.push((w, b));
            in_dim = dim;
        }
        let w_out = store.add("head.w_out", init.glorot_matrix(label_count, in_dim));
        let b_out = store.add("head.b_out", Tensor::zeros(&[label_count]));
        ClassifierHead {
            hidden,
            output: (w_out, b_out),
            dropout_rate,
        }
    }

    fn wire(store: &ParameterStore, hidden_layers: usize, dropout_rate: f64) -> Result<Self> {
        let mut hidden = Vec::new();
        for i in 0..hidden_layers {
            hidden.push((
                store.require(&format!("head.w{i}"))?,
                store.require(&format!("head.b{i}"))?,
            ));
        }
        Ok(ClassifierHead {
            hidden,
            output: (store.require("head.w_out")?, store.require("head.b_out")?),
            dropout_rate,
        })
    }

    /// `h_0 = tanh(W_0 f + b_0)`, dropout, `h_i = tanh(W_i h_{i-1} + b_i)`,
    /// dropout, logits `W_o h + b_o`. Dropout fires in train mode only.
    pub fn logits<R: Rng>(
        &self,
        tape: &mut Tape,
        fused: &Tensor,
        rng: &mut R,
        train_mode: bool,
    ) -> Result<Tensor> {
        let mut h = fused.clone();
        for (w, b) in &self.hidden {
            let wh = tape.matmul(w, &h)?;
            let pre = tape.add(&wh, b)?;
            let act = tape.tanh(&pre)?;
            h = tape.dropout(&act, self.dropout_rate, rng, train_mode)?;
        }
        let (w_out, b_out) = &self.output;
        let wh = tape.matmul(w_out, &h)?;
        tape.add(&wh, b_out)
    }
}

/// Per-token record of a sentence forward pass: the word-level feature
/// `l^k`, sentence-level feature `g^k`, fused feature `f^k`, the logits
/// tensors (for attaching a loss), and the probability rows `p(y|x)`.
pub struct ForwardTrace {
    pub local: Vec<Vec<f64>>,
    pub global: Vec<Vec<f64>>,
    pub fused: Vec<Vec<f64>>,
    pub logits: Vec<Tensor>,
    pub probs: Vec<Vec<f64>>,
}

impl ForwardTrace {
    /// Predicted label id per token (argmax, lowest index on ties).
    pub fn predictions(&self) -> Vec<usize> {
        self.probs.iter().map(|p| argmax(p)).collect()
    }
}

/// Index of the maximum value; ties resolve to the lowest index.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in xs.iter().enumerate() {
        if v > xs[best] {
            best = i;
        }
    }
    best
}

/// The assembled network: embedding tables, both directional cells, and
/// the classifier head, with every tensor registered in a
/// [`ParameterStore`] whose order defines the checkpoint layout.
pub struct TriggerModel {
    pub config: ModelConfig,
    pub vocabs: Vocabularies,
    pub params: ParameterStore,
    word_table: Tensor,
    entity_table: Tensor,
    fwd: RnnCellParams,
    bwd: RnnCellParams,
    head: ClassifierHead,
}

impl std::fmt::Debug for TriggerModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TriggerModel")
            .field("config", &self.config)
            .field("parameters", &self.params.scalar_count())
            .finish()
    }
}

impl TriggerModel {
    /// Builds a freshly initialized model. The word table rows of words
    /// covered by `pretrained` are copied from the vectors; uncovered rows
    /// and the entity table are uniform in ±0.05; weight matrices use
    /// Glorot-uniform init and biases start at zero.
    pub fn new(
        config: ModelConfig,
        vocabs: Vocabularies,
        pretrained: Option<&PretrainedVectors>,
    ) -> Result<TriggerModel> {
        if let Some(vecs) = pretrained {
            if vecs.dimension() != config.word_dim {
                return Err(Error::DimensionMismatch {
                    context: "pretrained vectors vs word_dim".to_string(),
                    expected: config.word_dim,
                    actual: vecs.dimension(),
                });
            }
        }
        let mut init = Initializer::new(ChaCha8Rng::seed_from_u64(config.seed));
        let mut store = ParameterStore::new();

        let mut word_values = Vec::with_capacity(vocabs.word_count() * config.word_dim);
        for word in vocabs.words() {
            match pretrained.and_then(|v| v.lookup(word)) {
                Some(vec) => word_values.extend_from_slice(vec),
                None => word_values.extend(init.uniform_row(config.word_dim, 0.05)),
            }
        }
        let word_table = store.add(
            "embed.word",
            Tensor::from_vec(&[vocabs.word_count(), config.word_dim], word_values),
        );
        let entity_table = store.add(
            "embed.entity",
            init.uniform_tensor(&[vocabs.entity_count(), config.entity_dim], 0.05),
        );
        if !config.train_embeddings {
            word_table.set_requires_grad(false);
            entity_table.set_requires_grad(false);
        }

        let input_dim = config.local_dim();
        let fwd = RnnCellParams::build(
            &mut store,
            "rnn.fwd",
            config.cell,
            input_dim,
            config.rnn_hidden,
            &mut init,
        );
        let bwd = RnnCellParams::build(
            &mut store,
            "rnn.bwd",
            config.cell,
            input_dim,
            config.rnn_hidden,
            &mut init,
        );
        let head = ClassifierHead::build(
            &mut store,
            config.fused_dim(),
            &config.hidden_dims,
            vocabs.label_count(),
            config.dropout_rate,
            &mut init,
        );
        Ok(TriggerModel {
            config,
            vocabs,
            params: store,
            word_table,
            entity_table,
            fwd,
            bwd,
            head,
        })
    }

    /// Rewires a model around an existing parameter store (checkpoint
    /// load); shapes are validated against the config and vocabularies.
    pub fn from_store(
        config: ModelConfig,
        vocabs: Vocabularies,
        store: ParameterStore,
    ) -> Result<TriggerModel> {
        let word_table = store.require("embed.word")?;
        let entity_table = store.require("embed.entity")?;
        let expect = |name: &str, tensor: &Tensor, shape: &[usize]| -> Result<()> {
            if tensor.shape() != shape {
                return Err(Error::BadCheckpoint(format!(
                    "parameter {name} has shape {:?}, expected {shape:?}",
                    tensor.shape()
                )));
            }
            Ok(())
        };
        expect(
            "embed.word",
            &word_table,
            &[vocabs.word_count(), config.word_dim],
        )?;
        expect(
            "embed.entity",
            &entity_table,
            &[vocabs.entity_count(), config.entity_dim],
        )?;
        let fwd = RnnCellParams::wire(&store, "rnn.fwd", config.cell, config.rnn_hidden)?;
        let bwd = RnnCellParams::wire(&store, "rnn.bwd", config.cell, config.rnn_hidden)?;
        expect(
            "rnn.fwd input weight",
            &fwd.input_weights[0],
            &[config.rnn_hidden, config.local_dim()],
        )?;
        let head = ClassifierHead::wire(&store, config.hidden_dims.len(), config.dropout_rate)?;
        let last_hidden = config
            .hidden_dims
            .last()
            .copied()
            .unwrap_or_else(|| config.fused_dim());
        expect(
            "head.w_out",
            &head.output.0,
            &[vocabs.label_count(), last_hidden],
        )?;
        if !config.train_embeddings {
            word_table.set_requires_grad(false);
            entity_table.set_requires_grad(false);
        }
        Ok(TriggerModel {
            config,
            vocabs,
            params: store,
            word_table,
            entity_table,
            fwd,
            bwd,
            head,
        })
    }

    /// Word-level features `l^k`: the word embedding row, concatenated
    /// with the entity-type row under the word+entity variant.
    pub fn embed(&self, tape: &mut Tape, sequence: &TokenSequence) -> Result<Vec<Tensor>> {
        sequence
            .tokens
            .iter()
            .map(|tok| {
                let w = tape.row(&self.word_table, tok.word_id)?;
                match self.config.features {
                    FeatureVariant::WordOnly => Ok(w),
                    FeatureVariant::WordPlusEntity => {
                        let e = tape.row(&self.entity_table, tok.entity_id)?;
                        tape.concat(&w, &e)
                    }
                }
            })
            .collect()
    }

    /// Full per-sentence pass: embed, encode bidirectionally, fuse per the
    /// head variant, and classify each token.
    pub fn forward_sentence<R: Rng>(
        &self,
        tape: &mut Tape,
        sequence: &TokenSequence,
        rng: &mut R,
        train_mode: bool,
    ) -> Result<ForwardTrace> {
        if sequence.tokens.is_empty() {
            return Err(Error::EmptySequence("forward_sentence"));
        }
        let local = self.embed(tape, sequence)?;
        let global = bi_rnn(tape, &self.fwd, &self.bwd, &local)?;
        let mut trace = ForwardTrace {
            local: local.iter().map(Tensor::values).collect(),
            global: global.iter().map(Tensor::values).collect(),
            fused: Vec::with_capacity(local.len()),
            logits: Vec::with_capacity(local.len()),
            probs: Vec::with_capacity(local.len()),
        };
        for (l, g) in local.iter().zip(&global) {
            let fused = match self.config.head {
                HeadVariant::GlobalOnly => g.clone(),
                HeadVariant::LocalPlusGlobal => tape.concat(g, l)?,
            };
            trace.fused.push(fused.values());
            let logits = self.head.logits(tape, &fused, rng, train_mode)?;
            trace.probs.push(logits.with_values(softmax));
            trace.logits.push(logits);
        }
        Ok(trace)
    }

    /// Eval-mode predictions for one sentence (no dropout, no gradient
    /// bookkeeping kept by the caller).
    pub fn predict(&self, sequence: &TokenSequence) -> Result<Vec<usize>> {
        let mut tape = Tape::new();
        // rng is never consumed in eval mode
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let trace = self.forward_sentence(&mut tape, sequence, &mut rng, false)?;
        Ok(trace.predictions())
    }
}
