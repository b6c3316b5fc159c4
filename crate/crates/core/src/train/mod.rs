//! SGD training with per-sentence updates, dev-set model selection, and
//! the best-of-N multi-run protocol.

mod word2vec;

pub use word2vec::{
    load_word2vec, load_word2vec_binary, load_word2vec_text, parse_word2vec_binary,
    parse_word2vec_text, PretrainedVectors,
};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autodiff::{Tape, Tensor};
use crate::error::{Error, Result};
use crate::eval::{micro_prf, EvalReport};
use crate::model::{ModelConfig, TriggerModel};
use crate::standoff::{TokenSequence, Vocabularies};

/// Optimization hyperparameters. The paper-level protocol fixes plain SGD
/// with per-sentence (batch size 1) updates and dev micro-F1 selection;
/// rate, epoch count, and clipping are tuned here and overridable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub grad_clip_norm: f64,
    pub seed: u64,
    pub runs: usize,
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.05,
            epochs: 30,
            grad_clip_norm: 5.0,
            seed: 0,
            runs: 5,
            shuffle: true,
        }
    }
}

/// One row of the per-epoch training log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub mean_train_loss: f64,
    pub dev_precision: f64,
    pub dev_recall: f64,
    pub dev_f1: f64,
}

/// Outcome of one training run: the model holds the best-epoch parameters.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub log: Vec<EpochLog>,
    pub best_epoch: usize,
    pub best_dev_f1: f64,
}

/// Mean over tokens of the softmax cross-entropy between each token's
/// predicted distribution and its gold label. Deferred gold labels must
/// already be mapped to None upstream for training data.
pub fn sentence_loss<R: Rng>(
    model: &TriggerModel,
    tape: &mut Tape,
    sequence: &TokenSequence,
    rng: &mut R,
    train_mode: bool,
) -> Result<Tensor> {
    if sequence.tokens.is_empty() {
        return Err(Error::EmptySequence("sentence_loss"));
    }
    let trace = model.forward_sentence(tape, sequence, rng, train_mode)?;
    let mut acc: Option<Tensor> = None;
    for (logits, tok) in trace.logits.iter().zip(&sequence.tokens) {
        let ce = tape.softmax_cross_entropy(logits, tok.label_id)?;
        acc = Some(match acc {
            None => ce,
            Some(prev) => tape.add(&prev, &ce)?,
        });
    }
    let total = acc.expect("nonempty sequence");
    tape.elementwise_mul(&total, &Tensor::scalar(1.0 / sequence.tokens.len() as f64))
}

/// Global L2 norm of all parameter gradients.
fn global_grad_norm(model: &TriggerModel) -> Result<f64> {
    let mut sq = 0.0;
    for (name, t) in model.params.iter() {
        let s = t.with_grad(|g| g.iter().map(|v| v * v).sum::<f64>());
        if !s.is_finite() {
            return Err(Error::NonFiniteGradient(name.to_string()));
        }
        sq += s;
    }
    Ok(sq.sqrt())
}

/// One SGD update: scales all gradients by `clip/norm` when the global L2
/// norm exceeds `grad_clip_norm` (direction is preserved), applies
/// `p -= learning_rate * grad`, then zeroes all gradients.
pub fn sgd_step(model: &TriggerModel, learning_rate: f64, grad_clip_norm: f64) -> Result<()> {
    let norm = global_grad_norm(model)?;
    let scale = if norm > grad_clip_norm {
        grad_clip_norm / norm
    } else {
        1.0
    };
    for (_, t) in model.params.iter() {
        t.apply_grad_scaled(-learning_rate * scale);
    }
    model.params.zero_grads();
    Ok(())
}

/// One pass over the training sentences in seeded shuffled order; returns
/// the mean sentence loss.
pub fn train_epoch(
    model: &TriggerModel,
    sentences: &[TokenSequence],
    cfg: &TrainConfig,
    order_rng: &mut ChaCha8Rng,
    dropout_rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let mut order: Vec<usize> = (0..sentences.len()).collect();
    if cfg.shuffle {
        order.shuffle(order_rng);
    }
    let mut total = 0.0;
    let mut counted = 0usize;
    for idx in order {
        let sent = &sentences[idx];
        if sent.tokens.is_empty() {
            continue;
        }
        let mut tape = Tape::new();
        let loss = sentence_loss(model, &mut tape, sent, dropout_rng, true)?;
        tape.backward(&loss)?;
        sgd_step(model, cfg.learning_rate, cfg.grad_clip_norm)?;
        total += loss.value();
        counted += 1;
    }
    if counted == 0 {
        return Err(Error::EmptyTrainSet);
    }
    Ok(total / counted as f64)
}

/// Eval-mode predictions for a set of sentences, flattened per token and
/// scored against the flattened gold labels.
pub fn evaluate(model: &TriggerModel, sentences: &[TokenSequence]) -> Result<EvalReport> {
    let mut gold = Vec::new();
    let mut pred = Vec::new();
    for sent in sentences {
        if sent.tokens.is_empty() {
            continue;
        }
        pred.extend(model.predict(sent)?);
        gold.extend(sent.gold_labels());
    }
    micro_prf(&gold, &pred, &model.vocabs)
}

/// Training-data view with deferred gold labels collapsed to None.
pub fn mask_deferred(sentences: &[TokenSequence], vocabs: &Vocabularies) -> Vec<TokenSequence> {
    sentences
        .iter()
        .map(|s| {
            let mut s = s.clone();
            for tok in &mut s.tokens {
                tok.label_id = vocabs.train_label(tok.label_id);
            }
            s
        })
        .collect()
}

/// Trains for `cfg.epochs` epochs, evaluating dev micro-F1 after each one,
/// and leaves the model holding the parameters of the best dev epoch
/// (earliest epoch wins ties). Gold labels in `train_sentences` should
/// already have deferred labels masked; dev sentences keep their original
/// gold so selection uses the same protocol as final scoring.
pub fn train(
    model: &TriggerModel,
    train_sentences: &[TokenSequence],
    dev_sentences: &[TokenSequence],
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    if train_sentences.iter().all(|s| s.tokens.is_empty()) {
        return Err(Error::EmptyTrainSet);
    }
    let mut order_rng = stream_rng(cfg.seed, 1);
    let mut dropout_rng = stream_rng(cfg.seed, 2);
    let mut log = Vec::with_capacity(cfg.epochs);
    let mut best: Option<(usize, f64, Vec<(String, Vec<f64>)>)> = None;
    for epoch in 1..=cfg.epochs {
        let mean_loss = train_epoch(model, train_sentences, cfg, &mut order_rng, &mut dropout_rng)?;
        let report = evaluate(model, dev_sentences)?;
        log.push(EpochLog {
            epoch,
            mean_train_loss: mean_loss,
            dev_precision: report.micro.precision,
            dev_recall: report.micro.recall,
            dev_f1: report.micro.f1,
        });
        let improved = match &best {
            None => true,
            Some((_, best_f1, _)) => report.micro.f1 > *best_f1,
        };
        if improved {
            best = Some((epoch, report.micro.f1, model.params.snapshot()));
        }
    }
    let (best_epoch, best_dev_f1, snapshot) = best.expect("epochs >= 1");
    model.params.restore(&snapshot);
    Ok(TrainOutcome {
        log,
        best_epoch,
        best_dev_f1,
    })
}

/// Derives independent deterministic streams from one seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Summary of one run inside [`multi_run`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub best_epoch: usize,
    pub dev_f1: f64,
    pub test_precision: f64,
    pub test_recall: f64,
    pub test_f1: f64,
}

/// Result of the best-of-N protocol: per-run summaries, the index of the
/// best run by test F1, and mean/std alongside the headline maximum.
pub struct MultiRunOutcome {
    pub runs: Vec<RunSummary>,
    pub models: Vec<TriggerModel>,
    pub logs: Vec<Vec<EpochLog>>,
    pub best_run: usize,
    pub mean_f1: f64,
    pub std_f1: f64,
}

impl MultiRunOutcome {
    pub fn test_f1_scores(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.test_f1).collect()
    }
}

/// Trains `cfg.runs` models with seeds `cfg.seed + 0 .. cfg.seed + runs-1`
/// and scores each on the test set. The headline number is the maximum
/// test F1; mean ± std are reported alongside.
pub fn multi_run(
    model_cfg: &ModelConfig,
    cfg: &TrainConfig,
    vocabs: &Vocabularies,
    pretrained: Option<&PretrainedVectors>,
    train_sentences: &[TokenSequence],
    dev_sentences: &[TokenSequence],
    test_sentences: &[TokenSequence],
) -> Result<MultiRunOutcome> {
    assert!(cfg.runs >= 1, "multi_run requires at least one run");
    let mut runs = Vec::with_capacity(cfg.runs);
    let mut models = Vec::with_capacity(cfg.runs);
    let mut logs = Vec::with_capacity(cfg.runs);
    for r in 0..cfg.runs {
        let seed = cfg.seed + r as u64;
        let run_model_cfg = ModelConfig {
            seed,
            ..model_cfg.clone()
        };
        let run_cfg = TrainConfig {
            seed,
            ..cfg.clone()
        };
        let model = TriggerModel::new(run_model_cfg, vocabs.clone(), pretrained)?;
        let outcome = train(&model, train_sentences, dev_sentences, &run_cfg)?;
        let test_report = evaluate(&model, test_sentences)?;
        runs.push(RunSummary {
            seed,
            best_epoch: outcome.best_epoch,
            dev_f1: outcome.best_dev_f1,
            test_precision: test_report.micro.precision,
            test_recall: test_report.micro.recall,
            test_f1: test_report.micro.f1,
        });
        logs.push(outcome.log);
        models.push(model);
    }
    let best_run = runs
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| {
            a.test_f1
                .partial_cmp(&b.test_f1)
                .expect("finite F1 scores")
        })
        .map(|(i, _)| i)
        .expect("at least one run");
    let n = runs.len() as f64;
    let mean_f1 = runs.iter().map(|r| r.test_f1).sum::<f64>() / n;
    let std_f1 = if runs.len() > 1 {
        (runs
            .iter()
            .map(|r| (r.test_f1 - mean_f1).powi(2))
            .sum::<f64>()
            / (n - 1.0))
            .sqrt()
    } else {
        0.0
    };
    Ok(MultiRunOutcome {
        runs,
        models,
        logs,
        best_run,
        mean_f1,
        std_f1,
    })
}
