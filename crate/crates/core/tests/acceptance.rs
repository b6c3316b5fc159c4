//! Acceptance suite: one test per release criterion, each printing a
//! PASS/SKIP line (run with `--nocapture` to see them). Corpus-dependent
//! criteria are gated on `BIOTRIG_MLEE_DIR` and skip cleanly when the
//! corpus is not mounted.

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use biotrig_core::autodiff::{grad_check, Tape, Tensor};
use biotrig_core::eval::{micro_prf, t_test_one_sided, welch_statistic};
use biotrig_core::model::{
    load_checkpoint, save_checkpoint, CellKind, FeatureVariant, HeadVariant, ModelConfig,
    TriggerModel,
};
use biotrig_core::standoff::{
    annotation_stats, parse_standoff, read_dataset, split_sentences, Vocabularies,
};
use biotrig_core::synthetic::{synthetic_corpus, token_accuracy, SyntheticSpec};
use biotrig_core::train::{
    evaluate, sentence_loss, sgd_step, stream_rng, train, train_epoch, EpochLog, TrainConfig,
};
use biotrig_core::standoff::TokenSequence;

const GRAD_TOL: f64 = 1e-4;
const GRAD_EPS: f64 = 1e-5;

fn pass(criterion: &str) {
    println!("[acceptance] {criterion}: PASS");
}

fn skip(criterion: &str, why: &str) {
    println!("[acceptance] {criterion}: SKIP ({why})");
}

fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
}

/// Exact power-of-two probe scale: shifts the loss exponent without any
/// extra rounding, keeping the central difference above f64 noise even on
/// zero-gradient coordinates.
const PROBE_SCALE: f64 = 1.0 / 64.0;

// ---------------------------------------------------------------------
// Criterion 1: gradient correctness

#[test]
fn c1_gradient_correctness() {
    let points = 100;

    // Elementwise and structural ops. Each closure recreates identical
    // parameter tensors from the seed, so held tensors alias the first
    // build only if the build returns stable storage; instead we build
    // params outside and close over them per op.
    let seeds: Vec<u64> = (0..points as u64).collect();

    for &seed in &seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Tensor::parameter(&[5], rand_vec(&mut rng, 5));
        let b = Tensor::parameter(&[5], rand_vec(&mut rng, 5));
        let w = Tensor::parameter(&[3, 5], rand_vec(&mut rng, 15));
        let m2 = Tensor::parameter(&[5, 2], rand_vec(&mut rng, 10));
        let table = Tensor::parameter(&[4, 3], rand_vec(&mut rng, 12));
        let scale = Tensor::scalar(PROBE_SCALE);

        let cases: Vec<(&str, Box<dyn Fn(&mut Tape) -> biotrig_core::Result<Tensor>>)> = vec![
            (
                "matmul_mv",
                Box::new({
                    let (w, a, scale) = (w.clone(), a.clone(), scale.clone());
                    move |t: &mut Tape| {
                        let y = t.matmul(&w, &a)?;
                        let s = t.tanh(&y)?;
                        let total = t.sum(&s)?;
                        t.elementwise_mul(&total, &scale)
                    }
                }),
            ),
            (
                "matmul_mm",
                Box::new({
                    let (w, m2, scale) = (w.clone(), m2.clone(), scale.clone());
                    move |t: &mut Tape| {
                        let y = t.matmul(&w, &m2)?;
                        let s = t.tanh(&y)?;
                        let total = t.sum(&s)?;
                        t.elementwise_mul(&total, &scale)
                    }
                }),
            ),
            (
                "add",
                Box::new({
                    let (a, b, scale) = (a.clone(), b.clone(), scale.clone());
                    move |t: &mut Tape| {
                        let y = t.add(&a, &b)?;
                        let s = t.sigmoid(&y)?;
                        let total = t.sum(&s)?;
                        t.elementwise_mul(&total, &scale)
                    }
                }),
            ),
            (
                "concat",
                Box::new({
                    let (a, b, scale) = (a.clone(), b.clone(), scale.clone());
                    move |t: &mut Tape| {
                        let y = t.concat(&a, &b)?;
                        let s = t.tanh(&y)?;
                        let total = t.sum(&s)?;
                        t.elementwise_mul(&total, &scale)
                    }
                }),
            ),
            (
                "tanh",
                Box::new({
                    let (a, scale) = (a.clone(), scale.clone());
                    move |t: &mut Tape| {
                        let y = t.tanh(&a)?;
                        let total = t.sum(&y)?;
                        t.elementwise_mul(&total, &scale)
                    }
                }),
            ),
            (
                "sigmoid",
                Box::new({
                    let (a, scale) = (a.clone(), scale.clone());
                    move |t: &mut Tape| {
                        let y = t.sigmoid(&a)?;
                        let total = t.sum(&y)?;
                        t.elementwise_mul(&total, &scale)
                    }
                }),
            ),
            (
                "elementwise_mul",
                Box::new({
                    let (a, b, scale) = (a.clone(), b.clone(), scale.clone());
                    move |t: &mut Tape| {
                        let y = t.elementwise_mul(&a, &b)?;
                        let total = t.sum(&y)?;
                        t.elementwise_mul(&total, &scale)
                    }
                }),
            ),
            (
                "dropout_frozen_mask",
                Box::new({
                    let (a, scale) = (a.clone(), scale.clone());
                    move |t: &mut Tape| {
                        let mut mask_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
                        let y = t.dropout(&a, 0.2, &mut mask_rng, true)?;
                        let s = t.tanh(&y)?;
                        let total = t.sum(&s)?;
                        t.elementwise_mul(&total, &scale)
                    }
                }),
            ),
            (
                "softmax_cross_entropy",
                Box::new({
                    let (a, scale) = (a.clone(), scale.clone());
                    move |t: &mut Tape| {
                        let loss = t.softmax_cross_entropy(&a, 2)?;
                        t.elementwise_mul(&loss, &scale)
                    }
                }),
            ),
            (
                "row",
                Box::new({
                    let (table, scale) = (table.clone(), scale.clone());
                    move |t: &mut Tape| {
                        let r0 = t.row(&table, 1)?;
                        let r1 = t.row(&table, 3)?;
                        let y = t.concat(&r0, &r1)?;
                        let s = t.tanh(&y)?;
                        let total = t.sum(&s)?;
                        t.elementwise_mul(&total, &scale)
                    }
                }),
            ),
        ];
        let all_params = [
            a.clone(),
            b.clone(),
            w.clone(),
            m2.clone(),
            table.clone(),
        ];
        for (name, f) in cases {
            let refs: Vec<&Tensor> = all_params.iter().collect();
            let err = grad_check(|t| f(t), &refs, GRAD_EPS).unwrap();
            assert!(err <= GRAD_TOL, "{name}: error {err} at seed {seed}");
        }
    }

    // Both RNN cells at 100 random parameter points.
    for kind in [CellKind::Lstm, CellKind::Gru] {
        for seed in 0..points as u64 {
            let mut store = biotrig_core::model::ParameterStore::new();
            let mut init = biotrig_core::model::Initializer::new(ChaCha8Rng::seed_from_u64(
                7000 + seed,
            ));
            let cell = biotrig_core::model::RnnCellParams::build(
                &mut store,
                "cell",
                kind,
                3,
                4,
                &mut init,
            );
            let mut rng = ChaCha8Rng::seed_from_u64(8000 + seed);
            let x = Tensor::from_vec(&[3], rand_vec(&mut rng, 3));
            let h0 = Tensor::from_vec(&[4], rand_vec(&mut rng, 4));
            let c0 = Tensor::from_vec(&[4], rand_vec(&mut rng, 4));
            let scale = Tensor::scalar(PROBE_SCALE);
            let tensors: Vec<Tensor> = store.iter().map(|(_, t)| t.clone()).collect();
            let refs: Vec<&Tensor> = tensors.iter().collect();
            let err = grad_check(
                |tape| {
                    let out = match kind {
                        CellKind::Lstm => {
                            let (h, c) =
                                biotrig_core::model::lstm_step(tape, &cell, &x, &h0, &c0)?;
                            tape.concat(&h, &c)?
                        }
                        CellKind::Gru => biotrig_core::model::gru_step(tape, &cell, &x, &h0)?,
                    };
                    let s = tape.tanh(&out)?;
                    let total = tape.sum(&s)?;
                    tape.elementwise_mul(&total, &scale)
                },
                &refs,
                GRAD_EPS,
            )
            .unwrap();
            assert!(err <= GRAD_TOL, "{kind:?} cell: error {err} at seed {seed}");
        }
    }

    // End-to-end sentence loss for all four feature/head variants, both
    // cell kinds. The probe parameter point is conditioned (positive RNN
    // biases so cell states accumulate, embeddings at ±0.4) so every
    // gradient path has a magnitude above the f64 noise floor of the
    // central difference; at default random init some LSTM gate
    // coordinates sit near 1e-8 where the difference is pure rounding
    // noise.
    let variants = [
        (FeatureVariant::WordOnly, HeadVariant::GlobalOnly),
        (FeatureVariant::WordOnly, HeadVariant::LocalPlusGlobal),
        (FeatureVariant::WordPlusEntity, HeadVariant::GlobalOnly),
        (FeatureVariant::WordPlusEntity, HeadVariant::LocalPlusGlobal),
    ];
    let vocabs = Vocabularies::from_inventories(
        &["aa", "bb", "cc", "dd", "ee", "ff"],
        &["Cell"],
        &["Growth", "Death"],
    );
    let probe = TokenSequence {
        doc_id: "probe".into(),
        sent_index: 0,
        tokens: [(2usize, 0usize, 1usize), (3, 1, 0), (5, 0, 2), (6, 1, 0), (4, 0, 1)]
            .iter()
            .enumerate()
            .map(|(i, &(w, e, l))| biotrig_core::standoff::Token {
                surface: format!("t{i}"),
                start: i,
                end: i + 1,
                word_id: w,
                entity_id: e,
                label_id: l,
            })
            .collect(),
    };
    for kind in [CellKind::Lstm, CellKind::Gru] {
        for (features, head) in variants {
            let cfg = ModelConfig {
                word_dim: 5,
                entity_dim: 2,
                rnn_hidden: 4,
                hidden_dims: vec![6, 3],
                dropout_rate: 0.2,
                cell: kind,
                features,
                head,
                seed: 11,
                train_embeddings: true,
            };
            let probe_seed = cfg.seed ^ 0xabc;
            let model = TriggerModel::new(cfg, vocabs.clone(), None).unwrap();
            let mut probe_rng = ChaCha8Rng::seed_from_u64(probe_seed);
            for (name, t) in model.params.iter() {
                if name.starts_with("rnn.") && name.contains(".b_") {
                    t.set_values(&vec![0.35; t.len()]);
                } else if name.starts_with("embed.") {
                    let v: Vec<f64> = (0..t.len())
                        .map(|_| probe_rng.random::<f64>() * 0.8 - 0.4)
                        .collect();
                    t.set_values(&v);
                }
            }
            let tensors: Vec<Tensor> = model.params.iter().map(|(_, t)| t.clone()).collect();
            let refs: Vec<&Tensor> = tensors.iter().collect();
            let err = grad_check(
                |tape| {
                    let mut rng = stream_rng(5, 2);
                    sentence_loss(&model, tape, &probe, &mut rng, true)
                },
                &refs,
                GRAD_EPS,
            )
            .unwrap();
            assert!(
                err <= GRAD_TOL,
                "end-to-end {kind:?}/{features:?}/{head:?}: error {err}"
            );
        }
    }

    pass("C1 gradient-correctness");
}

// ---------------------------------------------------------------------
// Criterion 2: overfit oracle

#[test]
fn c2_overfit_separable_corpus() {
    let spec = SyntheticSpec {
        sentences: 50,
        ..SyntheticSpec::default()
    };
    let (sentences, vocabs) = synthetic_corpus(&spec);
    assert_eq!(vocabs.label_count(), 4, "3 labels + None");

    let model_cfg = ModelConfig {
        seed: 1,
        ..ModelConfig::default()
    };
    let train_cfg = TrainConfig::default();
    let model = TriggerModel::new(model_cfg, vocabs, None).unwrap();
    let mut order_rng = stream_rng(train_cfg.seed, 1);
    let mut dropout_rng = stream_rng(train_cfg.seed, 2);

    let accuracy = |model: &TriggerModel| {
        let mut gold = Vec::new();
        let mut pred = Vec::new();
        for s in &sentences {
            gold.extend(s.gold_labels());
            pred.extend(model.predict(s).unwrap());
        }
        token_accuracy(&gold, &pred)
    };

    let mut reached = None;
    for epoch in 1..=200 {
        train_epoch(&model, &sentences, &train_cfg, &mut order_rng, &mut dropout_rng).unwrap();
        if accuracy(&model) >= 0.99 {
            reached = Some(epoch);
            break;
        }
    }
    let epoch = reached.expect("never reached 99% token accuracy within 200 epochs");
    println!("[acceptance] C2 detail: reached 99% accuracy at epoch {epoch}");
    pass("C2 overfit-oracle");
}

// ---------------------------------------------------------------------
// Criterion 3: scorer oracle equivalence

/// Independent brute-force counter, written per-label with explicit
/// filters rather than a single counting pass.
fn brute_force_counts(
    gold: &[usize],
    pred: &[usize],
    label_count: usize,
    none: usize,
    deferred: &BTreeSet<usize>,
) -> (u64, u64, u64) {
    let effective: Vec<usize> = pred
        .iter()
        .map(|&p| if deferred.contains(&p) { none } else { p })
        .collect();
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut fn_ = 0u64;
    for label in 0..label_count {
        if label == none {
            continue;
        }
        tp += gold
            .iter()
            .zip(&effective)
            .filter(|&(&g, &p)| g == label && p == label)
            .count() as u64;
        fp += gold
            .iter()
            .zip(&effective)
            .filter(|&(&g, &p)| p == label && g != label)
            .count() as u64;
        fn_ += gold
            .iter()
            .zip(&effective)
            .filter(|&(&g, &p)| g == label && p != label)
            .count() as u64;
    }
    (tp, fp, fn_)
}

#[test]
fn c3_scorer_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..1000 {
        let n_labels = rng.random_range(2..=6);
        let names: Vec<String> = (0..n_labels - 1).map(|i| format!("L{i}")).collect();
        let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut vocabs = Vocabularies::from_inventories(&["w"], &[], &name_refs);
        let deferred: BTreeSet<usize> = (1..n_labels)
            .filter(|_| rng.random::<f64>() < 0.25)
            .collect();
        vocabs.set_deferred_labels(deferred.clone());

        let len = rng.random_range(1..=30);
        let gold: Vec<usize> = (0..len).map(|_| rng.random_range(0..n_labels)).collect();
        let pred: Vec<usize> = (0..len).map(|_| rng.random_range(0..n_labels)).collect();

        let report = micro_prf(&gold, &pred, &vocabs).unwrap();
        let (tp, fp, fn_) = brute_force_counts(&gold, &pred, n_labels, 0, &deferred);
        assert_eq!(
            (report.micro.tp, report.micro.fp, report.micro.fn_),
            (tp, fp, fn_),
            "case {case}: gold {gold:?} pred {pred:?} deferred {deferred:?}"
        );
    }
    pass("C3 scorer-oracle-equivalence");
}

// ---------------------------------------------------------------------
// Criterion 4: deferred-label rule

#[test]
fn c4_deferred_label_forced_false_negatives() {
    let mut vocabs = Vocabularies::from_inventories(&["w"], &[], &["A", "SYN"]);
    let syn = vocabs.label_id(Some("SYN")).unwrap();
    vocabs.set_deferred_labels([syn].into());
    let a = vocabs.label_id(Some("A")).unwrap();
    let none = vocabs.none_label_id();

    // base: mixed outcomes without any deferred gold
    let base_gold = vec![a, none, a, none];
    let base_pred = vec![a, a, none, none];
    let base = micro_prf(&base_gold, &base_pred, &vocabs).unwrap();

    // add 4 gold tokens of the deferred label with assorted predictions
    let mut gold = base_gold.clone();
    let mut pred = base_pred.clone();
    gold.extend([syn, syn, syn, syn]);
    pred.extend([syn, a, none, syn]);
    // note: predicting the deferred label itself cannot create an FP, and
    // a deferred prediction on top of deferred gold is still an FN; the
    // stray "A" prediction belongs to the FP delta, checked separately
    let with_deferred = micro_prf(&gold, &pred, &vocabs).unwrap();

    assert_eq!(with_deferred.micro.fn_, base.micro.fn_ + 4);
    assert_eq!(with_deferred.micro.fp, base.micro.fp + 1); // only the "A"

    // the pure form: deferred gold with non-FP predictions only
    let mut gold2 = base_gold.clone();
    let mut pred2 = base_pred.clone();
    gold2.extend([syn, syn, syn, syn]);
    pred2.extend([syn, syn, none, none]);
    let pure = micro_prf(&gold2, &pred2, &vocabs).unwrap();
    assert_eq!(pure.micro.fn_, base.micro.fn_ + 4);
    assert_eq!(pure.micro.fp, base.micro.fp);
    pass("C4 deferred-label-rule");
}

// ---------------------------------------------------------------------
// Criterion 5: corpus fidelity (conditional on MLEE availability)

fn mlee_dir() -> Option<PathBuf> {
    std::env::var_os("BIOTRIG_MLEE_DIR").map(PathBuf::from)
}

fn load_split(dir: &std::path::Path) -> Vec<biotrig_core::standoff::AnnotatedDocument> {
    let mut docs = Vec::new();
    let mut stems: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", dir.display()))
        .filter_map(|e| {
            let p = e.unwrap().path();
            (p.extension().and_then(|x| x.to_str()) == Some("txt")).then(|| p.with_extension(""))
        })
        .collect();
    stems.sort();
    for stem in stems {
        let doc_id = stem.file_name().unwrap().to_string_lossy().to_string();
        let text = std::fs::read_to_string(stem.with_extension("txt")).unwrap();
        let a1 = std::fs::read_to_string(stem.with_extension("a1")).unwrap_or_default();
        let a2 = std::fs::read_to_string(stem.with_extension("a2")).unwrap_or_default();
        docs.push(parse_standoff(&doc_id, &text, &a1, &a2).unwrap());
    }
    docs
}

fn normalized(label: &str) -> String {
    label.to_lowercase().replace(' ', "_")
}

#[test]
fn c5_corpus_fidelity_mlee() {
    let Some(root) = mlee_dir() else {
        skip("C5 corpus-fidelity", "BIOTRIG_MLEE_DIR not set");
        return;
    };
    // (label, train count, test count) per the corpus reference tables;
    // the train column may cover train or train+dev depending on how the
    // split is distributed, so both readings are accepted.
    let trigger_expect: &[(&str, u64, u64)] = &[
        ("Cell_proliferation", 82, 43),
        ("Development", 202, 98),
        ("Blood_vessel_development", 540, 305),
        ("Death", 57, 36),
        ("Breakdown", 44, 23),
        ("Remodeling", 22, 10),
        ("Growth", 107, 56),
        ("Synthesis", 13, 4),
        ("Gene_expression", 210, 132),
        ("Transcription", 16, 7),
        ("Catabolism", 20, 4),
        ("Phosphorylation", 26, 3),
        ("Dephosphorylation", 2, 1),
        ("Localization", 282, 133),
        ("Binding", 102, 56),
        ("Regulation", 362, 178),
        ("Positive_regulation", 654, 312),
        ("Negative_regulation", 450, 233),
        ("Planned_process", 407, 175),
    ];
    let entity_expect: &[(&str, u64, u64)] = &[
        ("Drug_or_compound", 637, 307),
        ("Gene_or_gene_product", 1961, 1001),
        ("Organism_subdivision", 27, 22),
        ("Anatomical_system", 10, 8),
        ("Organ", 123, 53),
        ("Multi-tissue_structure", 348, 166),
        ("Tissue", 304, 122),
        ("Cell", 866, 332),
        ("Cellular_component", 105, 40),
        ("Developing_anatomical_structure", 4, 2),
        ("Organism_substance", 82, 60),
        ("Immaterial_anatomical_entity", 11, 4),
        ("Pathological_formation", 553, 357),
        ("Organism", 485, 237),
    ];

    let train = load_split(&root.join("train"));
    let dev = load_split(&root.join("dev"));
    let test = load_split(&root.join("test"));
    let (trig_train, ent_train) = annotation_stats(&train);
    let (trig_dev, ent_dev) = annotation_stats(&dev);
    let (trig_test, ent_test) = annotation_stats(&test);

    let lookup = |m: &std::collections::BTreeMap<String, u64>, label: &str| -> u64 {
        m.iter()
            .find(|(k, _)| normalized(k) == normalized(label))
            .map(|(_, &v)| v)
            .unwrap_or(0)
    };
    for &(label, want_train, want_test) in trigger_expect {
        let tr = lookup(&trig_train, label);
        let dv = lookup(&trig_dev, label);
        let te = lookup(&trig_test, label);
        assert!(
            tr == want_train || tr + dv == want_train,
            "trigger {label}: train {tr} (+dev {dv}) vs expected {want_train}"
        );
        assert_eq!(te, want_test, "trigger {label} test count");
    }
    for &(label, want_train, want_test) in entity_expect {
        let tr = lookup(&ent_train, label);
        let dv = lookup(&ent_dev, label);
        let te = lookup(&ent_test, label);
        assert!(
            tr == want_train || tr + dv == want_train,
            "entity {label}: train {tr} (+dev {dv}) vs expected {want_train}"
        );
        assert_eq!(te, want_test, "entity {label} test count");
    }
    pass("C5 corpus-fidelity");
}

// ---------------------------------------------------------------------
// Criterion 6: headline reproduction (conditional; hours at desk scale)

#[test]
fn c6_headline_reproduction_mlee() {
    let Some(root) = mlee_dir() else {
        skip(
            "C6 headline-reproduction",
            "BIOTRIG_MLEE_DIR not set; desk-scale run, see README",
        );
        return;
    };
    let vectors_path = std::env::var_os("BIOTRIG_VECTORS").map(PathBuf::from);

    use biotrig_core::standoff::{align_sentences, corpus_stats, filter_rare_labels};
    let prepare = |docs: &[biotrig_core::standoff::AnnotatedDocument]| {
        docs.iter()
            .flat_map(|d| align_sentences(d, &split_sentences(&d.text, &d.annotation_spans())))
            .filter(|s| !s.tokens.is_empty())
            .collect::<Vec<_>>()
    };
    let train_docs = load_split(&root.join("train"));
    let dev_docs = load_split(&root.join("dev"));
    let test_docs = load_split(&root.join("test"));
    let train_raw = prepare(&train_docs);
    let dev_raw = prepare(&dev_docs);
    let test_raw = prepare(&test_docs);

    let mut vocab_source = train_raw.clone();
    vocab_source.extend(dev_raw.clone());
    let mut vocabs = Vocabularies::build(&vocab_source).unwrap();
    let (test_trigger_counts, _) = corpus_stats(&test_raw);
    let (_, deferred_names) = filter_rare_labels(&test_trigger_counts, 10);
    let deferred: BTreeSet<usize> = deferred_names
        .iter()
        .filter_map(|n| vocabs.label_id(Some(n)).ok())
        .collect();
    vocabs.set_deferred_labels(deferred);

    let index =
        |raw: &[biotrig_core::standoff::AlignedSentence]| -> Vec<TokenSequence> {
            raw.iter()
                .map(|s| vocabs.index_sentence(s).unwrap())
                .filter(|s| !s.tokens.is_empty())
                .collect()
        };
    let train_seqs = biotrig_core::train::mask_deferred(&index(&train_raw), &vocabs);
    let dev_seqs = index(&dev_raw);
    let test_seqs = index(&test_raw);

    let pretrained = vectors_path
        .as_deref()
        .map(|p| biotrig_core::train::load_word2vec(p).unwrap());
    let model_cfg = ModelConfig::default();
    let train_cfg = TrainConfig::default();
    let outcome = biotrig_core::train::multi_run(
        &model_cfg,
        &train_cfg,
        &vocabs,
        pretrained.as_ref(),
        &train_seqs,
        &dev_seqs,
        &test_seqs,
    )
    .unwrap();
    let best = outcome.runs[outcome.best_run].test_f1 * 100.0;
    println!(
        "[acceptance] C6 detail: best-of-{} test F1 {best:.2} (mean {:.2} ± {:.2})",
        outcome.runs.len(),
        outcome.mean_f1 * 100.0,
        outcome.std_f1 * 100.0
    );
    assert!(
        (76.0..=82.0).contains(&best),
        "best-of-5 GRU micro-F1 {best:.2} outside [76, 82]"
    );
    pass("C6 headline-reproduction");
}

// ---------------------------------------------------------------------
// Criterion 7: determinism

#[test]
fn c7_bit_identical_reruns() {
    let run = |dir: &std::path::Path| -> (Vec<u8>, String, String) {
        let spec = SyntheticSpec {
            sentences: 12,
            vocab_words: 20,
            ..SyntheticSpec::default()
        };
        let (sentences, vocabs) = synthetic_corpus(&spec);
        let (train_set, dev_set) = sentences.split_at(8);
        let cfg = ModelConfig {
            word_dim: 12,
            entity_dim: 4,
            rnn_hidden: 8,
            hidden_dims: vec![10, 6],
            seed: 5,
            ..ModelConfig::default()
        };
        let tcfg = TrainConfig {
            epochs: 4,
            seed: 5,
            ..TrainConfig::default()
        };
        let model = TriggerModel::new(cfg, vocabs, None).unwrap();
        let outcome = train(&model, train_set, dev_set, &tcfg).unwrap();
        let ckpt = dir.join("model.ckpt");
        save_checkpoint(&model, &ckpt).unwrap();
        let log_text: String = outcome
            .log
            .iter()
            .map(|EpochLog { epoch, mean_train_loss, dev_precision, dev_recall, dev_f1 }| {
                format!("{epoch}\t{mean_train_loss}\t{dev_precision}\t{dev_recall}\t{dev_f1}\n")
            })
            .collect();
        let report = evaluate(&model, dev_set).unwrap();
        let report_text = biotrig_core::eval::machine_record(&report, None);
        (std::fs::read(&ckpt).unwrap(), log_text, report_text)
    };
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let (c1, l1, r1) = run(d1.path());
    let (c2, l2, r2) = run(d2.path());
    assert_eq!(c1, c2, "checkpoints differ between identical runs");
    assert_eq!(l1, l2, "logs differ between identical runs");
    assert_eq!(r1, r2, "reports differ between identical runs");
    pass("C7 determinism");
}

// ---------------------------------------------------------------------
// Criterion 8: checkpoint round trip

#[test]
fn c8_checkpoint_roundtrip_predictions() {
    let spec = SyntheticSpec {
        sentences: 10,
        vocab_words: 15,
        ..SyntheticSpec::default()
    };
    let (sentences, vocabs) = synthetic_corpus(&spec);
    let (train_set, dev_set) = sentences.split_at(7);
    let cfg = ModelConfig {
        word_dim: 10,
        entity_dim: 3,
        rnn_hidden: 6,
        hidden_dims: vec![8, 5],
        seed: 9,
        ..ModelConfig::default()
    };
    let tcfg = TrainConfig {
        epochs: 2,
        seed: 9,
        ..TrainConfig::default()
    };
    let model = TriggerModel::new(cfg, vocabs, None).unwrap();
    train(&model, train_set, dev_set, &tcfg).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.ckpt");
    save_checkpoint(&model, &path).unwrap();
    let loaded = load_checkpoint(&path).unwrap();

    for s in dev_set {
        let p1 = model.predict(s).unwrap();
        let p2 = loaded.predict(s).unwrap();
        assert_eq!(p1, p2, "predictions differ after reload");
        // bit-level check on the probability vectors
        let mut rng1 = stream_rng(0, 0);
        let mut rng2 = stream_rng(0, 0);
        let t1 = model
            .forward_sentence(&mut Tape::new(), s, &mut rng1, false)
            .unwrap();
        let t2 = loaded
            .forward_sentence(&mut Tape::new(), s, &mut rng2, false)
            .unwrap();
        for (a, b) in t1.probs.iter().zip(&t2.probs) {
            let ba: Vec<u64> = a.iter().map(|v| v.to_bits()).collect();
            let bb: Vec<u64> = b.iter().map(|v| v.to_bits()).collect();
            assert_eq!(ba, bb, "probability bits differ after reload");
        }
    }
    pass("C8 checkpoint-roundtrip");
}

// ---------------------------------------------------------------------
// Criterion 9: t-test correctness

#[test]
fn c9_t_test_worked_example() {
    // Welch worked example (independent SciPy reference): two groups of
    // 15 scores; t = -2.9513249058, dof = 27.3501155247, upper-tail
    // p = 0.9967889245 / reverse 0.0032110755.
    let a = [
        27.5, 21.0, 19.0, 23.6, 17.0, 17.9, 16.9, 20.1, 21.9, 22.6, 23.1, 19.6, 19.0, 21.7, 21.4,
    ];
    let b = [
        27.1, 22.0, 20.8, 23.4, 23.4, 23.5, 25.8, 22.0, 24.8, 20.2, 21.9, 22.1, 22.9, 30.5, 31.2,
    ];
    let (t, dof) = welch_statistic(&a, &b);
    assert!((t - (-2.9513249058013313)).abs() < 1e-9);
    assert!((dof - 27.350115524702307).abs() < 1e-9);
    let p = t_test_one_sided(&a, &b);
    assert!(
        (p - 0.9967889245).abs() < 5e-5,
        "worked example p {p} vs 0.9968 at 4 decimals"
    );
    let p_rev = t_test_one_sided(&b, &a);
    assert!((p_rev - 0.0032110755).abs() < 5e-5);

    // second worked example with strongly unequal variances and sizes
    let c = [3.0, 4.0, 1.0, 2.1];
    let d = [490.2, 340.0, 433.9];
    let p_cd = t_test_one_sided(&c, &d);
    assert!((p_cd - 0.9946242194).abs() < 5e-5);

    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    for _ in 0..500 {
        let n = rng.random_range(2..=8);
        let xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 5.0).collect();
        let ys: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 5.0).collect();
        let p1 = t_test_one_sided(&xs, &ys);
        let p2 = t_test_one_sided(&ys, &xs);
        assert!((p1 + p2 - 1.0).abs() < 1e-9, "complement: {p1} + {p2}");
    }
    pass("C9 t-test-correctness");
}

// ---------------------------------------------------------------------

/// The dataset reader exists for the CLI surface; exercise it here so the
/// acceptance target also covers the prepared-file round trip.
#[test]
fn prepared_dataset_file_roundtrip() {
    use biotrig_core::standoff::{align_sentences, write_dataset};
    let text = "VEGF induces angiogenesis. Cells die.";
    let a1 = "T1\tGene_or_gene_product 0 4\tVEGF\n";
    let a2 = "T2\tBlood_vessel_development 13 25\tangiogenesis\nT3\tDeath 33 36\tdie\n";
    let doc = parse_standoff("d1", text, a1, a2).unwrap();
    let sents = align_sentences(&doc, &split_sentences(text, &doc.annotation_spans()));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("train.tsv");
    write_dataset(&path, &sents).unwrap();
    let back = read_dataset(&path).unwrap();
    assert_eq!(back.len(), sents.len());
    for (a, b) in sents.iter().zip(&back) {
        assert_eq!(a.tokens.len(), b.tokens.len());
        for (ta, tb) in a.tokens.iter().zip(&b.tokens) {
            assert_eq!(ta.surface, tb.surface);
            assert_eq!(ta.trigger_label, tb.trigger_label);
            assert_eq!(ta.entity_type, tb.entity_type);
        }
    }
}
