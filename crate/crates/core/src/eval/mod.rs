//! Scoring: micro-averaged precision/recall/F1 over non-None labels with
//! deferred-label forced false negatives, per-label breakdowns, category
//! rollups, the confusion matrix, and the one-sided Welch t-test.

mod category;
mod report;
mod ttest;

pub use category::{category_rollup, CategoryMap, CategoryReport};
pub use report::{confusion_tsv, machine_record, parse_machine_record, render_report};
pub use ttest::{t_test_one_sided, welch_statistic};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::standoff::Vocabularies;

/// TP/FP/FN counts with the derived precision, recall, and F1.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Metrics {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Metrics {
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Metrics {
        let precision = if tp + fp > 0 {
            tp as f64 / (tp + fp) as f64
        } else {
            0.0
        };
        let recall = if tp + fn_ > 0 {
            tp as f64 / (tp + fn_) as f64
        } else {
            0.0
        };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Metrics {
            tp,
            fp,
            fn_,
            precision,
            recall,
            f1,
        }
    }
}

/// Per-label counts and metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelMetrics {
    pub label: String,
    pub metrics: Metrics,
}

/// Full scoring record for one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub micro: Metrics,
    /// Non-None labels in vocabulary id order.
    pub per_label: Vec<LabelMetrics>,
    /// `confusion[gold][pred]` over all labels including None, in
    /// vocabulary id order (deferred predictions are counted as None).
    pub confusion: Vec<Vec<u64>>,
    /// Confusion axis names, vocabulary id order.
    pub labels: Vec<String>,
    pub deferred: Vec<String>,
    pub token_count: u64,
}

/// Token-level micro scoring.
///
/// Over non-None labels: TP when `pred == gold != None`; FP when
/// `pred != None` and `pred != gold`; FN when `gold != None` and
/// `pred != gold`. Predictions of deferred labels are collapsed to None
/// first, so every gold token of a deferred label scores as one false
/// negative no matter what the model produced. None-None agreements are
/// ignored.
pub fn micro_prf(gold: &[usize], pred: &[usize], vocabs: &Vocabularies) -> Result<EvalReport> {
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let n_labels = vocabs.label_count();
    let none = vocabs.none_label_id();
    let deferred = vocabs.deferred_labels();

    let mut tp = vec![0u64; n_labels];
    let mut fp = vec![0u64; n_labels];
    let mut fn_ = vec![0u64; n_labels];
    let mut confusion = vec![vec![0u64; n_labels]; n_labels];

    for (&g, &p_raw) in gold.iter().zip(pred) {
        debug_assert!(g < n_labels && p_raw < n_labels);
        let p = if deferred.contains(&p_raw) { none } else { p_raw };
        confusion[g][p] += 1;
        if g != none && p == g {
            tp[g] += 1;
        } else {
            if p != none {
                fp[p] += 1;
            }
            if g != none {
                fn_[g] += 1;
            }
        }
    }

    let per_label: Vec<LabelMetrics> = (0..n_labels)
        .filter(|&id| id != none)
        .map(|id| LabelMetrics {
            label: vocabs.label_name(id).to_string(),
            metrics: Metrics::from_counts(tp[id], fp[id], fn_[id]),
        })
        .collect();
    let micro = Metrics::from_counts(
        tp.iter().enumerate().filter(|(i, _)| *i != none).map(|(_, v)| v).sum(),
        fp.iter().enumerate().filter(|(i, _)| *i != none).map(|(_, v)| v).sum(),
        fn_.iter().enumerate().filter(|(i, _)| *i != none).map(|(_, v)| v).sum(),
    );
    Ok(EvalReport {
        micro,
        per_label,
        confusion,
        labels: vocabs.label_names().to_vec(),
        deferred: deferred
            .iter()
            .map(|&id| vocabs.label_name(id).to_string())
            .collect(),
        token_count: gold.len() as u64,
    })
}

/// Standalone confusion matrix: entry `(i, j)` counts tokens with gold
/// label `i` predicted as `j`, including the None row and column.
pub fn confusion_matrix(gold: &[usize], pred: &[usize], n_labels: usize) -> Result<Vec<Vec<u64>>> {
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let mut m = vec![vec![0u64; n_labels]; n_labels];
    for (&g, &p) in gold.iter().zip(pred) {
        m[g][p] += 1;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn vocabs_with(labels: &[&str], deferred: &[&str]) -> Vocabularies {
        let mut v = Vocabularies::from_inventories(&["w"], &[], labels);
        let ids: BTreeSet<usize> = deferred
            .iter()
            .map(|d| v.label_id(Some(d)).unwrap())
            .collect();
        v.set_deferred_labels(ids);
        v
    }

    #[test]
    fn three_token_hand_count() {
        // gold [BVD, None, PREG], pred [BVD, PREG, None]
        let v = vocabs_with(&["BVD", "PREG"], &[]);
        let bvd = v.label_id(Some("BVD")).unwrap();
        let preg = v.label_id(Some("PREG")).unwrap();
        let none = v.none_label_id();
        let r = micro_prf(&[bvd, none, preg], &[bvd, preg, none], &v).unwrap();
        assert_eq!((r.micro.tp, r.micro.fp, r.micro.fn_), (1, 1, 1));
        assert_eq!(r.micro.precision, 0.5);
        assert_eq!(r.micro.recall, 0.5);
        assert_eq!(r.micro.f1, 0.5);
    }

    #[test]
    fn perfect_prediction_scores_one() {
        let v = vocabs_with(&["A", "B"], &[]);
        let gold = vec![1, 0, 2, 2, 0];
        let r = micro_prf(&gold, &gold, &v).unwrap();
        assert_eq!(r.micro.precision, 1.0);
        assert_eq!(r.micro.recall, 1.0);
        assert_eq!(r.micro.f1, 1.0);
    }

    #[test]
    fn deferred_gold_tokens_are_forced_false_negatives() {
        let v = vocabs_with(&["A", "SYN"], &["SYN"]);
        let syn = v.label_id(Some("SYN")).unwrap();
        let gold = vec![syn, syn, syn, syn];
        // even predicting SYN correctly cannot score: predictions collapse
        // to None and each gold token counts as FN
        let pred = vec![syn, syn, 0, 1];
        let r = micro_prf(&gold, &pred, &v).unwrap();
        assert_eq!(r.micro.fn_, 4);
        assert_eq!(r.micro.tp, 0);
        // the stray "A" prediction is the only false positive
        assert_eq!(r.micro.fp, 1);
    }

    #[test]
    fn none_none_agreements_are_ignored() {
        let v = vocabs_with(&["A"], &[]);
        let r = micro_prf(&[0, 0, 0], &[0, 0, 0], &v).unwrap();
        assert_eq!((r.micro.tp, r.micro.fp, r.micro.fn_), (0, 0, 0));
        assert_eq!(r.micro.f1, 0.0);
    }

    #[test]
    fn micro_counts_equal_per_label_sums() {
        let v = vocabs_with(&["A", "B", "C"], &["C"]);
        let gold = vec![1, 2, 3, 0, 1, 2, 3, 0, 1];
        let pred = vec![1, 1, 3, 2, 0, 2, 0, 0, 3];
        let r = micro_prf(&gold, &pred, &v).unwrap();
        let tp: u64 = r.per_label.iter().map(|l| l.metrics.tp).sum();
        let fp: u64 = r.per_label.iter().map(|l| l.metrics.fp).sum();
        let fn_: u64 = r.per_label.iter().map(|l| l.metrics.fn_).sum();
        assert_eq!((r.micro.tp, r.micro.fp, r.micro.fn_), (tp, fp, fn_));
    }

    #[test]
    fn confusion_rows_sum_to_gold_counts() {
        let v = vocabs_with(&["A", "B"], &[]);
        let gold = vec![1, 1, 2, 0, 2, 2];
        let pred = vec![2, 1, 2, 1, 0, 2];
        let r = micro_prf(&gold, &pred, &v).unwrap();
        for (g, row) in r.confusion.iter().enumerate() {
            let row_sum: u64 = row.iter().sum();
            let gold_count = gold.iter().filter(|&&x| x == g).count() as u64;
            assert_eq!(row_sum, gold_count);
        }
        let total: u64 = r.confusion.iter().flatten().sum();
        assert_eq!(total, gold.len() as u64);
    }

    #[test]
    fn standalone_confusion_counts_directly() {
        // gold [A, B], pred [B, B] over labels {None, A, B}
        let m = confusion_matrix(&[1, 2], &[2, 2], 3).unwrap();
        assert_eq!(m[1][2], 1);
        assert_eq!(m[2][2], 1);
        assert_eq!(m[0][0], 0);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let v = vocabs_with(&["A"], &[]);
        assert!(matches!(
            micro_prf(&[0, 1], &[0], &v),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn relabeling_permutation_preserves_micro_f1() {
        let v = vocabs_with(&["A", "B", "C"], &[]);
        let gold = vec![1, 2, 3, 0, 1, 2, 0, 3, 3];
        let pred = vec![1, 3, 3, 1, 0, 2, 2, 0, 3];
        let r1 = micro_prf(&gold, &pred, &v).unwrap();
        // permute labels 1->2, 2->3, 3->1 consistently in gold and pred
        let perm = |x: usize| if x == 0 { 0 } else { x % 3 + 1 };
        let gold2: Vec<usize> = gold.iter().map(|&x| perm(x)).collect();
        let pred2: Vec<usize> = pred.iter().map(|&x| perm(x)).collect();
        let r2 = micro_prf(&gold2, &pred2, &v).unwrap();
        assert_eq!(r1.micro, r2.micro);
    }

    #[test]
    fn deferring_a_label_never_increases_recall_or_other_fps() {
        let plain = vocabs_with(&["A", "B"], &[]);
        let with_deferred = vocabs_with(&["A", "B"], &["B"]);
        let gold = vec![1, 2, 2, 0, 1, 2];
        let pred = vec![1, 2, 1, 2, 0, 0];
        let r1 = micro_prf(&gold, &pred, &plain).unwrap();
        let r2 = micro_prf(&gold, &pred, &with_deferred).unwrap();
        assert!(r2.micro.recall <= r1.micro.recall);
        // FP counts of non-deferred labels unchanged
        let fp_a_1 = r1.per_label.iter().find(|l| l.label == "A").unwrap().metrics.fp;
        let fp_a_2 = r2.per_label.iter().find(|l| l.label == "A").unwrap().metrics.fp;
        assert_eq!(fp_a_1, fp_a_2);
    }
}
