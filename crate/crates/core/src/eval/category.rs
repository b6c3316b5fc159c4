//! Trigger-category rollups: pooling per-label counts into the four MLEE
//! event categories.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{LabelMetrics, Metrics};
use crate::error::{Error, Result};

/// Label → category assignment. Lookup normalizes case and treats spaces
/// and underscores as equivalent, so "Blood_vessel_development" and
/// "Blood Vessel Development" both match.
#[derive(Debug, Clone)]
pub struct CategoryMap {
    categories: Vec<String>,
    by_label: BTreeMap<String, usize>,
}

fn normalize(label: &str) -> String {
    label.to_lowercase().replace(' ', "_")
}

impl CategoryMap {
    pub fn new(categories: Vec<String>, assignments: &[(&str, &str)]) -> CategoryMap {
        let cat_index: BTreeMap<&str, usize> = categories
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let by_label = assignments
            .iter()
            .map(|(label, cat)| (normalize(label), cat_index[cat]))
            .collect();
        CategoryMap {
            categories,
            by_label,
        }
    }

    /// The MLEE inventory: 19 trigger types in 4 categories.
    pub fn mlee() -> CategoryMap {
        let categories = ["Anatomical", "Molecular", "General", "Planned"]
            .map(String::from)
            .to_vec();
        CategoryMap::new(
            categories,
            &[
                ("Cell_proliferation", "Anatomical"),
                ("Development", "Anatomical"),
                ("Blood_vessel_development", "Anatomical"),
                ("Death", "Anatomical"),
                ("Breakdown", "Anatomical"),
                ("Remodeling", "Anatomical"),
                ("Growth", "Anatomical"),
                ("Synthesis", "Molecular"),
                ("Gene_expression", "Molecular"),
                ("Transcription", "Molecular"),
                ("Catabolism", "Molecular"),
                ("Phosphorylation", "Molecular"),
                ("Dephosphorylation", "Molecular"),
                ("Localization", "General"),
                ("Binding", "General"),
                ("Regulation", "General"),
                ("Positive_regulation", "General"),
                ("Negative_regulation", "General"),
                ("Planned_process", "Planned"),
            ],
        )
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn category_of(&self, label: &str) -> Option<&str> {
        self.by_label
            .get(&normalize(label))
            .map(|&i| self.categories[i].as_str())
    }

    pub fn label_count(&self) -> usize {
        self.by_label.len()
    }
}

/// Per-category pooled metrics plus the overall pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryReport {
    pub rows: Vec<(String, Metrics)>,
    pub overall: Metrics,
}

/// Sums TP/FP/FN within each category, then derives P/R/F1 per category
/// and over the whole pool. A label with nonzero counts that is missing
/// from the map is an error; untouched unmapped labels are skipped.
pub fn category_rollup(per_label: &[LabelMetrics], map: &CategoryMap) -> Result<CategoryReport> {
    let mut pooled: BTreeMap<&str, (u64, u64, u64)> = BTreeMap::new();
    let mut total = (0u64, 0u64, 0u64);
    for lm in per_label {
        let m = &lm.metrics;
        let involved = m.tp + m.fp + m.fn_ > 0;
        match map.category_of(&lm.label) {
            Some(cat) => {
                let slot = pooled.entry(cat).or_insert((0, 0, 0));
                slot.0 += m.tp;
                slot.1 += m.fp;
                slot.2 += m.fn_;
                total.0 += m.tp;
                total.1 += m.fp;
                total.2 += m.fn_;
            }
            None if involved => return Err(Error::UnmappedLabel(lm.label.clone())),
            None => {}
        }
    }
    let rows = map
        .categories()
        .iter()
        .filter_map(|cat| {
            pooled
                .get(cat.as_str())
                .map(|&(tp, fp, fn_)| (cat.clone(), Metrics::from_counts(tp, fp, fn_)))
        })
        .collect();
    Ok(CategoryReport {
        rows,
        overall: Metrics::from_counts(total.0, total.1, total.2),
    })
}
