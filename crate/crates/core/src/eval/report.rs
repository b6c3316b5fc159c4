//! Report rendering: a human table with two-decimal percentages, a flat
//! key-value machine record at full precision, and the confusion matrix as
//! labeled TSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{CategoryReport, EvalReport, Metrics};

fn pct(x: f64) -> String {
    format!("{:.2}", x * 100.0)
}

/// Human-readable report: micro line, category rows when available, and
/// the per-label breakdown. Percentages, two decimals.
pub fn render_report(report: &EvalReport, categories: Option<&CategoryReport>) -> String {
    let mut out = String::new();
    writeln!(out, "{:<28}{:>10}{:>10}{:>10}", "", "Precision", "Recall", "F1-Score").unwrap();
    if let Some(cats) = categories {
        for (name, m) in &cats.rows {
            writeln!(
                out,
                "{:<28}{:>10}{:>10}{:>10}",
                name,
                pct(m.precision),
                pct(m.recall),
                pct(m.f1)
            )
            .unwrap();
        }
    }
    writeln!(
        out,
        "{:<28}{:>10}{:>10}{:>10}",
        "Overall",
        pct(report.micro.precision),
        pct(report.micro.recall),
        pct(report.micro.f1)
    )
    .unwrap();
    writeln!(out).unwrap();
    writeln!(
        out,
        "{:<28}{:>8}{:>8}{:>8}{:>10}{:>10}{:>10}",
        "Label", "TP", "FP", "FN", "Precision", "Recall", "F1-Score"
    )
    .unwrap();
    for lm in &report.per_label {
        let m = &lm.metrics;
        let deferred_mark = if report.deferred.contains(&lm.label) {
            " (deferred)"
        } else {
            ""
        };
        writeln!(
            out,
            "{:<28}{:>8}{:>8}{:>8}{:>10}{:>10}{:>10}{}",
            lm.label,
            m.tp,
            m.fp,
            m.fn_,
            pct(m.precision),
            pct(m.recall),
            pct(m.f1),
            deferred_mark
        )
        .unwrap();
    }
    out
}

fn write_metrics(out: &mut String, prefix: &str, m: &Metrics) {
    writeln!(out, "{prefix}.tp = {}", m.tp).unwrap();
    writeln!(out, "{prefix}.fp = {}", m.fp).unwrap();
    writeln!(out, "{prefix}.fn = {}", m.fn_).unwrap();
    writeln!(out, "{prefix}.precision = {}", m.precision).unwrap();
    writeln!(out, "{prefix}.recall = {}", m.recall).unwrap();
    writeln!(out, "{prefix}.f1 = {}", m.f1).unwrap();
}

/// Flat `key = value` record with full-precision floats and all counts.
pub fn machine_record(report: &EvalReport, categories: Option<&CategoryReport>) -> String {
    let mut out = String::new();
    writeln!(out, "token_count = {}", report.token_count).unwrap();
    writeln!(out, "deferred = {}", report.deferred.join(",")).unwrap();
    write_metrics(&mut out, "micro", &report.micro);
    for lm in &report.per_label {
        write_metrics(&mut out, &format!("label.{}", lm.label), &lm.metrics);
    }
    if let Some(cats) = categories {
        for (name, m) in &cats.rows {
            write_metrics(&mut out, &format!("category.{name}"), m);
        }
    }
    out
}

/// Parses a machine record back into its key-value pairs.
pub fn parse_machine_record(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|line| {
            line.split_once(" = ")
                .map(|(k, v)| (k.to_string(), v.to_string()))
        })
        .collect()
}

/// Confusion matrix as labeled TSV: header row of predicted labels, one
/// row per gold label.
pub fn confusion_tsv(report: &EvalReport) -> String {
    let mut out = String::from("gold\\pred");
    for name in &report.labels {
        out.push('\t');
        out.push_str(name);
    }
    out.push('\n');
    for (g, row) in report.confusion.iter().enumerate() {
        out.push_str(&report.labels[g]);
        for v in row {
            write!(out, "\t{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::{micro_prf, LabelMetrics};
    use super::*;
    use crate::standoff::Vocabularies;

    fn sample_report() -> EvalReport {
        let v = Vocabularies::from_inventories(&["w"], &[], &["BVD", "PREG"]);
        micro_prf(&[1, 0, 2, 1], &[1, 2, 0, 1], &v).unwrap()
    }

    #[test]
    fn percentages_render_with_two_decimals() {
        assert_eq!(pct(0.791132), "79.11");
        assert_eq!(pct(1.0), "100.00");
        assert_eq!(pct(0.0), "0.00");
    }

    #[test]
    fn empty_report_renders_without_division_errors() {
        let v = Vocabularies::from_inventories(&["w"], &[], &["A"]);
        let r = micro_prf(&[], &[], &v).unwrap();
        assert_eq!(r.micro, Metrics::from_counts(0, 0, 0));
        let text = render_report(&r, None);
        assert!(text.contains("0.00"));
    }

    #[test]
    fn machine_record_roundtrips_counts() {
        let r = sample_report();
        let record = machine_record(&r, None);
        let kv = parse_machine_record(&record);
        assert_eq!(kv["micro.tp"], r.micro.tp.to_string());
        assert_eq!(kv["micro.fp"], r.micro.fp.to_string());
        assert_eq!(kv["micro.fn"], r.micro.fn_.to_string());
        // full-precision floats reparse bit-identically
        let p: f64 = kv["micro.precision"].parse().unwrap();
        assert_eq!(p.to_bits(), r.micro.precision.to_bits());
    }

    #[test]
    fn confusion_tsv_has_labeled_axes() {
        let r = sample_report();
        let tsv = confusion_tsv(&r);
        let mut lines = tsv.lines();
        assert_eq!(lines.next().unwrap(), "gold\\pred\tNone\tBVD\tPREG");
        assert!(lines.next().unwrap().starts_with("None\t"));
    }

    #[test]
    fn deferred_labels_are_marked_in_render() {
        let mut r = sample_report();
        r.deferred = vec!["PREG".to_string()];
        let text = render_report(&r, None);
        assert!(text.contains("(deferred)"));
        let _ = LabelMetrics {
            label: "x".into(),
            metrics: Metrics::default(),
        };
    }
}
