//! Report rendering: text tables, CSV, side-by-side comparisons, and run
//! manifests. Numbers render at 3 decimal places; JSON keeps full precision.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::metrics::EvaluationReport;

pub fn fmt3(x: f64) -> String {
    format!("{x:.3}")
}

/// Plain-text table: one row per business class plus macro-F1 and DIP.
pub fn render_table(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let name_width = report
        .per_class
        .iter()
        .map(|r| r.counts.class_name.len())
        .chain(["macro_f1".len()])
        .max()
        .unwrap_or(8);
    out.push_str(&format!(
        "{:<name_width$}  {:>9}  {:>9}  {:>9}\n",
        "class", "precision", "recall", "f1"
    ));
    for r in &report.per_class {
        out.push_str(&format!(
            "{:<name_width$}  {:>9}  {:>9}  {:>9}\n",
            r.counts.class_name,
            fmt3(r.precision),
            fmt3(r.recall),
            fmt3(r.f1)
        ));
    }
    out.push_str(&format!("{:<name_width$}  {:>31}\n", "macro_f1", fmt3(report.macro_f1)));
    out.push_str(&format!("{:<name_width$}  {:>31}\n", "DIP", fmt3(report.dip)));
    out
}

/// CSV mirror of the table: one row per class, a macro-F1 row, a DIP row.
pub fn render_csv(report: &EvaluationReport) -> String {
    let mut out = String::from("class,tp,fp,fn,precision,recall,f1\n");
    for r in &report.per_class {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.counts.class_name, r.counts.tp, r.counts.fp, r.counts.fn_, r.precision, r.recall, r.f1
        ));
    }
    out.push_str(&format!("macro_f1,,,,,,{}\n", report.macro_f1));
    out.push_str(&format!("DIP,,,,,,{}\n", report.dip));
    out
}

/// Up to `limit` failure extracts per ground-truth class.
pub fn render_failures(report: &EvaluationReport, limit: usize) -> String {
    let mut out = String::new();
    let mut classes: Vec<&str> = report
        .document_failures
        .iter()
        .map(|f| f.gt_label.as_str())
        .collect();
    classes.dedup();
    classes.sort_unstable();
    classes.dedup();
    for class in classes {
        let mut shown = 0;
        for f in report.document_failures.iter().filter(|f| f.gt_label == class) {
            if shown >= limit {
                break;
            }
            out.push_str(&format!(
                "{}: token {} {:?} gt={} predicted={}\n",
                f.doc_id, f.token_index, f.token_text, f.gt_label, f.predicted_label
            ));
            shown += 1;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub name: String,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
}

/// Side-by-side per-class F1 and DIP. Both reports must cover the same
/// classes in the same order.
pub fn compare(a: &EvaluationReport, b: &EvaluationReport) -> Result<Comparison, Error> {
    let names_a: Vec<&str> = a.per_class.iter().map(|r| r.counts.class_name.as_str()).collect();
    let names_b: Vec<&str> = b.per_class.iter().map(|r| r.counts.class_name.as_str()).collect();
    for n in &names_a {
        if !names_b.contains(n) {
            return Err(Error::LabelSetMismatch(format!(
                "class {n:?} missing from second report"
            )));
        }
    }
    for n in &names_b {
        if !names_a.contains(n) {
            return Err(Error::LabelSetMismatch(format!(
                "class {n:?} missing from first report"
            )));
        }
    }
    let mut rows = Vec::new();
    for ra in &a.per_class {
        let rb = b
            .per_class
            .iter()
            .find(|r| r.counts.class_name == ra.counts.class_name)
            .expect("checked above");
        rows.push(ComparisonRow {
            name: ra.counts.class_name.clone(),
            a: ra.f1,
            b: rb.f1,
            delta: rb.f1 - ra.f1,
        });
    }
    rows.push(ComparisonRow {
        name: "DIP".to_string(),
        a: a.dip,
        b: b.dip,
        delta: b.dip - a.dip,
    });
    Ok(Comparison { rows })
}

pub fn render_comparison(cmp: &Comparison) -> String {
    let name_width = cmp.rows.iter().map(|r| r.name.len()).max().unwrap_or(4);
    let mut out = format!(
        "{:<name_width$}  {:>8}  {:>8}  {:>8}\n",
        "metric", "A", "B", "delta"
    );
    for r in &cmp.rows {
        out.push_str(&format!(
            "{:<name_width$}  {:>8}  {:>8}  {:>8}\n",
            r.name,
            fmt3(r.a),
            fmt3(r.b),
            fmt3(r.delta)
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance record written next to every output file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, arguments: Vec<String>, inputs: Vec<InputDigest>) -> Self {
        Self {
            command: command.to_string(),
            arguments,
            inputs,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }
}

pub fn digest_file(path: &std::path::Path) -> std::io::Result<InputDigest> {
    let bytes = std::fs::read(path)?;
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}
