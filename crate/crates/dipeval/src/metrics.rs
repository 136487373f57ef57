//! Per-class precision/recall/F1 and Document Integrity Precision (DIP).
//!
//! DIP is the fraction of documents whose in-scope tokens are all predicted
//! correctly. A single wrong token makes the whole document wrong; there is
//! no partial credit. Which tokens are in scope is configurable: every
//! token, or only tokens whose ground truth is a business label.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{Corpus, Document, PredictionSet, NONE_CLASS};

/// Token scope for the document-correctness verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DipScope {
    /// Every token counts, background included.
    AllTokens,
    /// Only tokens with a non-background ground truth count.
    NonNoneOnly,
}

impl Default for DipScope {
    fn default() -> Self {
        DipScope::NonNoneOnly
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub class_name: String,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    #[serde(flatten)]
    pub counts: ClassCounts,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentFailure {
    pub doc_id: String,
    /// Index of the first in-scope token whose prediction is wrong.
    pub token_index: usize,
    pub token_text: String,
    pub gt_label: String,
    pub predicted_label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub scope: DipScope,
    pub per_class: Vec<ClassReport>,
    pub macro_f1: f64,
    pub dip: f64,
    pub document_failures: Vec<DocumentFailure>,
}

pub fn precision(counts: &ClassCounts) -> f64 {
    ratio(counts.tp, counts.tp + counts.fp)
}

pub fn recall(counts: &ClassCounts) -> f64 {
    ratio(counts.tp, counts.tp + counts.fn_)
}

/// Harmonic mean of precision and recall, computed as the single division
/// 2·TP / (2·TP + FP + FN) so the result is exactly rounded.
pub fn f1(counts: &ClassCounts) -> f64 {
    ratio(2 * counts.tp, 2 * counts.tp + counts.fp + counts.fn_)
}

// zero denominator yields 0, keeping macro-F1 defined
fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn gt_label(doc: &Document, idx: usize) -> &str {
    doc.tokens[idx].gt_label.as_deref().unwrap_or(NONE_CLASS)
}

fn in_scope(gt: &str, scope: DipScope) -> bool {
    match scope {
        DipScope::AllTokens => true,
        DipScope::NonNoneOnly => gt != NONE_CLASS,
    }
}

/// Token-level one-vs-rest counts for one class over the whole corpus.
pub fn class_counts(
    corpus: &Corpus,
    preds: &PredictionSet,
    class_name: &str,
) -> Result<ClassCounts, Error> {
    let mut counts = ClassCounts {
        class_name: class_name.to_string(),
        tp: 0,
        fp: 0,
        fn_: 0,
    };
    for doc in &corpus.documents {
        let predicted = preds.labels_for(doc, &corpus.label_set)?;
        for (i, pred) in predicted.iter().enumerate() {
            let gt = gt_label(doc, i);
            let gt_is = gt == class_name;
            let pred_is = pred == class_name;
            match (gt_is, pred_is) {
                (true, true) => counts.tp += 1,
                (false, true) => counts.fp += 1,
                (true, false) => counts.fn_ += 1,
                (false, false) => {}
            }
        }
    }
    Ok(counts)
}

/// DIP = 1 − wrongDocuments/totalDocuments. A document is wrong as soon as
/// one in-scope token mismatches; further tokens of that document are not
/// inspected.
pub fn dip(corpus: &Corpus, preds: &PredictionSet, scope: DipScope) -> Result<f64, Error> {
    if corpus.documents.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut wrong = 0usize;
    for doc in &corpus.documents {
        let predicted = preds.labels_for(doc, &corpus.label_set)?;
        for (i, pred) in predicted.iter().enumerate() {
            let gt = gt_label(doc, i);
            if in_scope(gt, scope) && pred != gt {
                wrong += 1;
                break;
            }
        }
    }
    // computed as |CD_t| / |D_t| rather than 1 - wrong/total: the two are
    // equal as rationals but can differ in the last ulp as floats
    let total = corpus.documents.len();
    Ok((total - wrong) as f64 / total as f64)
}

/// Full report: per-class metrics for every business class in label-set
/// order, macro-F1 over those classes, DIP, and the first failing token of
/// each wrong document.
pub fn evaluate(
    corpus: &Corpus,
    preds: &PredictionSet,
    scope: DipScope,
) -> Result<EvaluationReport, Error> {
    if corpus.documents.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let class_names: Vec<String> = corpus
        .label_set
        .business_classes()
        .map(|s| s.to_string())
        .collect();
    let mut per_counts: Vec<ClassCounts> = class_names
        .iter()
        .map(|name| ClassCounts {
            class_name: name.clone(),
            tp: 0,
            fp: 0,
            fn_: 0,
        })
        .collect();
    let index_of = |name: &str| class_names.iter().position(|c| c == name);

    let mut failures = Vec::new();
    for doc in &corpus.documents {
        let predicted = preds.labels_for(doc, &corpus.label_set)?;
        let mut failed = false;
        for (i, pred) in predicted.iter().enumerate() {
            let gt = gt_label(doc, i);
            if pred != gt {
                if let Some(k) = index_of(gt) {
                    per_counts[k].fn_ += 1;
                }
                if let Some(k) = index_of(pred) {
                    per_counts[k].fp += 1;
                }
            } else if let Some(k) = index_of(gt) {
                per_counts[k].tp += 1;
            }
            if !failed && in_scope(gt, scope) && pred != gt {
                failed = true;
                failures.push(DocumentFailure {
                    doc_id: doc.doc_id.clone(),
                    token_index: i,
                    token_text: doc.tokens[i].text.clone(),
                    gt_label: gt.to_string(),
                    predicted_label: pred.clone(),
                });
            }
        }
    }

    let per_class: Vec<ClassReport> = per_counts
        .into_iter()
        .map(|counts| ClassReport {
            precision: precision(&counts),
            recall: recall(&counts),
            f1: f1(&counts),
            counts,
        })
        .collect();
    let macro_f1 = if per_class.is_empty() {
        0.0
    } else {
        per_class.iter().map(|r| r.f1).sum::<f64>() / per_class.len() as f64
    };
    let total = corpus.documents.len();
    let dip = (total - failures.len()) as f64 / total as f64;

    Ok(EvaluationReport {
        scope,
        per_class,
        macro_f1,
        dip,
        document_failures: failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BoundingBox, Document, LabelClass, LabelSet, Token};

    fn labels(names: &[&str]) -> LabelSet {
        LabelSet::new(
            names
                .iter()
                .map(|n| LabelClass {
                    name: n.to_string(),
                    exact_match_required: false,
                })
                .collect(),
        )
        .unwrap()
    }

    fn doc(id: &str, gt: &[&str]) -> Document {
        Document {
            doc_id: id.into(),
            creditor_id: "c1".into(),
            tokens: gt
                .iter()
                .enumerate()
                .map(|(i, g)| Token {
                    text: format!("t{i}"),
                    bbox: BoundingBox::new(0.0, 20.0 * i as f64, 50.0, 20.0 * i as f64 + 15.0),
                    gt_label: Some(g.to_string()),
                })
                .collect(),
        }
    }

    fn corpus_of(docs: Vec<Document>, names: &[&str]) -> Corpus {
        Corpus {
            documents: docs,
            label_set: labels(names),
        }
    }

    fn preds_of(pairs: &[(&str, &[&str])]) -> PredictionSet {
        let mut p = PredictionSet::default();
        for (id, labels) in pairs {
            p.insert_labels(*id, labels.iter().map(|s| s.to_string()).collect());
        }
        p
    }

    #[test]
    fn counts_perfect_prediction() {
        let c = corpus_of(vec![doc("d", &["A", "None", "B"])], &["None", "A", "B"]);
        let p = preds_of(&[("d", &["A", "None", "B"])]);
        let counts = class_counts(&c, &p, "A").unwrap();
        assert_eq!((counts.tp, counts.fp, counts.fn_), (1, 0, 0));
    }

    #[test]
    fn counts_mixed_errors() {
        let c = corpus_of(vec![doc("d", &["A", "A", "None"])], &["None", "A"]);
        let p = preds_of(&[("d", &["A", "None", "A"])]);
        let counts = class_counts(&c, &p, "A").unwrap();
        assert_eq!((counts.tp, counts.fp, counts.fn_), (1, 1, 1));
    }

    #[test]
    fn counts_reject_missing_prediction() {
        let c = corpus_of(vec![doc("d", &["A"])], &["None", "A"]);
        let p = PredictionSet::default();
        let err = class_counts(&c, &p, "A").unwrap_err();
        assert!(err.to_string().contains('d'));
    }

    #[test]
    fn prf_basic_values() {
        let counts = ClassCounts { class_name: "A".into(), tp: 9, fp: 1, fn_: 1 };
        assert_eq!(precision(&counts), 0.9);
        assert_eq!(recall(&counts), 0.9);
        assert_eq!(f1(&counts), 0.9);
    }

    #[test]
    fn prf_zero_division_convention() {
        let zero = ClassCounts { class_name: "A".into(), tp: 0, fp: 0, fn_: 0 };
        assert_eq!(precision(&zero), 0.0);
        assert_eq!(recall(&zero), 0.0);
        assert_eq!(f1(&zero), 0.0);
        let perfect = ClassCounts { class_name: "A".into(), tp: 7, fp: 0, fn_: 0 };
        assert_eq!(precision(&perfect), 1.0);
        assert_eq!(recall(&perfect), 1.0);
        assert_eq!(f1(&perfect), 1.0);
    }

    #[test]
    fn dip_one_wrong_document_in_four() {
        let c = corpus_of(
            vec![
                doc("d1", &["A", "None"]),
                doc("d2", &["A", "None"]),
                doc("d3", &["A", "None"]),
                doc("d4", &["A", "None"]),
            ],
            &["None", "A", "B"],
        );
        let p = preds_of(&[
            ("d1", &["A", "None"]),
            ("d2", &["B", "None"]),
            ("d3", &["A", "None"]),
            ("d4", &["A", "None"]),
        ]);
        assert_eq!(dip(&c, &p, DipScope::NonNoneOnly).unwrap(), 0.75);
        assert_eq!(dip(&c, &p, DipScope::AllTokens).unwrap(), 0.75);
    }

    #[test]
    fn dip_perfect_is_one() {
        let c = corpus_of(vec![doc("d1", &["A"]), doc("d2", &["None"])], &["None", "A"]);
        let p = preds_of(&[("d1", &["A"]), ("d2", &["None"])]);
        assert_eq!(dip(&c, &p, DipScope::NonNoneOnly).unwrap(), 1.0);
    }

    #[test]
    fn dip_scope_excludes_none_tokens() {
        // the only error is on a None token: counted under AllTokens, ignored otherwise
        let c = corpus_of(vec![doc("d1", &["A", "None"])], &["None", "A"]);
        let p = preds_of(&[("d1", &["A", "A"])]);
        assert_eq!(dip(&c, &p, DipScope::NonNoneOnly).unwrap(), 1.0);
        assert_eq!(dip(&c, &p, DipScope::AllTokens).unwrap(), 0.0);
    }

    #[test]
    fn dip_rejects_empty_corpus() {
        let c = corpus_of(vec![], &["None"]);
        assert!(matches!(
            dip(&c, &PredictionSet::default(), DipScope::NonNoneOnly),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn evaluate_perfect() {
        let c = corpus_of(vec![doc("d1", &["A", "None", "B"])], &["None", "A", "B"]);
        let p = preds_of(&[("d1", &["A", "None", "B"])]);
        let report = evaluate(&c, &p, DipScope::NonNoneOnly).unwrap();
        assert_eq!(report.macro_f1, 1.0);
        assert_eq!(report.dip, 1.0);
        assert!(report.document_failures.is_empty());
    }

    #[test]
    fn evaluate_one_class_always_wrong() {
        // A always right, B wrong once per document
        let c = corpus_of(
            vec![doc("d1", &["A", "B"]), doc("d2", &["A", "B"])],
            &["None", "A", "B"],
        );
        let p = preds_of(&[("d1", &["A", "None"]), ("d2", &["A", "None"])]);
        let report = evaluate(&c, &p, DipScope::NonNoneOnly).unwrap();
        assert_eq!(report.per_class[0].f1, 1.0);
        assert_eq!(report.per_class[1].f1, 0.0);
        assert_eq!(report.dip, 0.0);
        assert_eq!(report.document_failures.len(), 2);
        assert_eq!(report.document_failures[0].token_index, 1);
    }

    #[test]
    fn evaluate_lists_business_classes_in_order() {
        let ls = LabelSet::default_receipt_labels();
        let names: Vec<&str> = ls.classes.iter().map(|c| c.name.as_str()).collect();
        let c = Corpus {
            documents: vec![doc("d1", &["None"])],
            label_set: labels(&names),
        };
        let p = preds_of(&[("d1", &["None"])]);
        let report = evaluate(&c, &p, DipScope::NonNoneOnly).unwrap();
        let listed: Vec<&str> = report
            .per_class
            .iter()
            .map(|r| r.counts.class_name.as_str())
            .collect();
        assert_eq!(
            listed,
            vec!["invoicenumber", "documentdate", "creditorname", "grossamount", "netamount"]
        );
    }
}
