//! Document/token data model shared by every other module.
//!
//! A document is an ordered list of OCR tokens, each with a pixel bounding
//! box (origin at the upper-left corner of the page image) and, once
//! annotated, a ground-truth label. The background class is an explicit
//! label named `"None"` so that score matrices carry a column for it.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Reserved name of the background class.
pub const NONE_CLASS: &str = "None";

/// Axis-aligned pixel rectangle, `(x1, y1)` upper-left, `(x2, y2)` lower-right.
/// Serialized as the 4-element array `[x1, y1, x2, y2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 4]", from = "[f64; 4]")]
pub struct BoundingBox {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl From<[f64; 4]> for BoundingBox {
    fn from([x1, y1, x2, y2]: [f64; 4]) -> Self {
        Self { x1, y1, x2, y2 }
    }
}

impl From<BoundingBox> for [f64; 4] {
    fn from(b: BoundingBox) -> Self {
        [b.x1, b.y1, b.x2, b.y2]
    }
}

impl BoundingBox {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        Self { x1, y1, x2, y2 }
    }

    /// True when coordinates are ordered and non-negative.
    pub fn is_valid(&self) -> bool {
        self.x1 >= 0.0
            && self.y1 >= 0.0
            && self.x1 <= self.x2
            && self.y1 <= self.y2
            && self.x1.is_finite()
            && self.y1.is_finite()
            && self.x2.is_finite()
            && self.y2.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelClass {
    pub name: String,
    /// Currency- and date-valued classes demand exact matching during alignment.
    #[serde(default)]
    pub exact_match_required: bool,
}

/// Ordered class vocabulary. The position of a class defines its column in
/// score matrices and its priority when scores tie.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSet {
    pub classes: Vec<LabelClass>,
}

impl LabelSet {
    /// Builds a label set from `(name, exact_match_required)` pairs,
    /// enforcing uniqueness and the presence of the background class.
    pub fn new(classes: Vec<LabelClass>) -> Result<Self, Error> {
        let mut seen = HashSet::new();
        for c in &classes {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::DuplicateClass(c.name.clone()));
            }
        }
        if !seen.contains(NONE_CLASS) {
            return Err(Error::MissingNoneClass);
        }
        Ok(Self { classes })
    }

    /// The five business labels plus the background class, background first.
    pub fn default_receipt_labels() -> Self {
        let mk = |name: &str, exact: bool| LabelClass {
            name: name.to_string(),
            exact_match_required: exact,
        };
        Self {
            classes: vec![
                mk(NONE_CLASS, false),
                mk("invoicenumber", false),
                mk("documentdate", true),
                mk("creditorname", false),
                mk("grossamount", true),
                mk("netamount", true),
            ],
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }

    pub fn get(&self, name: &str) -> Option<&LabelClass> {
        self.classes.iter().find(|c| c.name == name)
    }

    /// Class names in label-set order, background excluded.
    pub fn business_classes(&self) -> impl Iterator<Item = &str> {
        self.classes
            .iter()
            .map(|c| c.name.as_str())
            .filter(|n| *n != NONE_CLASS)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub bbox: BoundingBox,
    /// Ground-truth class name; `None` before annotation. May be absent
    /// entirely in raw OCR input.
    #[serde(default)]
    pub gt_label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub creditor_id: String,
    pub tokens: Vec<Token>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub label_set: LabelSet,
}

impl Corpus {
    pub fn document(&self, doc_id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.doc_id == doc_id)
    }
}

/// Per-document model output: resolved label names or raw class scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Prediction {
    Labels { labels: Vec<String> },
    Scores { scores: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PredictionSet {
    pub by_doc: HashMap<String, Prediction>,
}

impl PredictionSet {
    pub fn insert_labels(&mut self, doc_id: impl Into<String>, labels: Vec<String>) {
        self.by_doc.insert(doc_id.into(), Prediction::Labels { labels });
    }

    pub fn insert_scores(&mut self, doc_id: impl Into<String>, scores: Vec<Vec<f64>>) {
        self.by_doc.insert(doc_id.into(), Prediction::Scores { scores });
    }

    /// Resolves the prediction for one document to label names, applying the
    /// argmax tie-break when given scores.
    pub fn labels_for(&self, doc: &Document, label_set: &LabelSet) -> Result<Vec<String>, Error> {
        match self.by_doc.get(&doc.doc_id) {
            None => Err(Error::MissingPrediction(doc.doc_id.clone())),
            Some(Prediction::Labels { labels }) => {
                if labels.len() != doc.tokens.len() {
                    return Err(Error::ShapeMismatch {
                        doc_id: doc.doc_id.clone(),
                        expected: doc.tokens.len(),
                        actual: labels.len(),
                    });
                }
                for l in labels {
                    if !label_set.contains(l) {
                        return Err(Error::UnknownLabel {
                            doc_id: doc.doc_id.clone(),
                            label: l.clone(),
                        });
                    }
                }
                Ok(labels.clone())
            }
            Some(Prediction::Scores { scores }) => {
                resolve_labels_for(scores, label_set, &doc.doc_id, doc.tokens.len())
            }
        }
    }
}

/// Argmax per score row; among tied maxima the class with the smallest
/// label-set index wins, so resolution is deterministic.
pub fn resolve_labels(scores: &[Vec<f64>], label_set: &LabelSet) -> Result<Vec<String>, Error> {
    resolve_labels_for(scores, label_set, "<unattached>", scores.len())
}

fn resolve_labels_for(
    scores: &[Vec<f64>],
    label_set: &LabelSet,
    doc_id: &str,
    expected_rows: usize,
) -> Result<Vec<String>, Error> {
    if scores.len() != expected_rows {
        return Err(Error::ShapeMismatch {
            doc_id: doc_id.to_string(),
            expected: expected_rows,
            actual: scores.len(),
        });
    }
    let c = label_set.len();
    let mut out = Vec::with_capacity(scores.len());
    for row in scores {
        if row.len() != c {
            return Err(Error::ShapeMismatch {
                doc_id: doc_id.to_string(),
                expected: c,
                actual: row.len(),
            });
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, &s) in row.iter().enumerate() {
            if s.is_nan() {
                return Err(Error::NanScore(doc_id.to_string()));
            }
            match best {
                // strictly greater keeps the earliest index on ties
                Some((_, b)) if s <= b => {}
                _ => best = Some((i, s)),
            }
        }
        let (idx, _) = best.expect("label set is non-empty");
        out.push(label_set.classes[idx].name.clone());
    }
    Ok(out)
}

/// One invariant violation found in a corpus. Violations are data, not
/// failures; validation never errors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub doc_id: String,
    /// Token index within the document, when the violation is token-level.
    pub token_index: Option<usize>,
    pub message: String,
}

/// Checks bbox ordering, non-empty token text, doc_id uniqueness, and
/// gt_label membership. Returns every violation found.
pub fn validate_corpus(corpus: &Corpus) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut seen_ids: HashSet<&str> = HashSet::new();
    for doc in &corpus.documents {
        if !seen_ids.insert(&doc.doc_id) {
            violations.push(Violation {
                doc_id: doc.doc_id.clone(),
                token_index: None,
                message: "duplicate doc_id".to_string(),
            });
        }
        if doc.tokens.is_empty() {
            violations.push(Violation {
                doc_id: doc.doc_id.clone(),
                token_index: None,
                message: "document has no tokens".to_string(),
            });
        }
        for (i, tok) in doc.tokens.iter().enumerate() {
            if tok.text.trim().is_empty() {
                violations.push(Violation {
                    doc_id: doc.doc_id.clone(),
                    token_index: Some(i),
                    message: "empty token text".to_string(),
                });
            }
            if !tok.bbox.is_valid() {
                let b = &tok.bbox;
                let detail = if b.x1 > b.x2 {
                    "x1 > x2"
                } else if b.y1 > b.y2 {
                    "y1 > y2"
                } else {
                    "negative or non-finite coordinate"
                };
                violations.push(Violation {
                    doc_id: doc.doc_id.clone(),
                    token_index: Some(i),
                    message: format!("invalid bbox: {detail}"),
                });
            }
            if let Some(gt) = &tok.gt_label {
                if !corpus.label_set.contains(gt) {
                    violations.push(Violation {
                        doc_id: doc.doc_id.clone(),
                        token_index: Some(i),
                        message: format!("unknown gt_label {gt:?}"),
                    });
                }
            }
        }
    }
    violations
}
