//! File formats: JSONL corpora and predictions, JSON label sets, field
//! records, and match policies. Every parser reports the 1-based line it
//! failed on, and all of them tolerate arbitrary bytes (they are fuzzed).

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{FieldValue, MatchPolicy};
use crate::model::{Corpus, Document, LabelSet, Prediction, PredictionSet, NONE_CLASS};
use crate::sim::{CorpusSpec, NoiseSpec};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: String,
        line: usize,
        message: String,
    },
}

impl ParseError {
    fn at(path: &str, line: usize, message: impl ToString) -> Self {
        ParseError::Malformed {
            path: path.to_string(),
            line,
            message: message.to_string(),
        }
    }
}

/// Parses one corpus JSONL line into a document.
pub fn parse_document_line(line: &str) -> Result<Document, serde_json::Error> {
    serde_json::from_str(line)
}

/// Parses the label-set JSON. The background class must be listed first so
/// that score-matrix columns and tie-breaking agree across tools.
pub fn parse_label_set(text: &str) -> Result<LabelSet, String> {
    #[derive(Deserialize)]
    struct Raw {
        classes: Vec<crate::model::LabelClass>,
    }
    let raw: Raw = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if raw.classes.first().map(|c| c.name.as_str()) != Some(NONE_CLASS) {
        return Err(format!("first class must be {NONE_CLASS:?}"));
    }
    LabelSet::new(raw.classes).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictionLine {
    pub doc_id: String,
    #[serde(flatten)]
    pub prediction: Prediction,
}

/// Parses one prediction JSONL line (`labels` or `scores` form).
pub fn parse_prediction_line(line: &str) -> Result<PredictionLine, serde_json::Error> {
    serde_json::from_str(line)
}

/// One document's field-level labels, as exported from the source system.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldsRecord {
    pub doc_id: String,
    pub fields: Vec<FieldValue>,
}

pub fn parse_fields_line(line: &str) -> Result<FieldsRecord, serde_json::Error> {
    serde_json::from_str(line)
}

/// Parses a match-policy JSON; missing keys fall back to defaults.
pub fn parse_policy(text: &str) -> Result<MatchPolicy, serde_json::Error> {
    #[derive(Deserialize)]
    #[serde(default)]
    struct Raw {
        max_lev_ratio: f64,
        exact_only_classes: std::collections::HashSet<String>,
        window_max_tokens: usize,
    }
    impl Default for Raw {
        fn default() -> Self {
            let d = MatchPolicy::default();
            Self {
                max_lev_ratio: d.max_lev_ratio,
                exact_only_classes: d.exact_only_classes,
                window_max_tokens: d.window_max_tokens,
            }
        }
    }
    let raw: Raw = serde_json::from_str(text)?;
    Ok(MatchPolicy {
        max_lev_ratio: raw.max_lev_ratio,
        exact_only_classes: raw.exact_only_classes,
        window_max_tokens: raw.window_max_tokens,
    })
}

pub fn parse_corpus_spec(text: &str) -> Result<CorpusSpec, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn parse_noise_spec(text: &str) -> Result<NoiseSpec, serde_json::Error> {
    serde_json::from_str(text)
}

fn read_to_string(path: &Path) -> Result<String, ParseError> {
    fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn jsonl_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
}

/// Loads a JSONL corpus file and attaches the given label set.
pub fn load_corpus(path: &Path, label_set: LabelSet) -> Result<Corpus, ParseError> {
    let text = read_to_string(path)?;
    let p = path.display().to_string();
    let mut documents = Vec::new();
    for (line_no, line) in jsonl_lines(&text) {
        let doc = parse_document_line(line).map_err(|e| ParseError::at(&p, line_no, e))?;
        documents.push(doc);
    }
    Ok(Corpus {
        documents,
        label_set,
    })
}

pub fn load_label_set(path: &Path) -> Result<LabelSet, ParseError> {
    let text = read_to_string(path)?;
    parse_label_set(&text).map_err(|e| ParseError::at(&path.display().to_string(), 1, e))
}

pub fn load_predictions(path: &Path) -> Result<PredictionSet, ParseError> {
    let text = read_to_string(path)?;
    let p = path.display().to_string();
    let mut preds = PredictionSet::default();
    for (line_no, line) in jsonl_lines(&text) {
        let rec = parse_prediction_line(line).map_err(|e| ParseError::at(&p, line_no, e))?;
        preds.by_doc.insert(rec.doc_id, rec.prediction);
    }
    Ok(preds)
}

pub fn load_fields(path: &Path) -> Result<Vec<FieldsRecord>, ParseError> {
    let text = read_to_string(path)?;
    let p = path.display().to_string();
    let mut records = Vec::new();
    for (line_no, line) in jsonl_lines(&text) {
        records.push(parse_fields_line(line).map_err(|e| ParseError::at(&p, line_no, e))?);
    }
    Ok(records)
}

pub fn load_policy(path: &Path) -> Result<MatchPolicy, ParseError> {
    let text = read_to_string(path)?;
    parse_policy(&text).map_err(|e| ParseError::at(&path.display().to_string(), 1, e))
}

/// Serializes the corpus documents as JSONL (label set travels separately).
pub fn corpus_to_jsonl(corpus: &Corpus) -> String {
    let mut out = String::new();
    for doc in &corpus.documents {
        out.push_str(&serde_json::to_string(doc).expect("document serializes"));
        out.push('\n');
    }
    out
}

pub fn predictions_to_jsonl(corpus: &Corpus, preds: &PredictionSet) -> String {
    let mut out = String::new();
    for doc in &corpus.documents {
        if let Some(prediction) = preds.by_doc.get(&doc.doc_id) {
            let line = PredictionLine {
                doc_id: doc.doc_id.clone(),
                prediction: prediction.clone(),
            };
            out.push_str(&serde_json::to_string(&line).expect("prediction serializes"));
            out.push('\n');
        }
    }
    out
}

/// Writes via a temporary file in the destination directory and renames,
/// so readers never observe a torn file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
