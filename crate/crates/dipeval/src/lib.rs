//! Evaluation toolkit for token classification over visual documents.
//!
//! Alongside conventional per-class precision/recall/F1 this crate computes
//! Document Integrity Precision (DIP): the fraction of documents whose
//! tokens are all classified correctly, i.e. the fraction needing no manual
//! correction. High per-class F1 can coexist with a low DIP because token
//! errors spread thinly across classes still spoil whole documents.
//!
//! The crate also ships the supporting machinery such experiments need:
//! ground-truth alignment of field-level labels onto OCR tokens, creditor
//! aware train/test splitting, and a seeded simulator that reproduces the
//! F1-vs-DIP divergence on synthetic corpora.

pub mod align;
pub mod error;
pub mod io;
pub mod metrics;
pub mod model;
pub mod report;
pub mod sim;
pub mod split;

pub use error::Error;
pub use metrics::{dip, evaluate, DipScope, EvaluationReport};
pub use model::{Corpus, Document, LabelSet, PredictionSet, Token};
