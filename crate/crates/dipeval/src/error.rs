use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate class {0:?} in label set")]
    DuplicateClass(String),
    #[error("label set must contain the background class \"None\"")]
    MissingNoneClass,
    #[error("shape mismatch for doc {doc_id}: expected {expected}, got {actual}")]
    ShapeMismatch {
        doc_id: String,
        expected: usize,
        actual: usize,
    },
    #[error("NaN score in predictions for doc {0}")]
    NanScore(String),
    #[error("no prediction for doc {0}")]
    MissingPrediction(String),
    #[error("unknown label {label:?} in predictions for doc {doc_id}")]
    UnknownLabel { doc_id: String, label: String },
    #[error("empty corpus: DIP denominator would be zero")]
    EmptyCorpus,
    #[error("duplicate field for class {0:?} in one document")]
    DuplicateField(String),
    #[error("unknown field class {0:?}")]
    UnknownFieldClass(String),
    #[error("cannot form disjoint creditor split: corpus has a single creditor")]
    SingleCreditor,
    #[error("corpus too small to split: need at least 2 documents")]
    CorpusTooSmall,
    #[error("train fraction must be strictly between 0 and 1, got {0}")]
    BadTrainFraction(f64),
    #[error("infeasible corpus spec: {0}")]
    InfeasibleSpec(String),
    #[error("noise rate out of [0, 1]: {0}")]
    BadNoiseRate(f64),
    #[error("label sets differ: {0}")]
    LabelSetMismatch(String),
}
