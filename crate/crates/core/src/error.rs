use thiserror::Error;

/// Unified error type for the toolkit.
///
/// Variant names double as stable, machine-parsable error classes
/// (see [`Error::class`]); the CLI prints them on its failure line.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{doc_id}/{ann_id}: annotation surface {expected:?} does not match text[{start}..{end}) = {found:?}")]
    OffsetMismatch {
        doc_id: String,
        ann_id: String,
        start: usize,
        end: usize,
        expected: String,
        found: String,
    },

    #[error("{context}: malformed annotation line {line}: {reason}")]
    MalformedLine {
        context: String,
        line: usize,
        reason: String,
    },

    #[error("vocabulary build requires at least one token sequence")]
    EmptyCorpus,

    #[error("shape mismatch in {op}: {detail}")]
    ShapeMismatch { op: &'static str, detail: String },

    #[error("invalid dropout rate {0}: must satisfy 0 <= rate < 1")]
    InvalidRate(f64),

    #[error("backward requires a scalar loss, got shape {0:?}")]
    NotScalarLoss(Vec<usize>),

    #[error("loss tensor was not recorded on this tape")]
    LossNotOnTape,

    #[error("index {index} out of range for {what} of size {size}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },

    #[error("empty sequence passed to {0}")]
    EmptySequence(&'static str),

    #[error("dimension mismatch: {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        actual: usize,
    },

    #[error("{context}: malformed word-vector entry {entry}: {reason}")]
    MalformedEntry {
        context: String,
        entry: usize,
        reason: String,
    },

    #[error("non-finite gradient in parameter {0}")]
    NonFiniteGradient(String),

    #[error("training set is empty")]
    EmptyTrainSet,

    #[error("gold and predicted sequences differ in length: {gold} vs {pred}")]
    LengthMismatch { gold: usize, pred: usize },

    #[error("label {0:?} has no category mapping")]
    UnmappedLabel(String),

    #[error("label {0:?} is not in the vocabulary")]
    UnknownLabel(String),

    #[error("vocabulary mismatch: {0}")]
    VocabularyMismatch(String),

    #[error("bad checkpoint: {0}")]
    BadCheckpoint(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable class name for machine-parsable CLI error lines.
    pub fn class(&self) -> &'static str {
        match self {
            Error::OffsetMismatch { .. } => "OffsetMismatch",
            Error::MalformedLine { .. } => "MalformedLine",
            Error::EmptyCorpus => "EmptyCorpus",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::InvalidRate(_) => "InvalidRate",
            Error::NotScalarLoss(_) => "NotScalarLoss",
            Error::LossNotOnTape => "LossNotOnTape",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::EmptySequence(_) => "EmptySequence",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::MalformedEntry { .. } => "MalformedEntry",
            Error::NonFiniteGradient(_) => "NonFiniteGradient",
            Error::EmptyTrainSet => "EmptyTrainSet",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::UnmappedLabel(_) => "UnmappedLabel",
            Error::UnknownLabel(_) => "UnknownLabel",
            Error::VocabularyMismatch(_) => "VocabularyMismatch",
            Error::BadCheckpoint(_) => "BadCheckpoint",
            Error::Io { .. } => "Io",
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
