//! Core library of the biotrig toolkit: a self-contained neural sequence
//! tagger for biomedical event trigger words.
//!
//! The crate is organized along the pipeline:
//!
//! - [`standoff`]: BioNLP-style standoff corpus parsing, sentence splitting,
//!   tokenization, label alignment, and vocabularies
//! - [`autodiff`]: dense-tensor reverse-mode differentiation tape
//! - [`model`]: embedding features, bidirectional LSTM/GRU encoder, and the
//!   fused local+global classifier head
//! - [`train`]: word2vec vector loading and the SGD training loop
//! - [`eval`]: micro-averaged P/R/F1, category rollups, confusion matrix,
//!   and the one-sided Welch t-test
//! - [`synthetic`]: deterministic synthetic corpora for tests and benches

pub mod autodiff;
pub mod error;
pub mod eval;
pub mod model;
pub mod standoff;
pub mod synthetic;
pub mod train;

pub use error::{Error, Result};
