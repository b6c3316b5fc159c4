//! Minimal dense-tensor reverse-mode automatic differentiation.
//!
//! The substrate for the tagger: [`Tensor`] is dense row-major f64 storage
//! with a gradient accumulator, [`Tape`] records forward ops define-by-run
//! style and replays them in reverse, and [`grad_check`] is the
//! finite-difference oracle everything above is verified against.
//!
//! ```
//! use biotrig_core::autodiff::{Tape, Tensor};
//!
//! let x = Tensor::parameter(&[2], vec![1.0, 2.0]);
//! let mut tape = Tape::new();
//! let sq = tape.elementwise_mul(&x, &x).unwrap();
//! let loss = tape.sum(&sq).unwrap();
//! tape.backward(&loss).unwrap();
//! assert_eq!(x.grad(), vec![2.0, 4.0]);
//! ```

mod gradcheck;
mod tape;
mod tensor;

pub use gradcheck::{grad_check, grad_check_report, GradCheckReport};
pub use tape::{sigmoid, softmax, Tape};
pub use tensor::Tensor;
