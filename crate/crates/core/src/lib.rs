//! Event-related potential analysis: preprocessing, wavelet LP/HP split,
//! per-electrode feature extraction, ReliefF feature weighting, maximum-margin
//! classification with cross-validation, and scalp region-of-interest mapping.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod classifier;
pub mod cli;
pub mod error;
pub mod features;
pub mod fft;
pub mod pipeline;
pub mod relieff;
pub mod roi;
pub mod signal;
pub mod synth;
pub mod wavelet;

pub use error::{Error, Result};
