//! ReliefF feature weighting and top-k selection.

mod dataset;
mod weights;

pub use dataset::{LabeledDataset, RawDataset};
pub use weights::{format_weights, parse_weights, relieff_weights, select_top_k, WeightVector};
