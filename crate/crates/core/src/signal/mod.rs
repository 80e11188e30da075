//! Recording ingestion, filtering, epoching and trial averaging.

mod epoch;
mod filter;
pub mod io;
mod types;

pub use epoch::{
    average_erp, baseline_correct, grand_average, reject_trials, segment_epochs, RejectReason, Segmentation,
    SkippedEvent, TrialRejection,
};
pub use filter::{anti_alias_filter, bandpass_filter, decimate, FirFilter};
pub use types::{ClassLabel, ContinuousRecording, Epoch, ErpAverage, Event, SamplingMeta};
