//! Per-electrode temporal, statistical and spectral features and the
//! data-driven registry that decides which are computed.

mod registry;
mod spectrum;
mod statistical;
mod temporal;
mod vector;

pub use registry::{FeatureDescriptor, FeatureKind, FeatureRegistry, SignalPart};
pub use spectrum::{
    band_power, periodogram, spectral_centroid, spectral_deformation_width, spectral_entropy, spectral_flatness,
    spectral_moment, spectral_rolloff, Spectrum,
};
pub use statistical::{derivative_interval_stats, extremum_indices, zero_crossing_rate, IntervalStats};
pub use temporal::{
    abs_amplitude, histogram_entropy, latency, max_peak_ratio, positive_area, signal_energy, TimeWindow,
};
pub use vector::{
    extract_feature_vector, extract_subject, layout, FeatureColumn, FeatureMatrix, FeatureVector, MISSING,
};
