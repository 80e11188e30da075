//! Synthetic two-class ERP datasets with planted, configurable differences.

mod config;
mod generate;
mod noise;

pub use config::{
    default_dyslexia_scenario, hp_only_scenario, ClassParams, ComponentParams, HpBand, NoiseParams, RecordingLayout,
    Spread, SynthConfig, LEFT_EFFECT_ELECTRODES,
};
pub use generate::{
    generate_dataset, generate_subject, load_subject, read_subject_index, write_dataset, DrawnComponent, DrawnParams,
    SubjectEntry, SyntheticSubject, SUBJECTS_FILE,
};
pub use noise::{band_noise, pink_noise};
