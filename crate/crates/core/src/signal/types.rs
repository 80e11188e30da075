use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Sampling rate and epoch geometry around a stimulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingMeta {
    pub rate_hz: f64,
    pub pre_stimulus_samples: usize,
    pub post_stimulus_samples: usize,
}

impl SamplingMeta {
    pub fn new(rate_hz: f64, pre_stimulus_samples: usize, post_stimulus_samples: usize) -> Result<Self> {
        let meta = SamplingMeta {
            rate_hz,
            pre_stimulus_samples,
            post_stimulus_samples,
        };
        meta.validate()?;
        Ok(meta)
    }

    /// 256 Hz, 64 pre-stimulus and 384 post-stimulus samples (1.75 s).
    pub fn canonical() -> Self {
        SamplingMeta {
            rate_hz: 256.0,
            pre_stimulus_samples: 64,
            post_stimulus_samples: 384,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rate_hz.is_finite() && self.rate_hz > 0.0) {
            return Err(Error::Parameter(format!("rate_hz must be > 0, got {}", self.rate_hz)));
        }
        if self.post_stimulus_samples == 0 {
            return Err(Error::Parameter("post_stimulus_samples must be >= 1".into()));
        }
        Ok(())
    }

    pub fn epoch_len(&self) -> usize {
        self.pre_stimulus_samples + self.post_stimulus_samples
    }

    pub fn sample_period_ms(&self) -> f64 {
        1000.0 / self.rate_hz
    }

    /// Time in milliseconds of sample `index`, with t = 0 at stimulus onset.
    pub fn time_ms(&self, index: usize) -> f64 {
        (index as f64 - self.pre_stimulus_samples as f64) * self.sample_period_ms()
    }

    /// Last post-stimulus time in ms.
    pub fn post_span_ms(&self) -> f64 {
        (self.post_stimulus_samples - 1) as f64 * self.sample_period_ms()
    }
}

/// One stimulus marker in a continuous recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub sample_index: usize,
    pub condition: String,
    pub behavioral_correct: bool,
}

/// Raw multichannel record with stimulus markers.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousRecording {
    pub channels: Vec<String>,
    /// One sequence per channel, microvolts.
    pub samples: Vec<Vec<f64>>,
    pub rate_hz: f64,
    pub events: Vec<Event>,
}

impl ContinuousRecording {
    pub fn new(channels: Vec<String>, samples: Vec<Vec<f64>>, rate_hz: f64, events: Vec<Event>) -> Result<Self> {
        let rec = ContinuousRecording {
            channels,
            samples,
            rate_hz,
            events,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rate_hz.is_finite() && self.rate_hz > 0.0) {
            return Err(Error::Parameter(format!("rate_hz must be > 0, got {}", self.rate_hz)));
        }
        if self.channels.len() != self.samples.len() {
            return Err(Error::Shape(format!(
                "{} channel labels but {} sample sequences",
                self.channels.len(),
                self.samples.len()
            )));
        }
        let len = self.len();
        if self.samples.iter().any(|s| s.len() != len) {
            return Err(Error::Shape("channel sequences differ in length".into()));
        }
        for pair in self.events.windows(2) {
            if pair[1].sample_index <= pair[0].sample_index {
                return Err(Error::Parameter(format!(
                    "event indices must be strictly increasing ({} then {})",
                    pair[0].sample_index, pair[1].sample_index
                )));
            }
        }
        if let Some(last) = self.events.last() {
            if last.sample_index >= len {
                return Err(Error::Parameter(format!(
                    "event at sample {} lies outside a recording of {} samples",
                    last.sample_index, len
                )));
            }
        }
        Ok(())
    }

    /// Samples per channel.
    pub fn len(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One trial window, channels x samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Epoch {
    pub channels: Vec<String>,
    pub channel_values: Vec<Vec<f64>>,
    pub meta: SamplingMeta,
    pub condition_tag: String,
    pub behavioral_correct: bool,
}

impl Epoch {
    pub fn new(
        channels: Vec<String>,
        channel_values: Vec<Vec<f64>>,
        meta: SamplingMeta,
        condition_tag: impl Into<String>,
        behavioral_correct: bool,
    ) -> Result<Self> {
        if channels.len() != channel_values.len() {
            return Err(Error::Shape(format!(
                "{} channel labels but {} rows",
                channels.len(),
                channel_values.len()
            )));
        }
        if channel_values.iter().any(|row| row.len() != meta.epoch_len()) {
            return Err(Error::Shape(format!(
                "epoch rows must have {} samples",
                meta.epoch_len()
            )));
        }
        Ok(Epoch {
            channels,
            channel_values,
            meta,
            condition_tag: condition_tag.into(),
            behavioral_correct,
        })
    }
}

/// Subject group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassLabel {
    Regular,
    Dyslexic,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 2] = [ClassLabel::Regular, ClassLabel::Dyslexic];

    /// 0 for regular readers, 1 for dyslexic readers.
    pub fn index(self) -> usize {
        match self {
            ClassLabel::Regular => 0,
            ClassLabel::Dyslexic => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(ClassLabel::Regular),
            1 => Some(ClassLabel::Dyslexic),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ClassLabel::Regular => "regular",
            ClassLabel::Dyslexic => "dyslexic",
        }
    }

    /// Parses `regular`, `dyslexic` or `unknown` (the latter as `None`).
    pub fn parse_optional(s: &str) -> Result<Option<Self>> {
        match s.trim() {
            "unknown" | "" => Ok(None),
            other => other.parse().map(Some),
        }
    }

    pub fn optional_str(label: Option<Self>) -> &'static str {
        label.map_or("unknown", ClassLabel::as_str)
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "regular" => Ok(ClassLabel::Regular),
            "dyslexic" => Ok(ClassLabel::Dyslexic),
            other => Err(Error::Parameter(format!("unknown class label '{other}'"))),
        }
    }
}

/// Trial-averaged waveform per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ErpAverage {
    pub channels: Vec<String>,
    pub channel_values: Vec<Vec<f64>>,
    pub meta: SamplingMeta,
    pub n_trials: usize,
    pub subject_id: String,
    pub class_label: Option<ClassLabel>,
}

impl ErpAverage {
    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    /// Row for a channel label.
    pub fn channel(&self, label: &str) -> Option<&[f64]> {
        self.channels
            .iter()
            .position(|c| c == label)
            .map(|i| self.channel_values[i].as_slice())
    }
}
