use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roi::ElectrodeLayout;
use crate::signal::{ClassLabel, SamplingMeta};

/// Normal distribution over subjects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spread {
    pub mean: f64,
    #[serde(default)]
    pub sd: f64,
}

impl Spread {
    pub fn fixed(mean: f64) -> Self {
        Spread { mean, sd: 0.0 }
    }

    pub fn new(mean: f64, sd: f64) -> Self {
        Spread { mean, sd }
    }
}

/// Gaussian-bump ERP component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentParams {
    pub latency_ms: Spread,
    pub amplitude_uv: Spread,
    /// Standard deviation of the bump in ms.
    pub width_ms: f64,
}

/// Band-limited noise added to the continuous signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HpBand {
    pub lo_hz: f64,
    pub hi_hz: f64,
    pub rms_uv: Spread,
}

/// Generating distribution of one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassParams {
    pub p150: ComponentParams,
    pub p300: ComponentParams,
    #[serde(default)]
    pub hp_noise: Vec<HpBand>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseParams {
    /// RMS of the pink background per channel.
    pub pink_rms_uv: f64,
    /// Per-trial latency jitter sd, applied to both components.
    pub trial_jitter_ms: f64,
}

/// Layout of the continuous recording around the trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordingLayout {
    /// Samples before the first epoch and after the last one.
    pub margin_samples: usize,
    /// Onset-to-onset spacing; must be at least the epoch length.
    pub trial_spacing_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub n_subjects_per_class: usize,
    pub trials_per_subject: usize,
    pub meta: SamplingMeta,
    /// Channel labels; every entry must exist in the 64-channel layout.
    pub channels: Vec<String>,
    pub regular: ClassParams,
    pub dyslexic: ClassParams,
    /// Electrodes that carry the class difference. Elsewhere every subject is
    /// drawn from the regular distribution.
    pub effect_electrodes: Vec<String>,
    pub noise: NoiseParams,
    /// Probability that a trial carries an incorrect behavioural response.
    pub incorrect_fraction: f64,
    pub recording: RecordingLayout,
    pub seed: u64,
}

/// Left anterior and left posterior electrodes of the standard montage.
pub const LEFT_EFFECT_ELECTRODES: [&str; 15] = [
    "Fp1", "AF7", "AF3", "F1", "F3", "F5", "F7", "P1", "P3", "P5", "P7", "P9", "PO7", "PO3", "O1",
];

fn default_hp() -> Vec<HpBand> {
    vec![
        HpBand {
            lo_hz: 20.0,
            hi_hz: 60.0,
            rms_uv: Spread::new(1.0, 0.1),
        },
        HpBand {
            lo_hz: 60.0,
            hi_hz: 100.0,
            rms_uv: Spread::new(0.5, 0.05),
        },
    ]
}

fn regular_params() -> ClassParams {
    ClassParams {
        p150: ComponentParams {
            latency_ms: Spread::new(150.0, 10.0),
            amplitude_uv: Spread::new(4.0, 0.8),
            width_ms: 20.0,
        },
        p300: ComponentParams {
            latency_ms: Spread::new(300.0, 20.0),
            amplitude_uv: Spread::new(10.0, 1.5),
            width_ms: 45.0,
        },
        hp_noise: default_hp(),
    }
}

/// The benchmark two-class scenario.
pub fn default_dyslexia_scenario() -> SynthConfig {
    let mut dyslexic = regular_params();
    dyslexic.p300.latency_ms.mean = 380.0;
    dyslexic.p300.amplitude_uv.mean = 6.0;
    dyslexic.hp_noise[0].rms_uv = Spread::new(2.5, 0.25);
    SynthConfig {
        n_subjects_per_class: 16,
        trials_per_subject: 40,
        meta: SamplingMeta::canonical(),
        channels: ElectrodeLayout::biosemi64().labels(),
        regular: regular_params(),
        dyslexic,
        effect_electrodes: LEFT_EFFECT_ELECTRODES.iter().map(|s| s.to_string()).collect(),
        noise: NoiseParams {
            pink_rms_uv: 8.0,
            trial_jitter_ms: 15.0,
        },
        incorrect_fraction: 0.05,
        recording: RecordingLayout {
            margin_samples: 1024,
            trial_spacing_samples: 480,
        },
        seed: 20240611,
    }
}

/// Same scenario with the ERP components equal across classes, leaving the
/// 20–60 Hz band power as the only difference.
pub fn hp_only_scenario() -> SynthConfig {
    let mut cfg = default_dyslexia_scenario();
    let mut d = cfg.regular.clone();
    d.hp_noise[0].rms_uv = Spread::new(2.5, 0.25);
    cfg.dyslexic = d;
    cfg
}

impl Default for SynthConfig {
    fn default() -> Self {
        default_dyslexia_scenario()
    }
}

fn check_component(name: &str, c: &ComponentParams, meta: &SamplingMeta) -> Result<()> {
    let span = meta.post_span_ms();
    if !(c.latency_ms.mean >= 0.0 && c.latency_ms.mean <= span) {
        return Err(Error::Parameter(format!(
            "{name} latency {} ms outside the post-stimulus span [0, {span}] ms",
            c.latency_ms.mean
        )));
    }
    if c.latency_ms.sd < 0.0 || c.amplitude_uv.sd < 0.0 || !(c.width_ms > 0.0) {
        return Err(Error::Parameter(format!("{name}: sds must be >= 0 and width > 0")));
    }
    Ok(())
}

impl SynthConfig {
    pub fn class(&self, label: ClassLabel) -> &ClassParams {
        match label {
            ClassLabel::Regular => &self.regular,
            ClassLabel::Dyslexic => &self.dyslexic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.meta.validate()?;
        if self.n_subjects_per_class == 0 || self.trials_per_subject == 0 {
            return Err(Error::Parameter("subject and trial counts must be >= 1".into()));
        }
        if self.channels.is_empty() {
            return Err(Error::Parameter("no channels".into()));
        }
        let layout = ElectrodeLayout::biosemi64();
        let mut seen = std::collections::HashSet::new();
        for c in &self.channels {
            if layout.get(c).is_none() || !seen.insert(c) {
                return Err(Error::Parameter(format!("channel {c} is unknown or repeated")));
            }
        }
        if let Some(e) = self.effect_electrodes.iter().find(|e| !seen.contains(e)) {
            return Err(Error::Parameter(format!(
                "effect electrode {e} is not among the channels"
            )));
        }
        for (label, p) in [("regular", &self.regular), ("dyslexic", &self.dyslexic)] {
            check_component(&format!("{label} P150"), &p.p150, &self.meta)?;
            check_component(&format!("{label} P300"), &p.p300, &self.meta)?;
            for b in &p.hp_noise {
                if !(b.lo_hz >= 0.0 && b.hi_hz > b.lo_hz && b.hi_hz <= self.meta.rate_hz / 2.0) || b.rms_uv.sd < 0.0 {
                    return Err(Error::Parameter(format!(
                        "{label}: bad HP band [{}, {}) Hz",
                        b.lo_hz, b.hi_hz
                    )));
                }
            }
        }
        if self.noise.pink_rms_uv < 0.0 || self.noise.trial_jitter_ms < 0.0 {
            return Err(Error::Parameter("noise levels must be >= 0".into()));
        }
        if !(0.0..1.0).contains(&self.incorrect_fraction) {
            return Err(Error::Parameter("incorrect_fraction must be in [0, 1)".into()));
        }
        if self.recording.trial_spacing_samples < self.meta.epoch_len() {
            return Err(Error::Parameter("trial spacing is shorter than an epoch".into()));
        }
        Ok(())
    }

    /// Total samples of each continuous recording.
    pub fn recording_len(&self) -> usize {
        2 * self.recording.margin_samples + self.trials_per_subject * self.recording.trial_spacing_samples
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("synth config serialises")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SynthConfig = toml::from_str(text).map_err(|e| Error::Config(format!("synth config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}
