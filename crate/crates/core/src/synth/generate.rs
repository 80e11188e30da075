use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::config::{ClassParams, ComponentParams, SynthConfig};
use super::noise::{band_noise, pink_noise};
use crate::error::{Error, Result};
use crate::signal::io::{load_recording, save_recording, write_file};
use crate::signal::{ClassLabel, ContinuousRecording, Event};

/// Component parameters drawn for one subject.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawnComponent {
    pub latency_ms: f64,
    pub amplitude_uv: f64,
    pub width_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrawnParams {
    pub p150: DrawnComponent,
    pub p300: DrawnComponent,
    /// `(lo_hz, hi_hz, rms_uv)` per HP band.
    pub hp_noise: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSubject {
    pub subject_id: String,
    pub label: ClassLabel,
    pub recording: ContinuousRecording,
    /// Parameters used on electrodes outside the effect mask.
    pub shared: DrawnParams,
    /// Parameters used on the effect electrodes.
    pub masked: DrawnParams,
}

fn normal(rng: &mut impl Rng, mean: f64, sd: f64) -> f64 {
    if sd == 0.0 {
        // Keep the stream position independent of the sd.
        let _: f64 = rng.random();
        return mean;
    }
    Normal::new(mean, sd).expect("sd validated").sample(rng)
}

fn draw_component(c: &ComponentParams, rng: &mut impl Rng) -> DrawnComponent {
    DrawnComponent {
        latency_ms: normal(rng, c.latency_ms.mean, c.latency_ms.sd),
        amplitude_uv: normal(rng, c.amplitude_uv.mean, c.amplitude_uv.sd),
        width_ms: c.width_ms,
    }
}

fn draw(p: &ClassParams, rng: &mut impl Rng) -> DrawnParams {
    DrawnParams {
        p150: draw_component(&p.p150, rng),
        p300: draw_component(&p.p300, rng),
        hp_noise: p
            .hp_noise
            .iter()
            .map(|b| (b.lo_hz, b.hi_hz, normal(rng, b.rms_uv.mean, b.rms_uv.sd).max(0.0)))
            .collect(),
    }
}

fn bump(t_ms: f64, c: &DrawnComponent, shift_ms: f64) -> f64 {
    let d = t_ms - c.latency_ms - shift_ms;
    c.amplitude_uv * (-(d * d) / (2.0 * c.width_ms * c.width_ms)).exp()
}

fn subject_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

/// Subject `index` of the dataset; even indices are regular, odd dyslexic.
pub fn generate_subject(cfg: &SynthConfig, index: usize) -> SyntheticSubject {
    let label = if index.is_multiple_of(2) {
        ClassLabel::Regular
    } else {
        ClassLabel::Dyslexic
    };
    let mut root = subject_rng(cfg.seed, index);
    let mut shared_rng = ChaCha8Rng::from_rng(&mut root);
    let mut masked_rng = ChaCha8Rng::from_rng(&mut root);
    let mut trial_rng = ChaCha8Rng::from_rng(&mut root);
    let channel_seeds: Vec<u64> = (0..cfg.channels.len()).map(|_| root.random()).collect();

    let shared = draw(&cfg.regular, &mut shared_rng);
    let masked = draw(cfg.class(label), &mut masked_rng);

    let meta = &cfg.meta;
    let pre = meta.pre_stimulus_samples;
    let n = cfg.recording_len();
    let mut events = Vec::with_capacity(cfg.trials_per_subject);
    let mut jitter = Vec::with_capacity(cfg.trials_per_subject);
    for t in 0..cfg.trials_per_subject {
        let onset = cfg.recording.margin_samples + pre + t * cfg.recording.trial_spacing_samples;
        let correct = trial_rng.random::<f64>() >= cfg.incorrect_fraction;
        jitter.push(normal(&mut trial_rng, 0.0, cfg.noise.trial_jitter_ms));
        events.push(Event {
            sample_index: onset,
            condition: "word".into(),
            behavioral_correct: correct,
        });
    }

    let samples: Vec<Vec<f64>> = cfg
        .channels
        .par_iter()
        .zip(&channel_seeds)
        .map(|(ch, &s)| {
            let params = if cfg.effect_electrodes.contains(ch) {
                &masked
            } else {
                &shared
            };
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut x = pink_noise(n, meta.rate_hz, cfg.noise.pink_rms_uv, &mut rng);
            for &(lo, hi, rms) in &params.hp_noise {
                for (v, b) in x.iter_mut().zip(band_noise(n, meta.rate_hz, lo, hi, rms, &mut rng)) {
                    *v += b;
                }
            }
            for (ev, &shift) in events.iter().zip(&jitter) {
                let start = ev.sample_index - pre;
                for i in 0..meta.epoch_len() {
                    let t_ms = meta.time_ms(i);
                    x[start + i] += bump(t_ms, &params.p150, shift) + bump(t_ms, &params.p300, shift);
                }
            }
            x
        })
        .collect();

    SyntheticSubject {
        subject_id: format!("sub-{:02}", index + 1),
        label,
        recording: ContinuousRecording {
            channels: cfg.channels.clone(),
            samples,
            rate_hz: meta.rate_hz,
            events,
        },
        shared,
        masked,
    }
}

/// Every subject of the configured dataset, in index order.
pub fn generate_dataset(cfg: &SynthConfig) -> Result<Vec<SyntheticSubject>> {
    cfg.validate()?;
    Ok((0..2 * cfg.n_subjects_per_class)
        .into_par_iter()
        .map(|i| generate_subject(cfg, i))
        .collect())
}

/// One row of `subjects.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectEntry {
    pub subject_id: String,
    pub class_label: Option<ClassLabel>,
    pub recording: PathBuf,
    pub events: PathBuf,
}

pub const SUBJECTS_FILE: &str = "subjects.csv";

/// Writes `<id>.csv`, `<id>.events.csv` and `subjects.csv` into `dir`.
pub fn write_dataset(subjects: &[SyntheticSubject], dir: &Path, decimals: Option<usize>) -> Result<Vec<PathBuf>> {
    let mut index = String::from("subject_id,class_label,recording,events\n");
    let mut written = Vec::new();
    for s in subjects {
        let rec = format!("{}.csv", s.subject_id);
        let ev = format!("{}.events.csv", s.subject_id);
        save_recording(&s.recording, &dir.join(&rec), &dir.join(&ev), decimals)?;
        writeln!(index, "{},{},{rec},{ev}", s.subject_id, s.label).unwrap();
        written.push(dir.join(rec));
        written.push(dir.join(ev));
    }
    let idx = dir.join(SUBJECTS_FILE);
    write_file(&idx, index.as_bytes())?;
    written.push(idx);
    Ok(written)
}

/// Reads `subjects.csv`; paths are resolved against `dir`.
pub fn read_subject_index(dir: &Path) -> Result<Vec<SubjectEntry>> {
    let path = dir.join(SUBJECTS_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let c: Vec<&str> = line.split(',').map(str::trim).collect();
        if c.len() != 4 {
            return Err(Error::parse(
                &path,
                i + 1,
                "expected subject_id,class_label,recording,events",
            ));
        }
        out.push(SubjectEntry {
            subject_id: c[0].to_string(),
            class_label: ClassLabel::parse_optional(c[1]).map_err(|e| Error::parse(&path, i + 1, e.to_string()))?,
            recording: dir.join(c[2]),
            events: dir.join(c[3]),
        });
    }
    Ok(out)
}

pub fn load_subject(entry: &SubjectEntry) -> Result<ContinuousRecording> {
    load_recording(&entry.recording, &entry.events)
}
