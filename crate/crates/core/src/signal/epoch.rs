use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::types::{ContinuousRecording, Epoch, ErpAverage, SamplingMeta};
use crate::error::{Error, Result};

/// An event that could not be cut because its window leaves the recording.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedEvent {
    pub event_index: usize,
    pub sample_index: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Segmentation {
    pub epochs: Vec<Epoch>,
    pub skipped: Vec<SkippedEvent>,
}

/// Cuts `[event - pre, event + post)` around every event.
pub fn segment_epochs(rec: &ContinuousRecording, meta: &SamplingMeta) -> Result<Segmentation> {
    meta.validate()?;
    rec.validate()?;
    if (rec.rate_hz - meta.rate_hz).abs() > 1e-9 * meta.rate_hz {
        return Err(Error::Parameter(format!(
            "recording rate {} Hz differs from epoch rate {} Hz",
            rec.rate_hz, meta.rate_hz
        )));
    }
    let len = rec.len();
    let mut out = Segmentation::default();
    for (event_index, ev) in rec.events.iter().enumerate() {
        let s = ev.sample_index;
        if s < meta.pre_stimulus_samples {
            out.skipped.push(SkippedEvent {
                event_index,
                sample_index: s,
                reason: format!("fewer than {} samples before the event", meta.pre_stimulus_samples),
            });
            continue;
        }
        if s + meta.post_stimulus_samples > len {
            out.skipped.push(SkippedEvent {
                event_index,
                sample_index: s,
                reason: format!("fewer than {} samples after the event", meta.post_stimulus_samples - 1),
            });
            continue;
        }
        let start = s - meta.pre_stimulus_samples;
        let end = s + meta.post_stimulus_samples;
        out.epochs.push(Epoch {
            channels: rec.channels.clone(),
            channel_values: rec.samples.iter().map(|ch| ch[start..end].to_vec()).collect(),
            meta: *meta,
            condition_tag: ev.condition.clone(),
            behavioral_correct: ev.behavioral_correct,
        });
    }
    Ok(out)
}

/// Subtracts each channel's pre-stimulus mean from the whole channel.
pub fn baseline_correct(epoch: &Epoch) -> Result<Epoch> {
    let pre = epoch.meta.pre_stimulus_samples;
    if pre == 0 {
        return Err(Error::Parameter(
            "baseline correction needs a pre-stimulus segment".into(),
        ));
    }
    let mut out = epoch.clone();
    for row in &mut out.channel_values {
        let mean = row[..pre].iter().sum::<f64>() / pre as f64;
        for v in row.iter_mut() {
            *v -= mean;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RejectReason {
    Behavioral,
    Amplitude,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::Behavioral => "behavioral",
            RejectReason::Amplitude => "amplitude",
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct TrialRejection {
    pub kept: Vec<Epoch>,
    /// Input position and reason of every dropped epoch.
    pub rejected: Vec<(usize, RejectReason)>,
    pub counts: BTreeMap<RejectReason, usize>,
}

/// Drops behaviourally incorrect trials, then trials exceeding +-threshold.
///
/// An epoch that fails both tests is counted once, as behavioral.
pub fn reject_trials(epochs: Vec<Epoch>, amplitude_threshold_uv: f64) -> Result<TrialRejection> {
    if !(amplitude_threshold_uv > 0.0) {
        return Err(Error::Parameter(format!(
            "rejection threshold must be > 0, got {amplitude_threshold_uv}"
        )));
    }
    let mut out = TrialRejection::default();
    for (i, ep) in epochs.into_iter().enumerate() {
        let reason = if !ep.behavioral_correct {
            Some(RejectReason::Behavioral)
        } else if ep
            .channel_values
            .iter()
            .flatten()
            .any(|v| v.abs() > amplitude_threshold_uv)
        {
            Some(RejectReason::Amplitude)
        } else {
            None
        };
        match reason {
            Some(r) => {
                out.rejected.push((i, r));
                *out.counts.entry(r).or_insert(0) += 1;
            }
            None => out.kept.push(ep),
        }
    }
    Ok(out)
}

fn check_same_layout(
    meta: &SamplingMeta,
    channels: &[String],
    other_meta: &SamplingMeta,
    other_channels: &[String],
) -> Result<()> {
    if meta != other_meta {
        return Err(Error::Shape("sampling metadata differs between inputs".into()));
    }
    if channels != other_channels {
        return Err(Error::Shape("channel ordering differs between inputs".into()));
    }
    Ok(())
}

/// Element-wise mean over trials. Subject id and class are left for the caller.
pub fn average_erp(epochs: &[Epoch]) -> Result<ErpAverage> {
    let first = epochs.first().ok_or(Error::EmptyInput("no epochs to average"))?;
    for ep in &epochs[1..] {
        check_same_layout(&first.meta, &first.channels, &ep.meta, &ep.channels)?;
    }
    let rows = mean_rows(epochs.iter().map(|e| &e.channel_values), epochs.len());
    Ok(ErpAverage {
        channels: first.channels.clone(),
        channel_values: rows,
        meta: first.meta,
        n_trials: epochs.len(),
        subject_id: String::new(),
        class_label: None,
    })
}

/// Unweighted mean over subject averages. The result keeps the first input's
/// class label only when all inputs agree; `n_trials` is the number of subjects.
pub fn grand_average(erps: &[ErpAverage]) -> Result<ErpAverage> {
    let first = erps.first().ok_or(Error::EmptyInput("no averages to combine"))?;
    for e in &erps[1..] {
        check_same_layout(&first.meta, &first.channels, &e.meta, &e.channels)?;
    }
    let rows = mean_rows(erps.iter().map(|e| &e.channel_values), erps.len());
    let label = if erps.iter().all(|e| e.class_label == first.class_label) {
        first.class_label
    } else {
        None
    };
    Ok(ErpAverage {
        channels: first.channels.clone(),
        channel_values: rows,
        meta: first.meta,
        n_trials: erps.len(),
        subject_id: "grand_average".into(),
        class_label: label,
    })
}

fn mean_rows<'a>(mut items: impl Iterator<Item = &'a Vec<Vec<f64>>>, count: usize) -> Vec<Vec<f64>> {
    let mut acc = items.next().cloned().unwrap_or_default();
    for m in items {
        for (a, r) in acc.iter_mut().zip(m) {
            for (x, y) in a.iter_mut().zip(r) {
                *x += y;
            }
        }
    }
    let scale = 1.0 / count as f64;
    for row in &mut acc {
        for v in row.iter_mut() {
            *v *= scale;
        }
    }
    acc
}
