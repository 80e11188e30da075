//! Per-subject processing chains shared by the CLI stages and library users.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{extract_subject, FeatureRegistry, FeatureVector};
use crate::signal::{
    anti_alias_filter, average_erp, baseline_correct, reject_trials, segment_epochs, ClassLabel, ContinuousRecording,
    Epoch, ErpAverage, FirFilter, RejectReason, SamplingMeta,
};
use crate::wavelet::BoundaryMode;

/// Continuous-to-average settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessParams {
    pub band_lo_hz: f64,
    pub band_hi_hz: f64,
    pub decimation: usize,
    pub rejection_threshold_uv: f64,
    /// Epoch definition at the post-decimation rate.
    pub epoch: SamplingMeta,
}

impl Default for PreprocessParams {
    fn default() -> Self {
        PreprocessParams {
            band_lo_hz: 0.1,
            band_hi_hz: 20.0,
            decimation: 1,
            rejection_threshold_uv: 100.0,
            epoch: SamplingMeta::canonical(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessOutcome {
    pub erp: ErpAverage,
    pub n_events: usize,
    pub skipped_events: usize,
    pub rejected: BTreeMap<RejectReason, usize>,
}

/// Band-pass, decimate, segment, baseline-correct, reject and average.
pub fn preprocess_recording(
    rec: &ContinuousRecording,
    params: &PreprocessParams,
    subject_id: &str,
    class_label: Option<ClassLabel>,
) -> Result<PreprocessOutcome> {
    rec.validate()?;
    if params.decimation == 0 {
        return Err(Error::Parameter("decimation factor must be >= 1".into()));
    }
    let factor = params.decimation;
    let new_rate = rec.rate_hz / factor as f64;
    if (new_rate - params.epoch.rate_hz).abs() > 1e-9 * new_rate {
        return Err(Error::Parameter(format!(
            "recording at {} Hz decimated by {factor} gives {new_rate} Hz, epochs expect {} Hz",
            rec.rate_hz, params.epoch.rate_hz
        )));
    }
    let bp = FirFilter::bandpass(rec.rate_hz, params.band_lo_hz, params.band_hi_hz)?;
    let aa = if factor > 1 {
        Some(anti_alias_filter(rec.rate_hz, factor)?)
    } else {
        None
    };
    let samples: Vec<Vec<f64>> = rec
        .samples
        .par_iter()
        .map(|ch| {
            let mut y = bp.apply_zero_phase(ch)?;
            if let Some(aa) = &aa {
                y = aa.apply_zero_phase(&y)?.into_iter().step_by(factor).collect();
            }
            Ok(y)
        })
        .collect::<Result<_>>()?;
    let mut events = rec.events.clone();
    for e in &mut events {
        e.sample_index = (e.sample_index + factor / 2) / factor;
    }
    events.dedup_by_key(|e| e.sample_index);
    let filtered = ContinuousRecording {
        channels: rec.channels.clone(),
        samples,
        rate_hz: new_rate,
        events,
    };
    let seg = segment_epochs(&filtered, &params.epoch)?;
    let mut out = average_trials(&seg.epochs, params.rejection_threshold_uv, subject_id, class_label)?;
    out.n_events = rec.events.len();
    out.skipped_events = seg.skipped.len();
    Ok(out)
}

/// Baseline-correct, reject and average trials that were epoched upstream.
pub fn average_trials(
    epochs: &[Epoch],
    rejection_threshold_uv: f64,
    subject_id: &str,
    class_label: Option<ClassLabel>,
) -> Result<PreprocessOutcome> {
    let corrected = epochs.iter().map(baseline_correct).collect::<Result<Vec<_>>>()?;
    let rej = reject_trials(corrected, rejection_threshold_uv)?;
    if rej.kept.is_empty() {
        return Err(Error::EmptyInput("every trial was rejected"));
    }
    let mut erp = average_erp(&rej.kept)?;
    erp.subject_id = subject_id.to_string();
    erp.class_label = class_label;
    Ok(PreprocessOutcome {
        erp,
        n_events: epochs.len(),
        skipped_events: 0,
        rejected: rej.counts,
    })
}

/// Feature vectors of several subject averages, in input order.
pub fn extract_all(
    erps: &[ErpAverage],
    levels: usize,
    boundary: BoundaryMode,
    registry: &FeatureRegistry,
) -> Result<Vec<FeatureVector>> {
    erps.iter()
        .map(|e| extract_subject(e, levels, boundary, registry))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Event;

    fn recording(n: usize, offset: f64) -> ContinuousRecording {
        let events = (0..10)
            .map(|i| Event {
                sample_index: 2000 + i * 500,
                condition: "w".into(),
                behavioral_correct: i != 3,
            })
            .collect();
        let x: Vec<f64> = (0..n).map(|i| offset + (i as f64 * 0.05).sin()).collect();
        ContinuousRecording::new(vec!["Cz".into(), "Pz".into()], vec![x.clone(), x], 256.0, events).unwrap()
    }

    #[test]
    fn preprocess_counts_and_offset_invariance() {
        let p = PreprocessParams::default();
        let a = preprocess_recording(&recording(12000, 0.0), &p, "s1", Some(ClassLabel::Regular)).unwrap();
        assert_eq!(a.erp.n_trials, 9);
        assert_eq!(a.rejected[&RejectReason::Behavioral], 1);
        assert_eq!(a.erp.channel_values[0].len(), 448);
        let b = preprocess_recording(&recording(12000, 37.0), &p, "s1", Some(ClassLabel::Regular)).unwrap();
        for (x, y) in a
            .erp
            .channel_values
            .iter()
            .flatten()
            .zip(b.erp.channel_values.iter().flatten())
        {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn rate_mismatch_is_rejected() {
        let p = PreprocessParams {
            decimation: 2,
            ..PreprocessParams::default()
        };
        assert!(preprocess_recording(&recording(12000, 0.0), &p, "s", None).is_err());
    }
}
