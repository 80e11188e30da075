use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use super::registry::{FeatureDescriptor, FeatureKind, FeatureRegistry, SignalPart};
use super::spectrum::{self, periodogram, Spectrum};
use super::statistical::{derivative_interval_stats, zero_crossing_rate};
use super::temporal::{abs_amplitude, histogram_entropy, latency, max_peak_ratio, positive_area, signal_energy};
use crate::error::{Error, Result};
use crate::signal::{ClassLabel, ErpAverage, SamplingMeta};
use crate::wavelet::{split_erp_with, BoundaryMode, ChannelSplit, WaveletFilterPair};

/// Value written where a feature is undefined for its input.
pub const MISSING: f64 = f64::NAN;

/// One column of a feature vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureColumn {
    pub electrode: String,
    pub feature: String,
}

impl FeatureColumn {
    pub fn header(&self) -> String {
        format!("{}:{}", self.electrode, self.feature)
    }

    pub fn parse_header(s: &str) -> Option<Self> {
        let (e, f) = s.split_once(':')?;
        Some(FeatureColumn {
            electrode: e.to_string(),
            feature: f.to_string(),
        })
    }
}

/// Electrode-major layout: every descriptor for the first channel, then the next.
pub fn layout(channels: &[String], registry: &FeatureRegistry) -> Vec<FeatureColumn> {
    channels
        .iter()
        .flat_map(|c| {
            registry.descriptors.iter().map(move |d| FeatureColumn {
                electrode: c.clone(),
                feature: d.name.clone(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub layout: Vec<FeatureColumn>,
    pub subject_id: String,
    pub class_label: Option<ClassLabel>,
}

struct PartView<'a> {
    signal: &'a [f64],
    spectrum: Option<Spectrum>,
}

fn evaluate(d: &FeatureDescriptor, part: &PartView<'_>, meta: &SamplingMeta) -> Result<f64> {
    let x = part.signal;
    let window = || {
        d.window
            .ok_or_else(|| Error::Config(format!("feature {:?} needs window_ms", d.name)))
    };
    let spec = || {
        part.spectrum
            .as_ref()
            .expect("spectrum computed for spectral descriptors")
    };
    match d.kind {
        FeatureKind::Latency => latency(x, meta, window()?),
        FeatureKind::AbsAmplitude => abs_amplitude(x),
        FeatureKind::PositiveArea => positive_area(x, meta, window()?),
        FeatureKind::MaxPeakRatio => max_peak_ratio(x, meta, window()?),
        FeatureKind::Energy => signal_energy(x),
        FeatureKind::HistogramEntropy => {
            let bins = d.param("bins", 16.0);
            if !(bins >= 1.0 && bins.fract() == 0.0) {
                return Err(Error::Config(format!(
                    "feature {:?}: bins must be a positive integer",
                    d.name
                )));
            }
            histogram_entropy(x, bins as usize)
        }
        FeatureKind::ZeroCrossingRate => zero_crossing_rate(x),
        FeatureKind::IntervalMean => derivative_interval_stats(x).map(|s| s.mean),
        FeatureKind::IntervalSd => derivative_interval_stats(x).map(|s| s.sd),
        FeatureKind::IntervalSkewness => derivative_interval_stats(x).map(|s| s.skewness),
        FeatureKind::SpectralFlatness => spectrum::spectral_flatness(spec()),
        FeatureKind::SpectralRolloff => spectrum::spectral_rolloff(spec(), d.param("fraction", 0.7)),
        FeatureKind::SpectralDeformation => spectrum::spectral_deformation_width(spec()).map(|v| v.0),
        FeatureKind::SpectralWidth => spectrum::spectral_deformation_width(spec()).map(|v| v.1),
        FeatureKind::SpectralCentroid => spectrum::spectral_centroid(spec()),
        FeatureKind::SpectralEntropy => spectrum::spectral_entropy(spec()),
        FeatureKind::BandPower => spectrum::band_power(spec(), d.param("lo_hz", 0.0), d.param("hi_hz", 0.0)),
    }
}

fn part_view<'a>(x: &'a [f64], with_spectrum: bool, meta: &SamplingMeta) -> Result<PartView<'a>> {
    let spectrum = if with_spectrum {
        Some(periodogram(x, meta.rate_hz)?)
    } else {
        None
    };
    Ok(PartView { signal: x, spectrum })
}

fn channel_features(split: &ChannelSplit, meta: &SamplingMeta, registry: &FeatureRegistry) -> Result<Vec<f64>> {
    if split.lp.len() != split.hp.len() {
        return Err(Error::Shape("LP and HP parts differ in length".into()));
    }
    let full: Vec<f64> = split.lp.iter().zip(&split.hp).map(|(l, h)| l + h).collect();
    let needs_spectrum = |p: SignalPart| registry.descriptors.iter().any(|d| d.part == p && d.kind.is_spectral());
    let lp = part_view(&split.lp, needs_spectrum(SignalPart::Lp), meta)?;
    let hp = part_view(&split.hp, needs_spectrum(SignalPart::Hp), meta)?;
    let fu = part_view(&full, needs_spectrum(SignalPart::Full), meta)?;
    registry
        .descriptors
        .iter()
        .map(|d| {
            let part = match d.part {
                SignalPart::Lp => &lp,
                SignalPart::Hp => &hp,
                SignalPart::Full => &fu,
            };
            match evaluate(d, part, meta) {
                Ok(v) => Ok(v),
                Err(e) if e.is_missing_value() => Ok(MISSING),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Evaluates every descriptor on every channel.
pub fn extract_feature_vector(
    channels: &[String],
    parts: &[ChannelSplit],
    meta: &SamplingMeta,
    registry: &FeatureRegistry,
) -> Result<FeatureVector> {
    if channels.is_empty() {
        return Err(Error::EmptyInput("no channels to extract features from"));
    }
    if channels.len() != parts.len() {
        return Err(Error::Shape(format!(
            "{} channel labels for {} channel splits",
            channels.len(),
            parts.len()
        )));
    }
    registry.validate()?;
    let blocks: Vec<Vec<f64>> = parts
        .par_iter()
        .map(|s| channel_features(s, meta, registry))
        .collect::<Result<_>>()?;
    Ok(FeatureVector {
        values: blocks.concat(),
        layout: layout(channels, registry),
        subject_id: String::new(),
        class_label: None,
    })
}

/// Wavelet split followed by feature extraction for one subject average.
pub fn extract_subject(
    erp: &ErpAverage,
    levels: usize,
    boundary: BoundaryMode,
    registry: &FeatureRegistry,
) -> Result<FeatureVector> {
    let parts = split_erp_with(erp, levels, WaveletFilterPair::db4(), boundary)?;
    let mut v = extract_feature_vector(&erp.channels, &parts, &erp.meta, registry)?;
    v.subject_id = erp.subject_id.clone();
    v.class_label = erp.class_label;
    Ok(v)
}

/// Subjects × features table sharing one column layout.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub subject_ids: Vec<String>,
    pub labels: Vec<Option<ClassLabel>>,
    pub columns: Vec<FeatureColumn>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn from_vectors(vectors: Vec<FeatureVector>) -> Result<Self> {
        let first = vectors.first().ok_or(Error::EmptyInput("no feature vectors"))?;
        let columns = first.layout.clone();
        let mut m = FeatureMatrix {
            subject_ids: Vec::with_capacity(vectors.len()),
            labels: Vec::with_capacity(vectors.len()),
            columns,
            rows: Vec::with_capacity(vectors.len()),
        };
        for v in vectors {
            if v.layout != m.columns {
                return Err(Error::Shape(format!(
                    "subject {} has a different feature layout",
                    v.subject_id
                )));
            }
            m.subject_ids.push(v.subject_id);
            m.labels.push(v.class_label);
            m.rows.push(v.values);
        }
        Ok(m)
    }

    pub fn n_subjects(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("subject_id,class_label");
        for c in &self.columns {
            out.push(',');
            out.push_str(&c.header());
        }
        out.push('\n');
        for ((id, label), row) in self.subject_ids.iter().zip(&self.labels).zip(&self.rows) {
            out.push_str(id);
            out.push(',');
            out.push_str(ClassLabel::optional_str(*label));
            for v in row {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_csv(text: &str, path: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, "empty feature matrix"))?;
        let mut cells = header.split(',');
        if cells.next() != Some("subject_id") || cells.next() != Some("class_label") {
            return Err(Error::parse(path, 1, "header must start with subject_id,class_label"));
        }
        let columns = cells
            .map(|h| FeatureColumn::parse_header(h).ok_or_else(|| Error::parse(path, 1, format!("bad column {h:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let mut m = FeatureMatrix {
            subject_ids: Vec::new(),
            labels: Vec::new(),
            columns,
            rows: Vec::new(),
        };
        for (i, line) in lines {
            let lineno = i + 1;
            let mut cells = line.split(',');
            let id = cells.next().unwrap_or_default().to_string();
            let label = cells
                .next()
                .ok_or_else(|| Error::parse(path, lineno, "missing class_label"))?;
            let label = ClassLabel::parse_optional(label).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
            let row = cells
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::parse(path, lineno, format!("bad value {c:?}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != m.columns.len() {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("{} values for {} columns", row.len(), m.columns.len()),
                ));
            }
            m.subject_ids.push(id);
            m.labels.push(label);
            m.rows.push(row);
        }
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::signal::io::write_file(path, self.to_csv().as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text, path)
    }
}
