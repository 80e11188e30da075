use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::temporal::TimeWindow;
use crate::error::{Error, Result};

const DEFAULT_REGISTRY: &str = include_str!("../../data/default_registry.toml");

/// Which reconstruction a descriptor reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalPart {
    Lp,
    Hp,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Latency,
    AbsAmplitude,
    PositiveArea,
    MaxPeakRatio,
    Energy,
    HistogramEntropy,
    ZeroCrossingRate,
    IntervalMean,
    IntervalSd,
    IntervalSkewness,
    SpectralFlatness,
    SpectralRolloff,
    SpectralDeformation,
    SpectralWidth,
    SpectralCentroid,
    SpectralEntropy,
    BandPower,
}

impl FeatureKind {
    pub fn needs_window(self) -> bool {
        matches!(
            self,
            FeatureKind::Latency | FeatureKind::PositiveArea | FeatureKind::MaxPeakRatio
        )
    }

    pub fn is_spectral(self) -> bool {
        matches!(
            self,
            FeatureKind::SpectralFlatness
                | FeatureKind::SpectralRolloff
                | FeatureKind::SpectralDeformation
                | FeatureKind::SpectralWidth
                | FeatureKind::SpectralCentroid
                | FeatureKind::SpectralEntropy
                | FeatureKind::BandPower
        )
    }

    fn required_params(self) -> &'static [&'static str] {
        match self {
            FeatureKind::BandPower => &["lo_hz", "hi_hz"],
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureDescriptor {
    pub name: String,
    pub kind: FeatureKind,
    pub part: SignalPart,
    #[serde(default, rename = "window_ms", skip_serializing_if = "Option::is_none")]
    pub window: Option<TimeWindow>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

impl FeatureDescriptor {
    pub fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryFile {
    #[serde(default = "default_version")]
    version: u32,
    #[serde(rename = "feature", default)]
    features: Vec<FeatureDescriptor>,
}

fn default_version() -> u32 {
    1
}

/// Ordered list of feature descriptors evaluated on every electrode.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRegistry {
    pub version: u32,
    pub descriptors: Vec<FeatureDescriptor>,
}

impl FeatureRegistry {
    pub fn new(descriptors: Vec<FeatureDescriptor>) -> Result<Self> {
        let r = FeatureRegistry {
            version: 1,
            descriptors,
        };
        r.validate()?;
        Ok(r)
    }

    /// The shipped 27-descriptor registry.
    pub fn default_registry() -> Self {
        Self::from_toml_str(DEFAULT_REGISTRY).expect("shipped registry parses")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: RegistryFile = toml::from_str(text).map_err(|e| Error::Config(format!("feature registry: {e}")))?;
        let r = FeatureRegistry {
            version: file.version,
            descriptors: file.features,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        let file = RegistryFile {
            version: self.version,
            features: self.descriptors.clone(),
        };
        toml::to_string(&file).expect("registry serialises")
    }

    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.descriptors.iter().map(|d| d.name.as_str())
    }

    pub fn validate(&self) -> Result<()> {
        if self.descriptors.is_empty() {
            return Err(Error::Config("feature registry is empty".into()));
        }
        let mut seen = HashSet::new();
        for d in &self.descriptors {
            if d.name.is_empty() || d.name.contains([',', ':']) {
                return Err(Error::Config(format!(
                    "feature name {:?} is empty or contains ',' or ':'",
                    d.name
                )));
            }
            if !seen.insert(d.name.as_str()) {
                return Err(Error::Config(format!("duplicate feature name {:?}", d.name)));
            }
            if d.kind.needs_window() && d.window.is_none() {
                return Err(Error::Config(format!("feature {:?} needs window_ms", d.name)));
            }
            if let Some(w) = d.window {
                if !(w.start_ms < w.end_ms) {
                    return Err(Error::Config(format!("feature {:?} has an empty window", d.name)));
                }
            }
            for key in d.kind.required_params() {
                if !d.params.contains_key(*key) {
                    return Err(Error::Config(format!("feature {:?} needs parameter {key}", d.name)));
                }
            }
        }
        Ok(())
    }
}
