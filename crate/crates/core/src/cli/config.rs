//! Pipeline configuration file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::manifest::normalize;
use crate::classifier::{CvScheme, KernelKind, KernelSpec};
use crate::error::{Error, Result};
use crate::features::FeatureRegistry;
use crate::pipeline::PreprocessParams;
use crate::roi::ElectrodeLayout;
use crate::synth::{default_dyslexia_scenario, hp_only_scenario, SynthConfig};
use crate::wavelet::BoundaryMode;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsSection {
    /// Directory holding `subjects.csv` and the recordings it lists.
    pub input_dir: PathBuf,
    pub work_dir: PathBuf,
    pub output_dir: PathBuf,
    /// Feature registry TOML; the built-in registry when absent.
    #[serde(default)]
    pub registry: Option<PathBuf>,
    /// Electrode layout CSV; the built-in 64-channel layout when absent.
    #[serde(default)]
    pub layout: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    Default,
    HpOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    #[serde(default = "default_scenario")]
    pub scenario: ScenarioName,
    /// Full scenario file; replaces `scenario` when given.
    #[serde(default)]
    pub file: Option<PathBuf>,
    #[serde(default)]
    pub n_subjects_per_class: Option<usize>,
    #[serde(default)]
    pub trials_per_subject: Option<usize>,
    /// Restricts the montage to these channels.
    #[serde(default)]
    pub channels: Option<Vec<String>>,
    /// Decimal places written for recording samples.
    #[serde(default = "default_decimals")]
    pub decimals: usize,
}

fn default_scenario() -> ScenarioName {
    ScenarioName::Default
}

fn default_decimals() -> usize {
    3
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WaveletSection {
    pub levels: usize,
    pub boundary: BoundaryMode,
}

impl Default for WaveletSection {
    fn default() -> Self {
        WaveletSection {
            levels: 5,
            boundary: BoundaryMode::Periodic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RelieffSection {
    pub neighbors: usize,
    pub selection_sizes: Vec<usize>,
}

impl Default for RelieffSection {
    fn default() -> Self {
        RelieffSection {
            neighbors: 10,
            selection_sizes: vec![60, 10],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierSection {
    pub kernel: KernelKind,
    pub gamma: Option<f64>,
    pub c: f64,
}

impl Default for ClassifierSection {
    fn default() -> Self {
        ClassifierSection {
            kernel: KernelKind::Linear,
            gamma: None,
            c: 1.0,
        }
    }
}

impl ClassifierSection {
    pub fn kernel_spec(&self) -> KernelSpec {
        KernelSpec {
            kind: self.kernel,
            gamma: self.gamma,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Stratified,
    Loso,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationSection {
    pub scheme: SchemeName,
    pub folds: usize,
    pub repeats: usize,
    /// Select features on all subjects before splitting.
    pub leaky: bool,
}

impl Default for EvaluationSection {
    fn default() -> Self {
        EvaluationSection {
            scheme: SchemeName::Stratified,
            folds: 5,
            repeats: 20,
            leaky: false,
        }
    }
}

impl EvaluationSection {
    pub fn cv_scheme(&self) -> CvScheme {
        match self.scheme {
            SchemeName::Stratified => CvScheme::StratifiedKFold { folds: self.folds },
            SchemeName::Loso => CvScheme::LeaveOneSubjectOut,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub paths: PathsSection,
    #[serde(default)]
    pub synth: Option<SynthSection>,
    #[serde(default)]
    pub preprocess: PreprocessParams,
    #[serde(default)]
    pub wavelet: WaveletSection,
    #[serde(default)]
    pub relieff: RelieffSection,
    #[serde(default)]
    pub classifier: ClassifierSection,
    #[serde(default)]
    pub evaluation: EvaluationSection,
}

impl PipelineConfig {
    /// Parses `text`; relative paths are resolved against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let abs = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = normalize(&base_dir.join(&*p));
            }
        };
        abs(&mut cfg.paths.input_dir);
        abs(&mut cfg.paths.work_dir);
        abs(&mut cfg.paths.output_dir);
        if let Some(p) = cfg.paths.registry.as_mut() {
            abs(p);
        }
        if let Some(p) = cfg.paths.layout.as_mut() {
            abs(p);
        }
        if let Some(p) = cfg.synth.as_mut().and_then(|s| s.file.as_mut()) {
            abs(p);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml_str(&text, base).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Checks value ranges; file-dependent checks happen when a stage runs.
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: &str| Err(Error::Config(format!("{field}: {why}")));
        let p = &self.preprocess;
        if !(p.band_lo_hz >= 0.0 && p.band_hi_hz > p.band_lo_hz) {
            return bad("preprocess.band_hi_hz", "band edges must satisfy 0 <= lo < hi");
        }
        if p.decimation == 0 {
            return bad("preprocess.decimation", "must be >= 1");
        }
        if !(p.rejection_threshold_uv > 0.0) {
            return bad("preprocess.rejection_threshold_uv", "must be > 0");
        }
        if p.epoch.validate().is_err() {
            return bad("preprocess.epoch", "rate_hz must be > 0 and post_stimulus_samples >= 1");
        }
        if self.wavelet.levels == 0 {
            return bad("wavelet.levels", "must be >= 1");
        }
        if self.relieff.neighbors == 0 {
            return bad("relieff.neighbors", "must be >= 1");
        }
        if self.relieff.selection_sizes.is_empty() || self.relieff.selection_sizes.contains(&0) {
            return bad("relieff.selection_sizes", "need at least one size, each >= 1");
        }
        let mut sizes = self.relieff.selection_sizes.clone();
        sizes.sort_unstable();
        sizes.dedup();
        if sizes.len() != self.relieff.selection_sizes.len() {
            return bad("relieff.selection_sizes", "sizes must be distinct");
        }
        if !(self.classifier.c > 0.0) {
            return bad("classifier.c", "must be > 0");
        }
        if self.classifier.kernel_spec().validate().is_err() {
            return bad("classifier.gamma", "must be > 0");
        }
        if self.evaluation.repeats == 0 {
            return bad("evaluation.repeats", "must be >= 1");
        }
        if self.evaluation.scheme == SchemeName::Stratified && self.evaluation.folds < 2 {
            return bad("evaluation.folds", "must be >= 2");
        }
        Ok(())
    }

    pub fn registry(&self) -> Result<FeatureRegistry> {
        match &self.paths.registry {
            Some(p) => FeatureRegistry::load(p),
            None => Ok(FeatureRegistry::default_registry()),
        }
    }

    pub fn layout(&self) -> Result<ElectrodeLayout> {
        match &self.paths.layout {
            Some(p) => ElectrodeLayout::load(p),
            None => Ok(ElectrodeLayout::biosemi64()),
        }
    }

    /// Scenario to generate, with the stage seed applied.
    pub fn synth_config(&self, stage_seed: u64) -> Result<SynthConfig> {
        let s = self
            .synth
            .as_ref()
            .ok_or_else(|| Error::Config("synth: section missing".into()))?;
        let mut cfg = match &s.file {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("synth.file {}: {e}", p.display())))?;
                SynthConfig::from_toml_str(&text)?
            }
            None => match s.scenario {
                ScenarioName::Default => default_dyslexia_scenario(),
                ScenarioName::HpOnly => hp_only_scenario(),
            },
        };
        if let Some(n) = s.n_subjects_per_class {
            cfg.n_subjects_per_class = n;
        }
        if let Some(n) = s.trials_per_subject {
            cfg.trials_per_subject = n;
        }
        if let Some(ch) = &s.channels {
            cfg.effect_electrodes.retain(|e| ch.contains(e));
            cfg.channels = ch.clone();
        }
        cfg.seed = stage_seed;
        cfg.validate().map_err(|e| Error::Config(format!("synth: {e}")))?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "seed = 1\n[paths]\ninput_dir = \"in\"\nwork_dir = \"w\"\noutput_dir = \"o\"\n";

    #[test]
    fn defaults_and_relative_paths() {
        let cfg = PipelineConfig::from_toml_str(MINIMAL, Path::new("/base")).unwrap();
        assert_eq!(cfg.paths.work_dir, Path::new("/base/w"));
        assert_eq!(cfg.relieff.selection_sizes, vec![60, 10]);
        assert_eq!(cfg.evaluation.repeats, 20);
        assert_eq!(cfg.wavelet.levels, 5);
        assert_eq!(cfg.preprocess, PreprocessParams::default());
    }

    #[test]
    fn unknown_field_is_named() {
        let text = format!("{MINIMAL}[relieff]\nneighbours = 3\n");
        let err = PipelineConfig::from_toml_str(&text, Path::new(".")).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("neighbours"), "{err}");
    }

    #[test]
    fn invalid_value_is_named() {
        let text = format!("{MINIMAL}[classifier]\nc = -1.0\n");
        let err = PipelineConfig::from_toml_str(&text, Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("classifier.c"), "{err}");
    }

    #[test]
    fn synth_overrides() {
        let text = format!("{MINIMAL}[synth]\nn_subjects_per_class = 3\nchannels = [\"Fp1\", \"Cz\"]\n");
        let cfg = PipelineConfig::from_toml_str(&text, Path::new(".")).unwrap();
        let s = cfg.synth_config(99).unwrap();
        assert_eq!(s.n_subjects_per_class, 3);
        assert_eq!(s.effect_electrodes, vec!["Fp1".to_string()]);
        assert_eq!(s.seed, 99);
    }
}
