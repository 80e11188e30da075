//! Pipeline stages. Each reads the previous stage's files and writes its own
//! artifacts plus a `<stage>.manifest.json`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

use super::config::PipelineConfig;
use super::manifest::{stage_seed, Manifest};
use crate::classifier::{cross_validate, train, ConfusionReport, CvSettings, FeatureSelection};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::pipeline::{average_trials, extract_all, preprocess_recording, PreprocessOutcome};
use crate::relieff::{format_weights, parse_weights, relieff_weights, select_top_k, RawDataset, WeightVector};
use crate::roi::{aggregate_regions, attribute_selection, render_scalp_map};
use crate::signal::io::{format_average, load_average, load_trial_dir, write_file};
use crate::signal::{grand_average, ClassLabel, ErpAverage};
use crate::synth::{generate_dataset, load_subject, read_subject_index, write_dataset, SubjectEntry, SUBJECTS_FILE};

pub const STAGES: [&str; 8] = [
    "synth",
    "preprocess",
    "extract",
    "select",
    "train",
    "evaluate",
    "roi",
    "report",
];

/// Resolved configuration plus command-line overrides.
#[derive(Debug, Clone)]
pub struct Run {
    pub cfg: PipelineConfig,
    pub leaky: bool,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn to_json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("parameters serialise")
}

impl Run {
    fn work(&self) -> &Path {
        &self.cfg.paths.work_dir
    }

    fn out(&self) -> &Path {
        &self.cfg.paths.output_dir
    }

    fn erp_dir(&self) -> PathBuf {
        self.work().join("erp")
    }

    fn features_path(&self) -> PathBuf {
        self.work().join("features.csv")
    }

    fn weights_path(&self) -> PathBuf {
        self.work().join("weights.csv")
    }

    fn manifest(&self, stage: &str, params: serde_json::Value) -> Manifest {
        Manifest::new(stage, self.cfg.seed, params)
    }

    fn check_sizes(&self, n_features: usize) -> Result<()> {
        match self.cfg.relieff.selection_sizes.iter().find(|&&k| k > n_features) {
            Some(k) => Err(Error::Config(format!(
                "relieff.selection_sizes: {k} exceeds the {n_features} available features"
            ))),
            None => Ok(()),
        }
    }

    pub fn run_stage(&self, stage: &str) -> Result<()> {
        match stage {
            "synth" => self.synth(),
            "preprocess" => self.preprocess(),
            "extract" => self.extract(),
            "select" => self.select(),
            "train" => self.train(),
            "evaluate" => self.evaluate(),
            "roi" => self.roi(),
            "report" => self.report(),
            other => Err(Error::Config(format!("unknown stage {other}"))),
        }
    }

    /// Every stage in order; `synth` only when the config has a `[synth]` section.
    pub fn pipeline(&self) -> Result<()> {
        for stage in STAGES {
            if stage == "synth" && self.cfg.synth.is_none() {
                continue;
            }
            self.run_stage(stage)?;
        }
        Ok(())
    }

    pub fn synth(&self) -> Result<()> {
        let seed = stage_seed(self.cfg.seed, "synth");
        let scfg = self.cfg.synth_config(seed)?;
        let decimals = self.cfg.synth.as_ref().map(|s| s.decimals);
        let dir = &self.cfg.paths.input_dir;
        let subjects = generate_dataset(&scfg)?;
        let mut outputs = write_dataset(&subjects, dir, decimals)?;
        let scenario = dir.join("scenario.toml");
        write_file(&scenario, scfg.to_toml_string().as_bytes())?;
        outputs.push(scenario);
        self.manifest(
            "synth",
            json!({ "synth": to_json(&self.cfg.synth), "decimals": decimals }),
        )
        .write(&dir.join("synth.manifest.json"), &[], &outputs)?;
        eprintln!("synth: {} subjects -> {}", subjects.len(), dir.display());
        Ok(())
    }

    pub fn preprocess(&self) -> Result<()> {
        let dir = &self.cfg.paths.input_dir;
        let entries = read_subject_index(dir)?;
        if entries.is_empty() {
            return Err(Error::EmptyInput("subjects.csv lists no subjects"));
        }
        let params = self.cfg.preprocess;
        let outcomes: Vec<PreprocessOutcome> = entries
            .par_iter()
            .map(|e: &SubjectEntry| {
                if e.recording.is_dir() {
                    let trials = load_trial_dir(&e.recording)?;
                    average_trials(&trials, params.rejection_threshold_uv, &e.subject_id, e.class_label)
                } else {
                    let rec = load_subject(e)?;
                    preprocess_recording(&rec, &params, &e.subject_id, e.class_label)
                }
            })
            .collect::<Result<_>>()?;

        let erp_dir = self.erp_dir();
        let mut outputs = Vec::new();
        let mut index = String::from("subject_id,class_label,file\n");
        let mut log =
            String::from("subject_id,n_events,skipped_events,rejected_behavioral,rejected_amplitude,n_trials\n");
        for o in &outcomes {
            let file = format!("{}.csv", o.erp.subject_id);
            let path = erp_dir.join(&file);
            write_file(&path, format_average(&o.erp).as_bytes())?;
            outputs.push(path);
            writeln!(
                index,
                "{},{},{file}",
                o.erp.subject_id,
                ClassLabel::optional_str(o.erp.class_label)
            )
            .unwrap();
            let count = |r| o.rejected.get(&r).copied().unwrap_or(0);
            writeln!(
                log,
                "{},{},{},{},{},{}",
                o.erp.subject_id,
                o.n_events,
                o.skipped_events,
                count(crate::signal::RejectReason::Behavioral),
                count(crate::signal::RejectReason::Amplitude),
                o.erp.n_trials
            )
            .unwrap();
        }
        for label in ClassLabel::ALL {
            let group: Vec<ErpAverage> = outcomes
                .iter()
                .filter(|o| o.erp.class_label == Some(label))
                .map(|o| o.erp.clone())
                .collect();
            if group.is_empty() {
                continue;
            }
            let ga = grand_average(&group)?;
            let path = erp_dir.join(format!("grand_average_{label}.csv"));
            write_file(&path, format_average(&ga).as_bytes())?;
            outputs.push(path);
        }
        let index_path = erp_dir.join("index.csv");
        write_file(&index_path, index.as_bytes())?;
        outputs.push(index_path);
        let log_path = self.work().join("preprocess_log.csv");
        write_file(&log_path, log.as_bytes())?;
        outputs.push(log_path);

        let inputs = subject_files(dir, &entries);
        self.manifest("preprocess", json!({ "preprocess": to_json(&params) }))
            .write(&self.work().join("preprocess.manifest.json"), &inputs, &outputs)?;
        eprintln!(
            "preprocess: {} subject averages -> {}",
            outcomes.len(),
            erp_dir.display()
        );
        Ok(())
    }

    fn load_erps(&self) -> Result<(Vec<ErpAverage>, Vec<PathBuf>)> {
        let erp_dir = self.erp_dir();
        let index_path = erp_dir.join("index.csv");
        let text = read(&index_path)?;
        let mut files = vec![index_path.clone()];
        let mut erps = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let c: Vec<&str> = line.split(',').collect();
            if c.len() != 3 {
                return Err(Error::parse(&index_path, i + 1, "expected subject_id,class_label,file"));
            }
            let path = erp_dir.join(c[2].trim());
            erps.push(load_average(&path)?);
            files.push(path);
        }
        Ok((erps, files))
    }

    pub fn extract(&self) -> Result<()> {
        let (erps, mut inputs) = self.load_erps()?;
        let registry = self.cfg.registry()?;
        if let Some(p) = &self.cfg.paths.registry {
            inputs.push(p.clone());
        }
        let w = self.cfg.wavelet;
        let vectors = extract_all(&erps, w.levels, w.boundary, &registry)?;
        let matrix = FeatureMatrix::from_vectors(vectors)?;
        let path = self.features_path();
        matrix.save(&path)?;
        self.manifest(
            "extract",
            json!({ "wavelet": to_json(&w), "registry_version": registry.version, "n_descriptors": registry.len() }),
        )
        .write(&self.work().join("extract.manifest.json"), &inputs, &[path])?;
        eprintln!(
            "extract: {} subjects x {} features -> {}",
            matrix.n_subjects(),
            matrix.n_features(),
            self.features_path().display()
        );
        Ok(())
    }

    fn load_dataset(&self) -> Result<(FeatureMatrix, RawDataset)> {
        let matrix = FeatureMatrix::load(&self.features_path())?;
        let data = RawDataset::from_feature_matrix(&matrix)?;
        Ok((matrix, data))
    }

    fn load_weights(&self, matrix: &FeatureMatrix) -> Result<WeightVector> {
        let path = self.weights_path();
        let (w, cols) = parse_weights(&read(&path)?, &path)?;
        if cols != matrix.columns {
            return Err(Error::Shape(format!(
                "{} does not match the feature matrix columns",
                path.display()
            )));
        }
        Ok(w)
    }

    pub fn select(&self) -> Result<()> {
        let (matrix, data) = self.load_dataset()?;
        self.check_sizes(matrix.n_features())?;
        let w = relieff_weights(&data.impute_all()?, self.cfg.relieff.neighbors)?;
        let path = self.weights_path();
        write_file(&path, format_weights(&w, &matrix.columns)?.as_bytes())?;
        self.manifest("select", json!({ "relieff": to_json(&self.cfg.relieff) }))
            .write(
                &self.work().join("select.manifest.json"),
                &[self.features_path()],
                std::slice::from_ref(&path),
            )?;
        eprintln!("select: ReliefF weights -> {}", path.display());
        Ok(())
    }

    pub fn train(&self) -> Result<()> {
        let (matrix, data) = self.load_dataset()?;
        self.check_sizes(matrix.n_features())?;
        let w = self.load_weights(&matrix)?;
        let ds = data.impute_all()?;
        let seed = stage_seed(self.cfg.seed, "train");
        let mut outputs = Vec::new();
        for &k in &self.cfg.relieff.selection_sizes {
            let subset = select_top_k(&w, k)?;
            let model = train(
                &ds,
                &subset,
                self.cfg.classifier.kernel_spec(),
                self.cfg.classifier.c,
                seed,
            )?;
            let path = self.out().join(format!("model_{k}.json"));
            let mut text = serde_json::to_string_pretty(&model).expect("model serialises");
            text.push('\n');
            write_file(&path, text.as_bytes())?;
            outputs.push(path);
        }
        self.manifest(
            "train",
            json!({ "classifier": to_json(&self.cfg.classifier), "selection_sizes": self.cfg.relieff.selection_sizes }),
        )
        .write(
            &self.out().join("train.manifest.json"),
            &[self.features_path(), self.weights_path()],
            &outputs,
        )?;
        eprintln!("train: {} models -> {}", outputs.len(), self.out().display());
        Ok(())
    }

    pub fn evaluate(&self) -> Result<()> {
        let (matrix, data) = self.load_dataset()?;
        self.check_sizes(matrix.n_features())?;
        let seed = stage_seed(self.cfg.seed, "evaluate");
        let leaky = self.leaky || self.cfg.evaluation.leaky;
        let neighbors = self.cfg.relieff.neighbors;
        let mut outputs = Vec::new();
        for &k in &self.cfg.relieff.selection_sizes {
            let selection = if leaky {
                FeatureSelection::Leaky { top_k: k, neighbors }
            } else {
                FeatureSelection::InFold { top_k: k, neighbors }
            };
            let report = cross_validate(
                &data,
                &CvSettings {
                    scheme: self.cfg.evaluation.cv_scheme(),
                    selection,
                    kernel: self.cfg.classifier.kernel_spec(),
                    c: self.cfg.classifier.c,
                    repeats: self.cfg.evaluation.repeats,
                    seed,
                },
            )?;
            let txt = self.out().join(format!("confusion_{k}.txt"));
            let js = self.out().join(format!("confusion_{k}.json"));
            write_file(&txt, report.render().as_bytes())?;
            write_file(&js, report.to_json().as_bytes())?;
            eprintln!("evaluate: {k} features, mean diagonal {:.1}%", report.mean_diagonal());
            outputs.push(txt);
            outputs.push(js);
        }
        self.manifest(
            "evaluate",
            json!({
                "evaluation": to_json(&self.cfg.evaluation),
                "leaky": leaky,
                "classifier": to_json(&self.cfg.classifier),
                "relieff": to_json(&self.cfg.relieff),
            }),
        )
        .write(
            &self.out().join("evaluate.manifest.json"),
            &[self.features_path()],
            &outputs,
        )?;
        Ok(())
    }

    /// Region report for the largest configured selection.
    pub fn roi(&self) -> Result<()> {
        let path = self.weights_path();
        let (w, columns) = parse_weights(&read(&path)?, &path)?;
        let k = *self
            .cfg
            .relieff
            .selection_sizes
            .iter()
            .max()
            .expect("validated nonempty");
        if k > w.len() {
            return Err(Error::Config(format!(
                "relieff.selection_sizes: {k} exceeds the {} weights",
                w.len()
            )));
        }
        let layout = self.cfg.layout()?;
        let top = select_top_k(&w, k)?;
        let per = attribute_selection(&top, &columns, &w)?;
        let report = aggregate_regions(&per, &layout)?;
        let txt = self.out().join("roi_report.txt");
        let svg = self.out().join("scalp_map.svg");
        let mut text = format!("Top {k} ReliefF features\nrank  feature                 weight\n");
        for (rank, &i) in top.iter().enumerate() {
            writeln!(
                text,
                "{:>4}  {:<22} {:>9.6}",
                rank + 1,
                columns[i].header(),
                w.weights[i]
            )
            .unwrap();
        }
        text.push('\n');
        text.push_str(&report.render_text());
        write_file(&txt, text.as_bytes())?;
        render_scalp_map(&report, &layout, &svg)?;
        let mut inputs = vec![path];
        if let Some(p) = &self.cfg.paths.layout {
            inputs.push(p.clone());
        }
        self.manifest("roi", json!({ "top_k": k })).write(
            &self.out().join("roi.manifest.json"),
            &inputs,
            &[txt, svg],
        )?;
        eprintln!("roi: asymmetry index {:.3}", report.asymmetry_index);
        Ok(())
    }

    pub fn report(&self) -> Result<()> {
        let features = self.features_path();
        let header = read(&features)?;
        let n_subjects = header.lines().skip(1).filter(|l| !l.trim().is_empty()).count();
        let n_features = header
            .lines()
            .next()
            .map_or(0, |h| h.split(',').count().saturating_sub(2));
        let mut inputs = vec![features];
        let mut out = String::from("ERP feature analysis summary\n\n");
        writeln!(out, "Feature matrix: {n_subjects} subjects x {n_features} features\n").unwrap();
        for &k in &self.cfg.relieff.selection_sizes {
            let path = self.out().join(format!("confusion_{k}.json"));
            let report: ConfusionReport =
                serde_json::from_str(&read(&path)?).map_err(|e| Error::parse(&path, e.line(), e.to_string()))?;
            out.push_str(&report.render());
            out.push('\n');
            inputs.push(path);
        }
        let roi = self.out().join("roi_report.txt");
        out.push_str(&read(&roi)?);
        inputs.push(roi);
        let path = self.out().join("summary.txt");
        write_file(&path, out.as_bytes())?;
        self.manifest("report", json!({ "selection_sizes": self.cfg.relieff.selection_sizes }))
            .write(
                &self.out().join("report.manifest.json"),
                &inputs,
                std::slice::from_ref(&path),
            )?;
        eprintln!("report: {}", path.display());
        Ok(())
    }
}

fn subject_files(dir: &Path, entries: &[SubjectEntry]) -> Vec<PathBuf> {
    let mut files = vec![dir.join(SUBJECTS_FILE)];
    for e in entries {
        if e.recording.is_dir() {
            if let Ok(rd) = fs::read_dir(&e.recording) {
                let mut trials: Vec<PathBuf> = rd
                    .filter_map(|d| d.ok().map(|d| d.path()))
                    .filter(|p| p.extension().is_some_and(|x| x == "csv"))
                    .collect();
                trials.sort();
                files.extend(trials);
            }
        } else {
            files.push(e.recording.clone());
            files.push(e.events.clone());
        }
    }
    files
}
