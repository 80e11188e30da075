use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{predict, train, KernelSpec};
use super::report::ConfusionReport;
use crate::error::{Error, Result};
use crate::relieff::{relieff_weights, select_top_k, RawDataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CvScheme {
    StratifiedKFold { folds: usize },
    LeaveOneSubjectOut,
}

impl std::fmt::Display for CvScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CvScheme::StratifiedKFold { folds } => write!(f, "stratified {folds}-fold"),
            CvScheme::LeaveOneSubjectOut => f.write_str("leave-one-subject-out"),
        }
    }
}

/// How the training features of each fold are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FeatureSelection {
    /// The same columns in every fold.
    Fixed { indices: Vec<usize> },
    /// ReliefF top-`top_k` refit on each training fold.
    InFold { top_k: usize, neighbors: usize },
    /// ReliefF top-`top_k` fitted once on every subject before splitting.
    Leaky { top_k: usize, neighbors: usize },
}

impl FeatureSelection {
    pub fn n_selected(&self) -> usize {
        match self {
            FeatureSelection::Fixed { indices } => indices.len(),
            FeatureSelection::InFold { top_k, .. } | FeatureSelection::Leaky { top_k, .. } => *top_k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSettings {
    pub scheme: CvScheme,
    pub selection: FeatureSelection,
    pub kernel: KernelSpec,
    pub c: f64,
    pub repeats: usize,
    pub seed: u64,
}

/// Test-fold index lists for one repeat.
pub fn stratified_folds(labels: &[usize], folds: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::Parameter("stratified CV needs at least 2 folds".into()));
    }
    let mut out = vec![Vec::new(); folds];
    let mut slot = 0;
    for class in 0..2 {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < folds {
            return Err(Error::Parameter(format!(
                "{folds} folds but class {class} has only {} subjects",
                members.len()
            )));
        }
        members.shuffle(rng);
        for m in members {
            out[slot % folds].push(m);
            slot += 1;
        }
    }
    for f in &mut out {
        f.sort_unstable();
    }
    Ok(out)
}

fn repeat_rng(seed: u64, repeat: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(repeat as u64 + 1);
    rng
}

/// Feature columns chosen from the training rows of one fold. `Leaky` is not
/// a per-fold rule and is rejected.
pub fn fold_features(data: &RawDataset, train_rows: &[usize], selection: &FeatureSelection) -> Result<Vec<usize>> {
    match selection {
        FeatureSelection::Fixed { indices } => Ok(indices.clone()),
        FeatureSelection::InFold { top_k, neighbors } => {
            let ds = data.impute_with(train_rows)?;
            select_top_k(&relieff_weights(&ds, *neighbors)?, *top_k)
        }
        FeatureSelection::Leaky { .. } => Err(Error::Parameter("leaky selection is fitted before splitting".into())),
    }
}

/// Test folds of every repeat. Leave-one-subject-out is deterministic and
/// runs once whatever `repeats` says.
pub fn fold_plan(labels: &[usize], scheme: CvScheme, repeats: usize, seed: u64) -> Result<Vec<Vec<Vec<usize>>>> {
    match scheme {
        CvScheme::StratifiedKFold { folds } => (0..repeats)
            .map(|r| stratified_folds(labels, folds, &mut repeat_rng(seed, r)))
            .collect(),
        CvScheme::LeaveOneSubjectOut => Ok(vec![(0..labels.len()).map(|i| vec![i]).collect()]),
    }
}

/// Predictions for one fold: `(row, true label, predicted label)`.
fn run_fold(
    data: &RawDataset,
    test: &[usize],
    selection: &FeatureSelection,
    settings: &CvSettings,
    fold_seed: u64,
) -> Result<Vec<(usize, usize)>> {
    let train_rows: Vec<usize> = (0..data.n_samples())
        .filter(|i| test.binary_search(i).is_err())
        .collect();
    let subset = fold_features(data, &train_rows, selection)?;
    let means = data.column_means(&train_rows);
    let train_ds = data.impute_with(&train_rows)?;
    let model = train(&train_ds, &subset, settings.kernel, settings.c, fold_seed)?;
    data.imputed_rows(test, &means)
        .iter()
        .zip(test)
        .map(|(row, &i)| Ok((data.labels[i], predict(&model, &model.project(row)?)?.0)))
        .collect()
}

/// Repeated cross-validation with the feature selection and standardisation
/// refit inside every training fold.
pub fn cross_validate(data: &RawDataset, settings: &CvSettings) -> Result<ConfusionReport> {
    if settings.repeats == 0 {
        return Err(Error::Parameter("repeats must be >= 1".into()));
    }
    let n_features = data.n_features();
    let k = settings.selection.n_selected();
    if k == 0 || k > n_features {
        return Err(Error::Parameter(format!("cannot select {k} of {n_features} features")));
    }
    let selection = match &settings.selection {
        FeatureSelection::Leaky { top_k, neighbors } => {
            let ds = data.impute_all()?;
            FeatureSelection::Fixed {
                indices: select_top_k(&relieff_weights(&ds, *neighbors)?, *top_k)?,
            }
        }
        other => other.clone(),
    };

    let plans = fold_plan(&data.labels, settings.scheme, settings.repeats, settings.seed)?;
    let repeats = plans.len();
    let jobs: Vec<(usize, usize, &Vec<usize>)> = plans
        .iter()
        .enumerate()
        .flat_map(|(r, folds)| folds.iter().enumerate().map(move |(f, t)| (r, f, t)))
        .collect();
    let results: Vec<(usize, Vec<(usize, usize)>)> = jobs
        .par_iter()
        .map(|&(r, f, test)| {
            let fold_seed = settings.seed ^ ((r as u64) << 32 | f as u64);
            run_fold(data, test, &selection, settings, fold_seed).map(|p| (r, p))
        })
        .collect::<Result<_>>()?;

    let mut counts = vec![[[0usize; 2]; 2]; repeats];
    for (r, preds) in &results {
        for &(t, p) in preds {
            counts[*r][t][p] += 1;
        }
    }
    Ok(ConfusionReport::from_counts(
        &counts,
        settings.scheme.to_string(),
        k,
        matches!(settings.selection, FeatureSelection::Leaky { .. }),
    ))
}
