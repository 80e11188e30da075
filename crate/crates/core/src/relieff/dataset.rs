use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Complete (no missing values) two-class subjects × features matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub matrix: Vec<Vec<f64>>,
    /// Class index per row, 0 or 1.
    pub labels: Vec<usize>,
    /// Per-feature `(min, max)` over the rows.
    pub feature_ranges: Vec<(f64, f64)>,
}

fn check_shape(matrix: &[Vec<f64>], labels: &[usize]) -> Result<usize> {
    if matrix.is_empty() {
        return Err(Error::EmptyInput("dataset has no rows"));
    }
    if matrix.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} rows but {} labels",
            matrix.len(),
            labels.len()
        )));
    }
    let d = matrix[0].len();
    if d == 0 {
        return Err(Error::EmptyInput("dataset has no features"));
    }
    if let Some(i) = matrix.iter().position(|r| r.len() != d) {
        return Err(Error::Shape(format!(
            "row {i} has {} features, expected {d}",
            matrix[i].len()
        )));
    }
    if let Some(&l) = labels.iter().find(|&&l| l > 1) {
        return Err(Error::Parameter(format!("class label {l} is not 0 or 1")));
    }
    Ok(d)
}

impl LabeledDataset {
    pub fn new(matrix: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        let d = check_shape(&matrix, &labels)?;
        if matrix.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Parameter(
                "dataset contains missing or non-finite values; impute first".into(),
            ));
        }
        let counts = class_counts(&labels);
        if counts[0] == 0 || counts[1] == 0 {
            return Err(Error::Parameter("dataset must contain both classes".into()));
        }
        let feature_ranges = (0..d)
            .map(|j| {
                matrix.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                    (lo.min(r[j]), hi.max(r[j]))
                })
            })
            .collect();
        Ok(LabeledDataset {
            matrix,
            labels,
            feature_ranges,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.matrix.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_ranges.len()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        class_counts(&self.labels)
    }

    /// Rows at `indices`, in that order.
    pub fn subset_rows(&self, indices: &[usize]) -> Result<Self> {
        Self::new(
            indices.iter().map(|&i| self.matrix[i].clone()).collect(),
            indices.iter().map(|&i| self.labels[i]).collect(),
        )
    }

    /// Columns at `indices`, in that order.
    pub fn select_columns(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&j) = indices.iter().find(|&&j| j >= self.n_features()) {
            return Err(Error::Parameter(format!("feature index {j} out of range")));
        }
        Self::new(
            self.matrix
                .iter()
                .map(|r| indices.iter().map(|&j| r[j]).collect())
                .collect(),
            self.labels.clone(),
        )
    }
}

pub(crate) fn class_counts(labels: &[usize]) -> [usize; 2] {
    let mut c = [0, 0];
    for &l in labels {
        c[l] += 1;
    }
    c
}

/// Two-class table that may still contain NaN missing values.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub matrix: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl RawDataset {
    pub fn new(matrix: Vec<Vec<f64>>, labels: Vec<usize>) -> Result<Self> {
        check_shape(&matrix, &labels)?;
        Ok(RawDataset { matrix, labels })
    }

    /// Every subject must be labelled.
    pub fn from_feature_matrix(m: &FeatureMatrix) -> Result<Self> {
        let labels = m
            .labels
            .iter()
            .zip(&m.subject_ids)
            .map(|(l, id)| {
                l.map(|l| l.index())
                    .ok_or_else(|| Error::Parameter(format!("subject {id} has no class label")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(m.rows.clone(), labels)
    }

    pub fn n_samples(&self) -> usize {
        self.matrix.len()
    }

    pub fn n_features(&self) -> usize {
        self.matrix[0].len()
    }

    /// Column means over the `train` rows, ignoring NaN; an all-missing column gets 0.
    pub fn column_means(&self, train: &[usize]) -> Vec<f64> {
        (0..self.n_features())
            .map(|j| {
                let (sum, n) = train
                    .iter()
                    .map(|&i| self.matrix[i][j])
                    .filter(|v| !v.is_nan())
                    .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
                if n == 0 {
                    0.0
                } else {
                    sum / n as f64
                }
            })
            .collect()
    }

    /// Rows at `rows` with NaN replaced by `means`.
    pub fn imputed_rows(&self, rows: &[usize], means: &[f64]) -> Vec<Vec<f64>> {
        rows.iter()
            .map(|&i| {
                self.matrix[i]
                    .iter()
                    .zip(means)
                    .map(|(&v, &m)| if v.is_nan() { m } else { v })
                    .collect()
            })
            .collect()
    }

    /// Training-row imputation of the `train` rows as a complete dataset.
    pub fn impute_with(&self, train: &[usize]) -> Result<LabeledDataset> {
        let means = self.column_means(train);
        LabeledDataset::new(
            self.imputed_rows(train, &means),
            train.iter().map(|&i| self.labels[i]).collect(),
        )
    }

    /// Imputes using all rows.
    pub fn impute_all(&self) -> Result<LabeledDataset> {
        let all: Vec<usize> = (0..self.n_samples()).collect();
        self.impute_with(&all)
    }
}

impl From<&LabeledDataset> for RawDataset {
    fn from(ds: &LabeledDataset) -> Self {
        RawDataset {
            matrix: ds.matrix.clone(),
            labels: ds.labels.clone(),
        }
    }
}
