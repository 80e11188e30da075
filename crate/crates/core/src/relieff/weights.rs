use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use super::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::features::FeatureColumn;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub k_neighbors: usize,
}

impl WeightVector {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Features rescaled to [0, 1] by their dataset range; zero-range columns become 0.
fn normalised(ds: &LabeledDataset) -> Vec<Vec<f64>> {
    ds.matrix
        .iter()
        .map(|r| {
            r.iter()
                .zip(&ds.feature_ranges)
                .map(|(&v, &(lo, hi))| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
                .collect()
        })
        .collect()
}

fn manhattan(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// The `k` nearest rows among `candidates`; equal distances go to the lower index.
fn nearest(dist: &[f64], candidates: impl Iterator<Item = usize>, k: usize) -> Vec<usize> {
    let mut c: Vec<usize> = candidates.collect();
    c.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
    c.truncate(k);
    c
}

/// ReliefF weights with `k` hits and `k` misses per target under
/// range-normalised Manhattan distance.
pub fn relieff_weights(ds: &LabeledDataset, k: usize) -> Result<WeightVector> {
    if k == 0 {
        return Err(Error::Parameter("ReliefF needs k >= 1".into()));
    }
    let counts = ds.class_counts();
    if counts[0] == 0 || counts[1] == 0 {
        return Err(Error::Parameter("ReliefF needs both classes".into()));
    }
    if counts.iter().any(|&c| c <= k) {
        return Err(Error::Parameter(format!(
            "ReliefF with k = {k} needs more than {k} samples per class, got {counts:?}"
        )));
    }
    let z = normalised(ds);
    let n = ds.n_samples();
    let d = ds.n_features();
    let per_target: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|t| {
            let dist: Vec<f64> = z.iter().map(|r| manhattan(&z[t], r)).collect();
            let label = ds.labels[t];
            let hits = nearest(&dist, (0..n).filter(|&i| i != t && ds.labels[i] == label), k);
            let misses = nearest(&dist, (0..n).filter(|&i| ds.labels[i] != label), k);
            (0..d)
                .map(|f| {
                    let mh = hits.iter().map(|&h| (z[t][f] - z[h][f]).abs()).sum::<f64>() / k as f64;
                    let mm = misses.iter().map(|&m| (z[t][f] - z[m][f]).abs()).sum::<f64>() / k as f64;
                    mm - mh
                })
                .collect()
        })
        .collect();
    let mut weights = vec![0.0; d];
    for row in &per_target {
        for (w, v) in weights.iter_mut().zip(row) {
            *w += v;
        }
    }
    for (w, &(lo, hi)) in weights.iter_mut().zip(&ds.feature_ranges) {
        *w = if hi > lo { *w / n as f64 } else { 0.0 };
    }
    Ok(WeightVector {
        weights,
        k_neighbors: k,
    })
}

/// Indices of the `k` largest weights, descending; ties go to the lower index.
pub fn select_top_k(w: &WeightVector, k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > w.len() {
        return Err(Error::Parameter(format!("cannot select {k} of {} features", w.len())));
    }
    Ok(ranking(&w.weights).into_iter().take(k).collect())
}

fn ranking(weights: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..weights.len()).collect();
    idx.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    idx
}

/// `feature_index,electrode,feature_name,weight` rows, highest weight first.
pub fn format_weights(w: &WeightVector, columns: &[FeatureColumn]) -> Result<String> {
    if columns.len() != w.len() {
        return Err(Error::Shape(format!(
            "{} weights for {} columns",
            w.len(),
            columns.len()
        )));
    }
    let mut out = format!(
        "# k_neighbors={}\nfeature_index,electrode,feature_name,weight\n",
        w.k_neighbors
    );
    for i in ranking(&w.weights) {
        writeln!(
            out,
            "{i},{},{},{}",
            columns[i].electrode, columns[i].feature, w.weights[i]
        )
        .unwrap();
    }
    Ok(out)
}

/// Inverse of [`format_weights`]: the weight vector in feature-index order plus its columns.
pub fn parse_weights(text: &str, path: &Path) -> Result<(WeightVector, Vec<FeatureColumn>)> {
    let mut k_neighbors = 0;
    let mut entries = Vec::new();
    let mut seen_header = false;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("k_neighbors=") {
                k_neighbors = v.parse().map_err(|_| Error::parse(path, lineno, "bad k_neighbors"))?;
            }
            continue;
        }
        if !seen_header {
            if line != "feature_index,electrode,feature_name,weight" {
                return Err(Error::parse(path, lineno, "expected weights header"));
            }
            seen_header = true;
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 4 {
            return Err(Error::parse(path, lineno, "expected 4 fields"));
        }
        let idx: usize = cells[0]
            .parse()
            .map_err(|_| Error::parse(path, lineno, "bad feature_index"))?;
        let w: f64 = cells[3].parse().map_err(|_| Error::parse(path, lineno, "bad weight"))?;
        entries.push((
            idx,
            FeatureColumn {
                electrode: cells[1].to_string(),
                feature: cells[2].to_string(),
            },
            w,
        ));
    }
    entries.sort_by_key(|e| e.0);
    if entries.iter().enumerate().any(|(i, e)| e.0 != i) {
        return Err(Error::parse(path, 0, "feature indices are not a permutation of 0..n"));
    }
    let weights = entries.iter().map(|e| e.2).collect();
    let columns = entries.into_iter().map(|e| e.1).collect();
    Ok((WeightVector { weights, k_neighbors }, columns))
}
