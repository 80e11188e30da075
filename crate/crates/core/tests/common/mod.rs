#![allow(dead_code, clippy::needless_range_loop)]

use erpsift::classifier::{cross_validate, ConfusionReport, CvScheme, CvSettings, FeatureSelection, KernelSpec};
use erpsift::features::{FeatureMatrix, FeatureRegistry};
use erpsift::pipeline::{extract_all, preprocess_recording, PreprocessParams};
use erpsift::relieff::RawDataset;
use erpsift::synth::{generate_dataset, SynthConfig};
use erpsift::wavelet::BoundaryMode;

/// Band used for synthetic runs: the full acquisition band, so the planted
/// 20–60 Hz differences survive preprocessing.
pub fn synthetic_preprocess() -> PreprocessParams {
    PreprocessParams {
        band_hi_hz: 100.0,
        ..PreprocessParams::default()
    }
}

pub fn feature_matrix(cfg: &SynthConfig) -> FeatureMatrix {
    let subjects = generate_dataset(cfg).unwrap();
    let params = synthetic_preprocess();
    let erps: Vec<_> = subjects
        .iter()
        .map(|s| {
            preprocess_recording(&s.recording, &params, &s.subject_id, Some(s.label))
                .unwrap()
                .erp
        })
        .collect();
    let vectors = extract_all(&erps, 5, BoundaryMode::Periodic, &FeatureRegistry::default_registry()).unwrap();
    FeatureMatrix::from_vectors(vectors).unwrap()
}

pub fn in_fold_cv(data: &RawDataset, top_k: usize, repeats: usize, seed: u64) -> ConfusionReport {
    cross_validate(
        data,
        &CvSettings {
            scheme: CvScheme::StratifiedKFold { folds: 5 },
            selection: FeatureSelection::InFold { top_k, neighbors: 10 },
            kernel: KernelSpec::linear(),
            c: 1.0,
            repeats,
            seed,
        },
    )
    .unwrap()
}

use rustfft::num_complex::Complex64;

/// O(N^2) DFT straight from the definition.
pub fn naive_dft(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(t, &v)| {
                    let phase = -2.0 * std::f64::consts::PI * ((k * t) % n) as f64 / n as f64;
                    Complex64::from_polar(v, phase)
                })
                .sum()
        })
        .collect()
}

/// ReliefF by exhaustive enumeration: every pairwise distance in raw units
/// scaled per feature by its range, neighbours picked one at a time by a
/// linear scan for the (distance, index) minimum.
pub fn relieff_oracle(x: &[Vec<f64>], y: &[usize], k: usize) -> Vec<f64> {
    let n = x.len();
    let d = x[0].len();
    let range: Vec<f64> = (0..d)
        .map(|f| {
            let hi = x.iter().map(|r| r[f]).fold(f64::NEG_INFINITY, f64::max);
            let lo = x.iter().map(|r| r[f]).fold(f64::INFINITY, f64::min);
            hi - lo
        })
        .collect();
    let diff = |a: usize, b: usize, f: usize| {
        if range[f] > 0.0 {
            (x[a][f] - x[b][f]).abs() / range[f]
        } else {
            0.0
        }
    };
    let dist: Vec<Vec<f64>> = (0..n)
        .map(|a| (0..n).map(|b| (0..d).map(|f| diff(a, b, f)).sum()).collect())
        .collect();
    let pick = |t: usize, same: bool| -> Vec<usize> {
        let mut chosen = Vec::new();
        for _ in 0..k {
            let mut best: Option<usize> = None;
            for i in 0..n {
                if i == t || (y[i] == y[t]) != same || chosen.contains(&i) {
                    continue;
                }
                best = match best {
                    Some(b) if dist[t][b] <= dist[t][i] => Some(b),
                    _ => Some(i),
                };
            }
            chosen.push(best.expect("enough neighbours"));
        }
        chosen
    };
    let mut w = vec![0.0; d];
    for t in 0..n {
        let hits = pick(t, true);
        let misses = pick(t, false);
        for f in 0..d {
            let h: f64 = hits.iter().map(|&i| diff(t, i, f)).sum::<f64>() / k as f64;
            let m: f64 = misses.iter().map(|&i| diff(t, i, f)).sum::<f64>() / k as f64;
            w[f] += (m - h) / n as f64;
        }
    }
    w
}
