use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::signal::ClassLabel;

/// Row-normalised confusion percentages, mean and sd over repeats.
/// Indices are `[true][predicted]` with 0 = regular, 1 = dyslexic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionReport {
    pub scheme: String,
    pub n_repeats: usize,
    pub n_features: usize,
    pub leaky_selection: bool,
    pub mean: [[f64; 2]; 2],
    pub sd: [[f64; 2]; 2],
    /// Per-repeat cell percentages.
    pub per_repeat: Vec<[[f64; 2]; 2]>,
    /// Per-repeat raw counts.
    pub per_repeat_counts: Vec<[[usize; 2]; 2]>,
}

impl ConfusionReport {
    pub fn from_counts(counts: &[[[usize; 2]; 2]], scheme: String, n_features: usize, leaky: bool) -> Self {
        let per_repeat: Vec<[[f64; 2]; 2]> = counts
            .iter()
            .map(|c| {
                let mut p = [[0.0; 2]; 2];
                for t in 0..2 {
                    let total = (c[t][0] + c[t][1]) as f64;
                    for q in 0..2 {
                        p[t][q] = if total > 0.0 {
                            100.0 * c[t][q] as f64 / total
                        } else {
                            0.0
                        };
                    }
                }
                p
            })
            .collect();
        let n = per_repeat.len();
        let mut mean = [[0.0; 2]; 2];
        let mut sd = [[0.0; 2]; 2];
        for t in 0..2 {
            for q in 0..2 {
                let m = per_repeat.iter().map(|p| p[t][q]).sum::<f64>() / n as f64;
                mean[t][q] = m;
                sd[t][q] = if n > 1 {
                    (per_repeat.iter().map(|p| (p[t][q] - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
                } else {
                    0.0
                };
            }
        }
        ConfusionReport {
            scheme,
            n_repeats: n,
            n_features,
            leaky_selection: leaky,
            mean,
            sd,
            per_repeat,
            per_repeat_counts: counts.to_vec(),
        }
    }

    /// Mean of the two diagonal cells.
    pub fn mean_diagonal(&self) -> f64 {
        (self.mean[0][0] + self.mean[1][1]) / 2.0
    }

    pub fn cell(&self, truth: ClassLabel, predicted: ClassLabel) -> String {
        let (t, p) = (truth.index(), predicted.index());
        format!("{:.1}%±{:.1}%", self.mean[t][p], self.sd[t][p])
    }

    /// Text table with true classes as rows and predictions as columns.
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "Confusion matrix, best {} features ({}, {} repeat{}, {} selection)",
            self.n_features,
            self.scheme,
            self.n_repeats,
            if self.n_repeats == 1 { "" } else { "s" },
            if self.leaky_selection { "whole-data" } else { "in-fold" }
        )
        .unwrap();
        writeln!(out, "{:<16}{:>20}{:>20}", "", "Predicted regular", "Predicted dyslexic").unwrap();
        for truth in ClassLabel::ALL {
            writeln!(
                out,
                "{:<16}{:>20}{:>20}",
                format!("True {truth}"),
                self.cell(truth, ClassLabel::Regular),
                self.cell(truth, ClassLabel::Dyslexic)
            )
            .unwrap();
        }
        writeln!(out, "Mean diagonal accuracy: {:.1}%", self.mean_diagonal()).unwrap();
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_repeat_has_zero_sd_and_rows_sum_to_100() {
        let r = ConfusionReport::from_counts(&[[[13, 3], [4, 12]]], "stratified 5-fold".into(), 60, false);
        assert_eq!(r.sd, [[0.0; 2]; 2]);
        for t in 0..2 {
            assert!((r.mean[t][0] + r.mean[t][1] - 100.0).abs() < 1e-9);
        }
        assert_eq!(r.cell(ClassLabel::Regular, ClassLabel::Regular), "81.2%±0.0%");
        let text = r.render();
        assert!(text.contains("True regular"));
        assert!(text.contains("75.0%±0.0%"));
    }

    #[test]
    fn sd_is_sample_sd_over_repeats() {
        let r = ConfusionReport::from_counts(&[[[8, 2], [5, 5]], [[6, 4], [5, 5]]], "x".into(), 10, true);
        assert!((r.mean[0][0] - 70.0).abs() < 1e-12);
        assert!((r.sd[0][0] - 200f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.sd[1][1], 0.0);
        let back: ConfusionReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
