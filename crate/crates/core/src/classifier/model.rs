use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relieff::LabeledDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    #[default]
    Linear,
    Gaussian,
}

/// Kernel choice; a Gaussian kernel without `gamma` uses 1 / feature count.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

impl KernelSpec {
    pub fn linear() -> Self {
        KernelSpec {
            kind: KernelKind::Linear,
            gamma: None,
        }
    }

    pub fn gaussian(gamma: f64) -> Self {
        KernelSpec {
            kind: KernelKind::Gaussian,
            gamma: Some(gamma),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::Parameter(format!("gamma must be positive, got {g}")));
            }
        }
        Ok(())
    }

    /// Fills in the default gamma for `n_features`.
    pub fn resolved(&self, n_features: usize) -> Self {
        match self.kind {
            KernelKind::Linear => KernelSpec::linear(),
            KernelKind::Gaussian => KernelSpec::gaussian(self.gamma.unwrap_or(1.0 / n_features.max(1) as f64)),
        }
    }

    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.kind {
            KernelKind::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            KernelKind::Gaussian => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-self.gamma.unwrap_or(1.0) * d2).exp()
            }
        }
    }
}

/// Solver controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Stopping tolerance on the maximal KKT violation.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-3,
            max_iterations: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    /// `alpha_i * y_i` for each retained sample.
    pub support_coefficients: Vec<f64>,
    /// Standardised training rows with nonzero alpha.
    pub support_samples: Vec<Vec<f64>>,
    pub bias: f64,
    pub kernel: KernelSpec,
    pub regularization_c: f64,
    pub feature_subset: Vec<usize>,
    /// Per-feature `(mean, scale)` applied before the kernel.
    pub normalization_stats: Vec<(f64, f64)>,
    pub iterations: usize,
    pub seed: u64,
}

/// Class 1 is the positive side of the decision function.
fn sign_of(label: usize) -> f64 {
    if label == 1 {
        1.0
    } else {
        -1.0
    }
}

fn standardisation(rows: &[Vec<f64>]) -> Vec<(f64, f64)> {
    let n = rows.len() as f64;
    (0..rows[0].len())
        .map(|j| {
            let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            (mean, if sd > 0.0 { sd } else { 1.0 })
        })
        .collect()
}

fn apply_stats(row: &[f64], stats: &[(f64, f64)]) -> Vec<f64> {
    row.iter().zip(stats).map(|(v, (m, s))| (v - m) / s).collect()
}

/// Soft-margin SVM fitted by SMO with second-order working-set selection.
/// `seed` fixes the order in which ties between equally violating samples
/// are resolved.
pub fn train(ds: &LabeledDataset, subset: &[usize], kernel: KernelSpec, c: f64, seed: u64) -> Result<TrainedModel> {
    train_with(ds, subset, kernel, c, seed, SolverOptions::default())
}

pub fn train_with(
    ds: &LabeledDataset,
    subset: &[usize],
    kernel: KernelSpec,
    c: f64,
    seed: u64,
    opts: SolverOptions,
) -> Result<TrainedModel> {
    if subset.is_empty() {
        return Err(Error::Parameter("feature subset is empty".into()));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Parameter(format!("C must be positive, got {c}")));
    }
    kernel.validate()?;
    let counts = ds.class_counts();
    if counts[0] == 0 || counts[1] == 0 {
        return Err(Error::Parameter("training data must contain both classes".into()));
    }
    if let Some(&j) = subset.iter().find(|&&j| j >= ds.n_features()) {
        return Err(Error::Parameter(format!("feature index {j} out of range")));
    }
    let kernel = kernel.resolved(subset.len());
    let raw: Vec<Vec<f64>> = ds
        .matrix
        .iter()
        .map(|r| subset.iter().map(|&j| r[j]).collect())
        .collect();
    let stats = standardisation(&raw);
    let x: Vec<Vec<f64>> = raw.iter().map(|r| apply_stats(r, &stats)).collect();
    let y: Vec<f64> = ds.labels.iter().map(|&l| sign_of(l)).collect();
    let sol = solve_dual(&x, &y, kernel, c, seed, opts)?;

    let mut support_coefficients = Vec::new();
    let mut support_samples = Vec::new();
    for (i, &a) in sol.alpha.iter().enumerate() {
        if a > 0.0 {
            support_coefficients.push(a * y[i]);
            support_samples.push(x[i].clone());
        }
    }
    Ok(TrainedModel {
        support_coefficients,
        support_samples,
        bias: -sol.rho,
        kernel,
        regularization_c: c,
        feature_subset: subset.to_vec(),
        normalization_stats: stats,
        iterations: sol.iterations,
        seed,
    })
}

/// Dual solution `alpha`, offset `rho` and objective value.
#[derive(Debug, Clone)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    pub rho: f64,
    pub objective: f64,
    pub iterations: usize,
}

/// Minimises `0.5 a'Qa - sum a` with `0 <= a <= C`, `y'a = 0`, `Q_ij = y_i y_j K(x_i, x_j)`.
pub fn solve_dual(
    x: &[Vec<f64>],
    y: &[f64],
    kernel: KernelSpec,
    c: f64,
    seed: u64,
    opts: SolverOptions,
) -> Result<DualSolution> {
    const TAU: f64 = 1e-12;
    let n = x.len();
    let k: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| kernel.eval(&x[i], &x[j])).collect())
        .collect();
    let q = |i: usize, j: usize| y[i] * y[j] * k[i][j];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let upper = |a: f64| a >= c;
    let lower = |a: f64| a <= 0.0;
    let mut iterations = 0;
    loop {
        // Maximal violating pair with second-order choice of j.
        let mut gmax = f64::NEG_INFINITY;
        let mut gmax2 = f64::NEG_INFINITY;
        let mut i_sel = None;
        for &t in &order {
            let v = -y[t] * grad[t];
            let in_up = if y[t] > 0.0 { !upper(alpha[t]) } else { !lower(alpha[t]) };
            if in_up && v >= gmax {
                gmax = v;
                i_sel = Some(t);
            }
        }
        let mut j_sel = None;
        if let Some(i) = i_sel {
            let mut best = f64::INFINITY;
            for &t in &order {
                let in_low = if y[t] > 0.0 { !lower(alpha[t]) } else { !upper(alpha[t]) };
                if !in_low {
                    continue;
                }
                let v = y[t] * grad[t];
                gmax2 = gmax2.max(v);
                let diff = gmax + v;
                if diff > 0.0 {
                    let quad = k[i][i] + k[t][t] - 2.0 * k[i][t];
                    let obj = -(diff * diff) / if quad > 0.0 { quad } else { TAU };
                    if obj <= best {
                        best = obj;
                        j_sel = Some(t);
                    }
                }
            }
        }
        let violation = gmax + gmax2;
        let (i, j) = match (i_sel, j_sel) {
            (Some(i), Some(j)) if violation >= opts.tolerance => (i, j),
            _ => break,
        };
        if iterations >= opts.max_iterations {
            return Err(Error::Convergence { iterations, violation });
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let quad = (k[i][i] + k[j][j] + 2.0 * q(i, j)).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (k[i][i] + k[j][j] - 2.0 * q(i, j) * y[i] * y[j]).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = sum;
                }
                if alpha[i] < 0.0 {
                    alpha[i] = 0.0;
                    alpha[j] = sum;
                }
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += q(i, t) * di + q(j, t) * dj;
        }
    }

    // Offset from free variables, or the midpoint of the feasible interval.
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if upper(alpha[t]) {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if lower(alpha[t]) {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            sum_free += yg;
            n_free += 1;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    };
    let objective = 0.5 * (0..n).map(|t| alpha[t] * (grad[t] - 1.0)).sum::<f64>();
    Ok(DualSolution {
        alpha,
        rho,
        objective,
        iterations,
    })
}

impl TrainedModel {
    /// Picks the model's feature subset out of a full-width row.
    pub fn project(&self, full_row: &[f64]) -> Result<Vec<f64>> {
        self.feature_subset
            .iter()
            .map(|&j| {
                full_row
                    .get(j)
                    .copied()
                    .ok_or_else(|| Error::Shape(format!("row has {} features, model needs index {j}", full_row.len())))
            })
            .collect()
    }

    pub fn decision_value(&self, sample: &[f64]) -> Result<f64> {
        if sample.len() != self.feature_subset.len() {
            return Err(Error::Shape(format!(
                "sample has {} features, model expects {}",
                sample.len(),
                self.feature_subset.len()
            )));
        }
        let z = apply_stats(sample, &self.normalization_stats);
        let s: f64 = self
            .support_samples
            .iter()
            .zip(&self.support_coefficients)
            .map(|(sv, a)| a * self.kernel.eval(sv, &z))
            .sum();
        Ok(s + self.bias)
    }
}

/// Class index (1 when the decision value is positive) and the decision value.
pub fn predict(model: &TrainedModel, sample: &[f64]) -> Result<(usize, f64)> {
    let m = model.decision_value(sample)?;
    Ok((usize::from(m > 0.0), m))
}
