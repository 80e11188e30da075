use serde::{Deserialize, Serialize};

use super::filters::WaveletFilterPair;
use crate::error::{Error, Result};

/// How the signal is extended past its ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    /// Circular wrap. Odd-length inputs get their last sample repeated, so a
    /// level of length `n` yields `ceil(n / 2)` coefficients per band.
    #[default]
    Periodic,
    /// Half-sample symmetric reflection; `floor((n + L - 1) / 2)` coefficients.
    Symmetric,
}

impl std::fmt::Display for BoundaryMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundaryMode::Periodic => "periodic",
            BoundaryMode::Symmetric => "symmetric",
        })
    }
}

/// Multilevel coefficients. Index 0 holds level 1.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDecomposition {
    pub approximation: Vec<Vec<f64>>,
    pub detail: Vec<Vec<f64>>,
    pub levels: usize,
    pub original_length: usize,
    pub boundary: BoundaryMode,
    /// Length of the sequence entering each level (`input_lengths[0] == original_length`).
    pub input_lengths: Vec<usize>,
    pub filters: WaveletFilterPair,
}

fn reflect(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let r = i.rem_euclid(period) as usize;
    if r < n {
        r
    } else {
        2 * n - 1 - r
    }
}

fn analyse(x: &[f64], f: &WaveletFilterPair, mode: BoundaryMode) -> (Vec<f64>, Vec<f64>) {
    let l = f.len();
    match mode {
        BoundaryMode::Periodic => {
            let m = x.len() + x.len() % 2;
            let at = |i: usize| if i < x.len() { x[i] } else { x[x.len() - 1] };
            let half = m / 2;
            let mut a = vec![0.0; half];
            let mut d = vec![0.0; half];
            for k in 0..half {
                let (mut sa, mut sd) = (0.0, 0.0);
                for j in 0..l {
                    let v = at((2 * k + j) % m);
                    sa += f.lowpass[j] * v;
                    sd += f.highpass[j] * v;
                }
                a[k] = sa;
                d[k] = sd;
            }
            (a, d)
        }
        BoundaryMode::Symmetric => {
            let n = x.len();
            let out = (n + l - 1) / 2;
            let offset = l as isize - 2;
            let mut a = vec![0.0; out];
            let mut d = vec![0.0; out];
            for i in 0..out {
                let start = 2 * i as isize - offset;
                let (mut sa, mut sd) = (0.0, 0.0);
                for q in 0..l {
                    let v = x[reflect(start + q as isize, n)];
                    sa += f.lowpass[q] * v;
                    sd += f.highpass[q] * v;
                }
                a[i] = sa;
                d[i] = sd;
            }
            (a, d)
        }
    }
}

fn synthesise(a: &[f64], d: &[f64], f: &WaveletFilterPair, mode: BoundaryMode, target_len: usize) -> Vec<f64> {
    let l = f.len();
    match mode {
        BoundaryMode::Periodic => {
            let m = 2 * a.len();
            let mut y = vec![0.0; m];
            for k in 0..a.len() {
                for j in 0..l {
                    y[(2 * k + j) % m] += a[k] * f.lowpass[j] + d[k] * f.highpass[j];
                }
            }
            y.truncate(target_len);
            y
        }
        BoundaryMode::Symmetric => {
            let offset = l as isize - 2;
            let mut y = vec![0.0; target_len];
            for i in 0..a.len() {
                let start = 2 * i as isize - offset;
                for q in 0..l {
                    let o = start + q as isize;
                    if o >= 0 && (o as usize) < target_len {
                        y[o as usize] += a[i] * f.lowpass[q] + d[i] * f.highpass[q];
                    }
                }
            }
            y
        }
    }
}

/// Cascade of filter-and-downsample steps on the approximation branch.
pub fn dwt_decompose(
    signal: &[f64],
    levels: usize,
    filters: &WaveletFilterPair,
    boundary: BoundaryMode,
) -> Result<WaveletDecomposition> {
    if levels == 0 {
        return Err(Error::Parameter("decomposition depth must be >= 1".into()));
    }
    if levels >= usize::BITS as usize || signal.len() < (1usize << levels) {
        return Err(Error::Parameter(format!(
            "signal of {} samples is too short for {levels} levels (needs {})",
            signal.len(),
            1u128 << levels.min(127)
        )));
    }
    let mut approximation = Vec::with_capacity(levels);
    let mut detail = Vec::with_capacity(levels);
    let mut input_lengths = Vec::with_capacity(levels);
    let mut current = signal.to_vec();
    for _ in 0..levels {
        input_lengths.push(current.len());
        let (a, d) = analyse(&current, filters, boundary);
        detail.push(d);
        approximation.push(a.clone());
        current = a;
    }
    Ok(WaveletDecomposition {
        approximation,
        detail,
        levels,
        original_length: signal.len(),
        boundary,
        input_lengths,
        filters: filters.clone(),
    })
}

impl WaveletDecomposition {
    fn invert_from(&self, level: usize, keep_details: bool) -> Vec<f64> {
        let mut current = self.approximation[level - 1].clone();
        for lev in (1..=level).rev() {
            let d = &self.detail[lev - 1];
            let zeros;
            let details: &[f64] = if keep_details {
                d
            } else {
                zeros = vec![0.0; d.len()];
                &zeros
            };
            current = synthesise(
                &current,
                details,
                &self.filters,
                self.boundary,
                self.input_lengths[lev - 1],
            );
        }
        current
    }

    /// Full inverse transform using every coefficient.
    pub fn reconstruct(&self) -> Vec<f64> {
        self.invert_from(self.levels, true)
    }
}

/// Inverse transform of the level-`level` approximation with all details zeroed.
pub fn reconstruct_lp(dec: &WaveletDecomposition, level: usize) -> Result<Vec<f64>> {
    if level == 0 || level > dec.levels {
        return Err(Error::Parameter(format!(
            "reconstruction level {level} outside 1..={}",
            dec.levels
        )));
    }
    Ok(dec.invert_from(level, false))
}

/// Everything the deepest approximation leaves out: `reconstruct() - lp`.
pub fn reconstruct_hp(dec: &WaveletDecomposition) -> Result<Vec<f64>> {
    let lp = reconstruct_lp(dec, dec.levels)?;
    Ok(dec.reconstruct().iter().zip(&lp).map(|(x, l)| x - l).collect())
}

/// LP/HP split of one sequence; `hp` is computed by subtraction so
/// `lp + hp == signal` up to a single rounding.
pub fn split_signal(
    signal: &[f64],
    levels: usize,
    filters: &WaveletFilterPair,
    boundary: BoundaryMode,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let dec = dwt_decompose(signal, levels, filters, boundary)?;
    let lp = reconstruct_lp(&dec, levels)?;
    let hp = signal.iter().zip(&lp).map(|(x, l)| x - l).collect();
    Ok((lp, hp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    fn db4() -> &'static WaveletFilterPair {
        WaveletFilterPair::db4()
    }

    /// Single-level reference: full linear convolution with the time-reversed
    /// filter over a periodically extended signal, then keep every other
    /// output at the alignment that matches a correlation starting at 2k.
    fn oracle_level(x: &[f64], filt: &[f64]) -> Vec<f64> {
        let mut xe = x.to_vec();
        if xe.len() % 2 == 1 {
            xe.push(*x.last().unwrap());
        }
        let m = xe.len();
        let l = filt.len();
        let ext: Vec<f64> = (0..m + l).map(|i| xe[i % m]).collect();
        let rev: Vec<f64> = filt.iter().rev().copied().collect();
        let mut full = vec![0.0; ext.len() + l - 1];
        for (i, &a) in ext.iter().enumerate() {
            for (j, &b) in rev.iter().enumerate() {
                full[i + j] += a * b;
            }
        }
        (0..m / 2).map(|k| full[2 * k + l - 1]).collect()
    }

    #[test]
    fn constant_has_no_detail() {
        for mode in [BoundaryMode::Periodic, BoundaryMode::Symmetric] {
            for levels in 1..=6 {
                let dec = dwt_decompose(&vec![4.2; 448], levels, db4(), mode).unwrap();
                assert!(dec.detail.iter().flatten().all(|d| d.abs() < 1e-10));
            }
        }
    }

    #[test]
    fn cubic_interior_details_vanish() {
        let x: Vec<f64> = (0..256)
            .map(|i| {
                let t = i as f64 / 256.0;
                3.0 * t * t * t - 2.0 * t * t + 0.5 * t - 1.0
            })
            .collect();
        let dec = dwt_decompose(&x, 1, db4(), BoundaryMode::Periodic).unwrap();
        for (k, d) in dec.detail[0].iter().enumerate() {
            if 2 * k + 8 <= x.len() {
                assert!(d.abs() < 1e-8, "detail {k} = {d}");
            }
        }
    }

    #[test]
    fn coefficients_match_direct_convolution_oracle() {
        let x = random(448, 1);
        let dec = dwt_decompose(&x, 5, db4(), BoundaryMode::Periodic).unwrap();
        let mut current = x;
        for lev in 0..5 {
            let a = oracle_level(&current, &db4().lowpass);
            let d = oracle_level(&current, &db4().highpass);
            for (p, q) in a.iter().zip(&dec.approximation[lev]) {
                assert!((p - q).abs() < 1e-10);
            }
            for (p, q) in d.iter().zip(&dec.detail[lev]) {
                assert!((p - q).abs() < 1e-10);
            }
            current = a;
        }
    }

    #[test]
    fn coefficient_counts() {
        let dec = dwt_decompose(&random(100, 2), 5, db4(), BoundaryMode::Periodic).unwrap();
        let counts: Vec<usize> = dec.detail.iter().map(Vec::len).collect();
        assert_eq!(counts, vec![50, 25, 13, 7, 4]);
        let dec = dwt_decompose(&random(100, 2), 2, db4(), BoundaryMode::Symmetric).unwrap();
        assert_eq!(dec.detail[0].len(), 53);
        assert_eq!(dec.detail[1].len(), 30);
    }

    #[test]
    fn too_short_or_bad_level() {
        assert!(matches!(
            dwt_decompose(&[1.0; 31], 5, db4(), BoundaryMode::Periodic),
            Err(Error::Parameter(_))
        ));
        assert!(dwt_decompose(&[1.0; 32], 0, db4(), BoundaryMode::Periodic).is_err());
        let dec = dwt_decompose(&[1.0; 32], 5, db4(), BoundaryMode::Periodic).unwrap();
        assert!(reconstruct_lp(&dec, 6).is_err());
        assert!(reconstruct_lp(&dec, 0).is_err());
    }

    #[test]
    fn perfect_reconstruction_both_modes() {
        for mode in [BoundaryMode::Periodic, BoundaryMode::Symmetric] {
            for &n in &[64usize, 100, 448, 1000, 33] {
                let x = random(n, n as u64);
                let dec = dwt_decompose(&x, 5, db4(), mode).unwrap();
                let y = dec.reconstruct();
                assert_eq!(y.len(), n);
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                let err = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                assert!(err / norm < 1e-12, "{mode} n={n} err={err}");
            }
        }
    }

    fn coefficient_energy(dec: &WaveletDecomposition) -> f64 {
        let details: f64 = dec.detail.iter().flatten().map(|v| v * v).sum();
        let last: f64 = dec.approximation[dec.levels - 1].iter().map(|v| v * v).sum();
        details + last
    }

    #[test]
    fn periodic_energy_is_conserved() {
        for &n in &[64usize, 448, 1024] {
            let x = random(n, 40 + n as u64);
            let dec = dwt_decompose(&x, 5, db4(), BoundaryMode::Periodic).unwrap();
            let e: f64 = x.iter().map(|v| v * v).sum();
            assert!((coefficient_energy(&dec) - e).abs() / e < 1e-8);
        }
    }

    #[test]
    fn circular_shift_keeps_energy() {
        let x = random(448, 77);
        let mut shifted = x.clone();
        shifted.rotate_right(1);
        let a = coefficient_energy(&dwt_decompose(&x, 5, db4(), BoundaryMode::Periodic).unwrap());
        let b = coefficient_energy(&dwt_decompose(&shifted, 5, db4(), BoundaryMode::Periodic).unwrap());
        assert!((a - b).abs() / a < 1e-6);
    }

    #[test]
    fn lp_of_constant_is_constant_and_hp_zero() {
        let dec = dwt_decompose(&vec![-1.5; 448], 5, db4(), BoundaryMode::Periodic).unwrap();
        assert!(reconstruct_lp(&dec, 5).unwrap().iter().all(|v| (v + 1.5).abs() < 1e-10));
        assert!(reconstruct_hp(&dec).unwrap().iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn lp_matches_zeroed_detail_inverse() {
        // Oracle: explicit inverse with zeroed detail arrays, written out level by level.
        let x = random(448, 9);
        let dec = dwt_decompose(&x, 5, db4(), BoundaryMode::Periodic).unwrap();
        let mut zeroed = dec.clone();
        for d in &mut zeroed.detail {
            d.iter_mut().for_each(|v| *v = 0.0);
        }
        let want = zeroed.reconstruct();
        let got = reconstruct_lp(&dec, 5).unwrap();
        for (a, b) in want.iter().zip(&got) {
            assert!((a - b).abs() < 1e-10);
        }
        let hp = reconstruct_hp(&dec).unwrap();
        let full = dec.reconstruct();
        for ((l, h), f) in got.iter().zip(&hp).zip(&full) {
            assert!((l + h - f).abs() < 1e-12);
        }
    }

    #[test]
    fn alternating_signal_lives_in_hp() {
        let x: Vec<f64> = (0..448).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let dec = dwt_decompose(&x, 5, db4(), BoundaryMode::Periodic).unwrap();
        let hp = reconstruct_hp(&dec).unwrap();
        let e_hp: f64 = hp.iter().map(|v| v * v).sum();
        let e_x: f64 = x.iter().map(|v| v * v).sum();
        assert!(e_hp / e_x >= 0.95, "ratio {}", e_hp / e_x);
    }

    #[test]
    fn slow_sinusoid_lives_in_lp() {
        let x: Vec<f64> = (0..448)
            .map(|i| (2.0 * std::f64::consts::PI * 2.0 * i as f64 / 256.0).sin())
            .collect();
        let (lp, _) = split_signal(&x, 5, db4(), BoundaryMode::Periodic).unwrap();
        let e_lp: f64 = lp.iter().map(|v| v * v).sum();
        let e_x: f64 = x.iter().map(|v| v * v).sum();
        assert!(e_lp / e_x >= 0.90, "ratio {}", e_lp / e_x);
    }
}
