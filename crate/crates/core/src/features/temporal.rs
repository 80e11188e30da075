use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::SamplingMeta;

/// Post-stimulus window in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct TimeWindow {
    pub start_ms: f64,
    pub end_ms: f64,
}

impl From<[f64; 2]> for TimeWindow {
    fn from([start_ms, end_ms]: [f64; 2]) -> Self {
        TimeWindow { start_ms, end_ms }
    }
}

impl From<TimeWindow> for [f64; 2] {
    fn from(w: TimeWindow) -> Self {
        [w.start_ms, w.end_ms]
    }
}

impl TimeWindow {
    pub fn new(start_ms: f64, end_ms: f64) -> Self {
        TimeWindow { start_ms, end_ms }
    }

    /// Inclusive sample range `[first, last]` of the samples whose times fall
    /// inside the window.
    pub fn sample_range(&self, meta: &SamplingMeta) -> Result<(usize, usize)> {
        if !(self.start_ms < self.end_ms) || self.start_ms < 0.0 {
            return Err(Error::Parameter(format!(
                "invalid window [{}, {}] ms",
                self.start_ms, self.end_ms
            )));
        }
        if self.end_ms > meta.post_span_ms() + 1e-9 {
            return Err(Error::Parameter(format!(
                "window end {} ms lies past the post-stimulus span {} ms",
                self.end_ms,
                meta.post_span_ms()
            )));
        }
        let first = (self.start_ms * meta.rate_hz / 1000.0 - 1e-9).ceil().max(0.0) as usize;
        let last = (self.end_ms * meta.rate_hz / 1000.0 + 1e-9).floor() as usize;
        if last < first {
            return Err(Error::Parameter(format!(
                "window [{}, {}] ms contains no samples",
                self.start_ms, self.end_ms
            )));
        }
        let pre = meta.pre_stimulus_samples;
        Ok((pre + first, pre + last))
    }

    fn slice<'a>(&self, x: &'a [f64], meta: &SamplingMeta) -> Result<(usize, &'a [f64])> {
        let (a, b) = self.sample_range(meta)?;
        if b >= x.len() {
            return Err(Error::Length(format!(
                "window needs sample {b} but the signal has {}",
                x.len()
            )));
        }
        Ok((a, &x[a..=b]))
    }
}

/// Index of the first maximum.
fn argmax(x: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in x.iter().enumerate() {
        if v > x[best] {
            best = i;
        }
    }
    best
}

/// Time in ms of the largest sample inside the window; earliest on ties.
pub fn latency(lp: &[f64], meta: &SamplingMeta, window: TimeWindow) -> Result<f64> {
    let (offset, w) = window.slice(lp, meta)?;
    Ok(meta.time_ms(offset + argmax(w)))
}

/// `max |x|`.
pub fn abs_amplitude(lp: &[f64]) -> Result<f64> {
    if lp.is_empty() {
        return Err(Error::Parameter("amplitude of an empty sequence".into()));
    }
    Ok(lp.iter().fold(0.0, |m: f64, v| m.max(v.abs())))
}

/// Sum of the positive samples in the window.
pub fn positive_area(lp: &[f64], meta: &SamplingMeta, window: TimeWindow) -> Result<f64> {
    let (_, w) = window.slice(lp, meta)?;
    Ok(w.iter().map(|v| v.max(0.0)).sum())
}

/// Window peak divided by its post-stimulus time in seconds.
pub fn max_peak_ratio(lp: &[f64], meta: &SamplingMeta, window: TimeWindow) -> Result<f64> {
    if window.start_ms <= 0.0 {
        return Err(Error::Parameter(
            "peak-ratio window must start after stimulus onset".into(),
        ));
    }
    let (offset, w) = window.slice(lp, meta)?;
    let i = argmax(w);
    Ok(w[i] / (meta.time_ms(offset + i) / 1000.0))
}

/// `sum x^2`.
pub fn signal_energy(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::Parameter("energy of an empty sequence".into()));
    }
    Ok(x.iter().map(|v| v * v).sum())
}

/// Base-10 entropy of an equal-width histogram spanning `[min, max]`.
pub fn histogram_entropy(x: &[f64], bins: usize) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::Parameter("entropy of an empty sequence".into()));
    }
    if bins == 0 {
        return Err(Error::Parameter("histogram needs at least one bin".into()));
    }
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(hi > lo) {
        return Ok(0.0);
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in x {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let n = x.len() as f64;
    let h = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log10()
        })
        .sum::<f64>();
    Ok(h.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn meta() -> SamplingMeta {
        SamplingMeta::canonical()
    }

    #[test]
    fn window_sample_range() {
        let m = meta();
        assert_eq!(
            TimeWindow::new(100.0, 200.0).sample_range(&m).unwrap(),
            (64 + 26, 64 + 51)
        );
        assert_eq!(
            TimeWindow::new(200.0, 400.0).sample_range(&m).unwrap(),
            (64 + 52, 64 + 102)
        );
        assert!(TimeWindow::new(200.0, 100.0).sample_range(&m).is_err());
        assert!(TimeWindow::new(100.0, 1600.0).sample_range(&m).is_err());
        assert!(TimeWindow::new(1.0, 2.0).sample_range(&m).is_err());
    }

    #[test]
    fn latency_examples() {
        let m = meta();
        let bump: Vec<f64> = (0..448)
            .map(|i| (-(m.time_ms(i) - 150.0).powi(2) / (2.0 * 15.0f64.powi(2))).exp())
            .collect();
        let l = latency(&bump, &m, TimeWindow::new(100.0, 200.0)).unwrap();
        assert!((l - 150.0).abs() <= m.sample_period_ms());

        let ramp: Vec<f64> = (0..448).map(|i| i as f64).collect();
        let l = latency(&ramp, &m, TimeWindow::new(200.0, 400.0)).unwrap();
        assert!((l - 400.0).abs() <= m.sample_period_ms());
        assert_eq!(l, m.time_ms(64 + 102));

        let mut two = vec![0.0; 448];
        let i120 = 64 + (120.0f64 * 0.256).round() as usize;
        let i180 = 64 + (180.0f64 * 0.256).round() as usize;
        two[i120] = 3.0;
        two[i180] = 3.0;
        assert_eq!(
            latency(&two, &m, TimeWindow::new(100.0, 200.0)).unwrap(),
            m.time_ms(i120)
        );
    }

    #[test]
    fn amplitude_examples() {
        let sine: Vec<f64> = (0..64)
            .map(|i| 5.0 * (std::f64::consts::PI * i as f64 / 16.0).sin())
            .collect();
        assert!((abs_amplitude(&sine).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(abs_amplitude(&[0.0; 5]).unwrap(), 0.0);
        assert_eq!(abs_amplitude(&[-7.0, 1.0, 4.0]).unwrap(), 7.0);
        assert!(abs_amplitude(&[]).is_err());
    }

    #[test]
    fn positive_area_examples() {
        let m = meta();
        let w = TimeWindow::new(100.0, 200.0);
        let (a, b) = w.sample_range(&m).unwrap();
        assert_eq!(positive_area(&vec![-1.0; 448], &m, w).unwrap(), 0.0);
        assert_eq!(positive_area(&vec![1.0; 448], &m, w).unwrap(), (b - a + 1) as f64);
        let span = (b - a) as f64;
        let x: Vec<f64> = (0..448)
            .map(|i| {
                if (a..=b).contains(&i) {
                    4.0 * (std::f64::consts::PI * (i - a) as f64 / span).sin()
                } else {
                    -9.0
                }
            })
            .collect();
        let mut oracle = 0.0;
        for v in &x[a..=b] {
            if *v > 0.0 {
                oracle += v;
            }
        }
        assert!((positive_area(&x, &m, w).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn peak_ratio_examples() {
        let m = SamplingMeta::new(1000.0, 100, 900).unwrap();
        let mut x = vec![0.0; 1000];
        x[100 + 200] = 10.0;
        assert!((max_peak_ratio(&x, &m, TimeWindow::new(100.0, 300.0)).unwrap() - 50.0).abs() < 1e-12);
        let mut y = vec![0.0; 1000];
        y[100 + 400] = 10.0;
        assert!((max_peak_ratio(&y, &m, TimeWindow::new(300.0, 500.0)).unwrap() - 25.0).abs() < 1e-12);
        assert_eq!(
            max_peak_ratio(&vec![0.0; 1000], &m, TimeWindow::new(100.0, 200.0)).unwrap(),
            0.0
        );
        assert!(max_peak_ratio(&x, &m, TimeWindow::new(0.0, 200.0)).is_err());
    }

    #[test]
    fn energy_examples() {
        assert_eq!(signal_energy(&[0.0, 1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(signal_energy(&[3.0; 10]).unwrap(), 90.0);
        assert!(signal_energy(&[]).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(histogram_entropy(&[2.5; 40], 16).unwrap(), 0.0);
        let uniform: Vec<f64> = (0..160).map(|i| (i / 10) as f64 + 0.5).collect();
        // 16 equal groups at 0.5, 1.5, ..., 15.5; each lands in its own bin.
        assert!((histogram_entropy(&uniform, 16).unwrap() - 16f64.log10()).abs() < 1e-12);
        assert!(histogram_entropy(&[], 4).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let x: Vec<f64> = (0..1000).map(|_| normal.sample(&mut rng)).collect();
        let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut counts = [0.0f64; 16];
        for v in &x {
            let mut k = 0;
            while k < 15 && *v >= lo + (k + 1) as f64 * (hi - lo) / 16.0 {
                k += 1;
            }
            counts[k] += 1.0;
        }
        let oracle: f64 = counts
            .iter()
            .filter(|c| **c > 0.0)
            .map(|c| -(c / 1000.0) * (c / 1000.0).log10())
            .sum();
        assert!((histogram_entropy(&x, 16).unwrap() - oracle).abs() < 1e-12);
    }
}
