use rand::Rng;
use rand_distr::StandardNormal;

use crate::fft::{dft_real, idft_real};

fn white(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn shaped(n: usize, rate_hz: f64, rms: f64, rng: &mut impl Rng, gain: impl Fn(f64) -> f64) -> Vec<f64> {
    if n == 0 || rms == 0.0 {
        return vec![0.0; n];
    }
    let mut spec = dft_real(&white(n, rng));
    for (k, c) in spec.iter_mut().enumerate() {
        let kk = k.min(n - k);
        let f = kk as f64 * rate_hz / n as f64;
        *c *= gain(f);
    }
    let x = idft_real(&spec);
    let cur = (x.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    if cur == 0.0 {
        return vec![0.0; n];
    }
    x.into_iter().map(|v| v * rms / cur).collect()
}

/// 1/f power noise (amplitude ∝ f^-1/2) with zero mean, scaled to `rms`.
pub fn pink_noise(n: usize, rate_hz: f64, rms: f64, rng: &mut impl Rng) -> Vec<f64> {
    shaped(n, rate_hz, rms, rng, |f| if f > 0.0 { 1.0 / f.sqrt() } else { 0.0 })
}

/// White noise restricted to `lo <= f < hi`, scaled to `rms`.
pub fn band_noise(n: usize, rate_hz: f64, lo_hz: f64, hi_hz: f64, rms: f64, rng: &mut impl Rng) -> Vec<f64> {
    shaped(
        n,
        rate_hz,
        rms,
        rng,
        |f| if f >= lo_hz && f < hi_hz { 1.0 } else { 0.0 },
    )
}
