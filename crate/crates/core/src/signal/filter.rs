//! Zero-phase windowed-sinc FIR filtering and decimation.
//!
//! Filters are Hamming-windowed sinc kernels with odd length. Zero phase is
//! obtained by running the kernel forward and backward over the signal, done
//! here as a single convolution with the kernel's autocorrelation (for a
//! symmetric kernel the two are identical away from the padding). Edges are
//! handled with odd (point-reflected) extension so that DC and linear trends do
//! not produce start-up transients.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fft::convolve_full;

/// Hamming window transition-width constant: `transition ~= 3.3 * fs / taps`.
const HAMMING_WIDTH_FACTOR: f64 = 3.3;

/// A symmetric, odd-length FIR kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct FirFilter {
    taps: Vec<f64>,
    rate_hz: f64,
}

impl FirFilter {
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    /// Transition width in Hz of a single pass.
    pub fn transition_hz(&self) -> f64 {
        HAMMING_WIDTH_FACTOR * self.rate_hz / self.taps.len() as f64
    }

    /// Magnitude of the single-pass frequency response at `freq_hz`.
    pub fn magnitude_at(&self, freq_hz: f64) -> f64 {
        let w = 2.0 * PI * freq_hz / self.rate_hz;
        let (mut re, mut im) = (0.0, 0.0);
        for (n, &h) in self.taps.iter().enumerate() {
            re += h * (w * n as f64).cos();
            im -= h * (w * n as f64).sin();
        }
        (re * re + im * im).sqrt()
    }

    /// Magnitude of the forward-backward (zero-phase) response at `freq_hz`.
    pub fn zero_phase_gain_at(&self, freq_hz: f64) -> f64 {
        self.magnitude_at(freq_hz).powi(2)
    }

    /// Low-pass with -6 dB point at `cutoff_hz`.
    pub fn lowpass(rate_hz: f64, cutoff_hz: f64, transition_hz: f64) -> Result<Self> {
        let nyquist = rate_hz / 2.0;
        if !(cutoff_hz > 0.0 && cutoff_hz < nyquist) || !(transition_hz > 0.0) {
            return Err(Error::Parameter(format!(
                "low-pass cutoff {cutoff_hz} Hz must lie in (0, {nyquist}) with positive transition"
            )));
        }
        let n = taps_for_transition(rate_hz, transition_hz);
        let mut taps = windowed_sinc(n, cutoff_hz / rate_hz);
        let dc: f64 = taps.iter().sum();
        for t in &mut taps {
            *t /= dc;
        }
        Ok(FirFilter { taps, rate_hz })
    }

    /// Band-pass passing `[lo_hz, hi_hz]`; `lo_hz == 0` yields a low-pass.
    ///
    /// The transition width follows the usual heuristic (a quarter of the
    /// edge frequency, clamped to [`lo`, 2 Hz] at the low edge and to the
    /// Nyquist gap at the high edge); the narrowest edge sets the length.
    pub fn bandpass(rate_hz: f64, lo_hz: f64, hi_hz: f64) -> Result<Self> {
        let nyquist = rate_hz / 2.0;
        if !(rate_hz.is_finite() && rate_hz > 0.0) {
            return Err(Error::Parameter(format!("rate_hz must be > 0, got {rate_hz}")));
        }
        if !(lo_hz >= 0.0 && lo_hz < hi_hz && hi_hz < nyquist) {
            return Err(Error::Parameter(format!(
                "band edges must satisfy 0 <= lo < hi < {nyquist} Hz, got [{lo_hz}, {hi_hz}]"
            )));
        }
        let hi_trans = (0.25 * hi_hz).max(2.0).min(nyquist - hi_hz);
        let trans = if lo_hz > 0.0 {
            let lo_trans = (0.25 * lo_hz).max(2.0).min(lo_hz);
            lo_trans.min(hi_trans)
        } else {
            hi_trans
        };
        let n = taps_for_transition(rate_hz, trans);
        let actual = HAMMING_WIDTH_FACTOR * rate_hz / n as f64;
        let hi_cut = (hi_hz + actual / 2.0).min(nyquist * 0.999);
        let mut taps = windowed_sinc(n, hi_cut / rate_hz);
        let dc: f64 = taps.iter().sum();
        for t in &mut taps {
            *t /= dc;
        }
        if lo_hz > 0.0 {
            let lo_cut = (lo_hz - actual / 2.0).max(lo_hz / 2.0);
            let mut low = windowed_sinc(n, lo_cut / rate_hz);
            let dc_low: f64 = low.iter().sum();
            for (t, l) in taps.iter_mut().zip(low.iter_mut()) {
                *l /= dc_low;
                *t -= *l;
            }
        }
        Ok(FirFilter { taps, rate_hz })
    }

    /// Zero-phase (forward-backward) application; output has the input length.
    pub fn apply_zero_phase(&self, signal: &[f64]) -> Result<Vec<f64>> {
        let n = signal.len();
        if n <= self.taps.len() {
            return Err(Error::Length(format!(
                "signal of {n} samples is not longer than the {}-tap filter",
                self.taps.len()
            )));
        }
        let pad = self.taps.len() - 1;
        let mut ext = Vec::with_capacity(n + 2 * pad);
        for i in (1..=pad).rev() {
            ext.push(2.0 * signal[0] - signal[i]);
        }
        ext.extend_from_slice(signal);
        for i in 1..=pad {
            ext.push(2.0 * signal[n - 1] - signal[n - 1 - i]);
        }

        let forward_backward = convolve_full(&self.taps, &self.taps);
        let delay = self.taps.len() - 1;
        let full = convolve_full(&ext, &forward_backward);
        Ok(full[pad + delay..pad + delay + n].to_vec())
    }
}

fn taps_for_transition(rate_hz: f64, transition_hz: f64) -> usize {
    let n = (HAMMING_WIDTH_FACTOR * rate_hz / transition_hz).ceil() as usize;
    (n.max(3)) | 1
}

/// Hamming-windowed ideal low-pass of odd length `n`, cutoff as a fraction of fs.
fn windowed_sinc(n: usize, cutoff: f64) -> Vec<f64> {
    let m = (n - 1) as f64;
    let centre = m / 2.0;
    (0..n)
        .map(|i| {
            let t = i as f64 - centre;
            let sinc = if t == 0.0 {
                2.0 * cutoff
            } else {
                (2.0 * PI * cutoff * t).sin() / (PI * t)
            };
            let window = 0.54 - 0.46 * (2.0 * PI * i as f64 / m).cos();
            sinc * window
        })
        .collect()
}

/// Zero-phase band-pass of one channel.
pub fn bandpass_filter(signal: &[f64], rate_hz: f64, lo_hz: f64, hi_hz: f64) -> Result<Vec<f64>> {
    FirFilter::bandpass(rate_hz, lo_hz, hi_hz)?.apply_zero_phase(signal)
}

/// Anti-alias filter used by [`decimate`]: cutoff at 0.4 x the new Nyquist.
pub fn anti_alias_filter(rate_hz: f64, factor: usize) -> Result<FirFilter> {
    let new_nyquist = rate_hz / factor as f64 / 2.0;
    FirFilter::lowpass(rate_hz, 0.4 * new_nyquist, 0.1 * new_nyquist)
}

/// Low-pass then keep every `factor`-th sample starting at index 0.
pub fn decimate(signal: &[f64], rate_hz: f64, factor: usize) -> Result<(Vec<f64>, f64)> {
    if factor == 0 {
        return Err(Error::Parameter("decimation factor must be >= 1".into()));
    }
    if factor == 1 {
        return Ok((signal.to_vec(), rate_hz));
    }
    let filtered = anti_alias_filter(rate_hz, factor)?.apply_zero_phase(signal)?;
    let out = filtered.iter().step_by(factor).copied().collect();
    Ok((out, rate_hz / factor as f64))
}
