use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::dft_real;

/// One-sided spectrum of a real sequence: bins `k` with `2k < N`, so every
/// frequency is strictly below Nyquist.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub magnitudes: Vec<f64>,
    pub psd: Vec<f64>,
    pub freqs_hz: Vec<f64>,
    pub rate_hz: f64,
    /// Length of the transformed sequence.
    pub n: usize,
}

impl Spectrum {
    /// Builds the one-sided spectrum from a full-length transform `X[0..N)`.
    pub fn from_transform(full: &[Complex64], rate_hz: f64) -> Result<Self> {
        let n = full.len();
        if n == 0 {
            return Err(Error::Parameter("cannot take the spectrum of an empty sequence".into()));
        }
        let bins = n.div_ceil(2);
        let magnitudes: Vec<f64> = full[..bins].iter().map(|c| c.norm()).collect();
        let psd = magnitudes.iter().map(|m| m * m / n as f64).collect();
        let freqs_hz = (0..bins).map(|k| k as f64 * rate_hz / n as f64).collect();
        Ok(Spectrum {
            magnitudes,
            psd,
            freqs_hz,
            rate_hz,
            n,
        })
    }

    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty()
    }

    /// Frequency spacing between bins.
    pub fn resolution_hz(&self) -> f64 {
        self.rate_hz / self.n as f64
    }
}

pub fn periodogram(x: &[f64], rate_hz: f64) -> Result<Spectrum> {
    if x.is_empty() {
        return Err(Error::Parameter("periodogram of an empty sequence".into()));
    }
    Spectrum::from_transform(&dft_real(x), rate_hz)
}

fn total(v: &[f64], what: &str) -> Result<f64> {
    let s: f64 = v.iter().sum();
    if s > 0.0 && s.is_finite() {
        Ok(s)
    } else {
        Err(Error::UndefinedInput(format!("{what} has zero total")))
    }
}

/// Geometric over arithmetic mean of the magnitude bins.
pub fn spectral_flatness(spec: &Spectrum) -> Result<f64> {
    let sum = total(&spec.magnitudes, "magnitude spectrum")?;
    if spec.magnitudes.contains(&0.0) {
        return Ok(0.0);
    }
    let n = spec.len() as f64;
    let log_gm = spec.magnitudes.iter().map(|m| m.ln()).sum::<f64>() / n;
    let sfm = log_gm.exp() / (sum / n);
    Ok(sfm.clamp(0.0, 1.0))
}

/// Smallest bin frequency whose cumulative power reaches `fraction` of the total.
pub fn spectral_rolloff(spec: &Spectrum, fraction: f64) -> Result<f64> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Parameter(format!(
            "rolloff fraction must be in (0, 1), got {fraction}"
        )));
    }
    let sum = total(&spec.psd, "power spectrum")?;
    let target = fraction * sum * (1.0 - 1e-12);
    let mut cum = 0.0;
    for (p, f) in spec.psd.iter().zip(&spec.freqs_hz) {
        cum += p;
        if cum >= target {
            return Ok(*f);
        }
    }
    Ok(*spec.freqs_hz.last().expect("nonempty spectrum"))
}

/// Power-weighted moment `M_n = sum P_i f_i^n`.
pub fn spectral_moment(spec: &Spectrum, order: i32) -> f64 {
    spec.psd
        .iter()
        .zip(&spec.freqs_hz)
        .map(|(p, f)| p * f.powi(order))
        .sum()
}

/// `(sqrt(M2/M0) / (M1/M0), sqrt(M2/M0 - (M1/M0)^2))`.
pub fn spectral_deformation_width(spec: &Spectrum) -> Result<(f64, f64)> {
    let m0 = total(&spec.psd, "power spectrum")?;
    let m1 = spectral_moment(spec, 1);
    let m2 = spectral_moment(spec, 2);
    if m1 <= 0.0 {
        return Err(Error::UndefinedInput("mean frequency is zero".into()));
    }
    let mean = m1 / m0;
    let second = m2 / m0;
    let deformation = second.sqrt() / mean;
    let width = (second - mean * mean).max(0.0).sqrt();
    Ok((deformation, width))
}

/// Magnitude-weighted mean frequency.
pub fn spectral_centroid(spec: &Spectrum) -> Result<f64> {
    let sum = total(&spec.magnitudes, "magnitude spectrum")?;
    let c = spec
        .magnitudes
        .iter()
        .zip(&spec.freqs_hz)
        .map(|(m, f)| m * f)
        .sum::<f64>()
        / sum;
    Ok(c)
}

/// Shannon entropy in bits of the normalised power spectrum.
pub fn spectral_entropy(spec: &Spectrum) -> Result<f64> {
    let sum = total(&spec.psd, "power spectrum")?;
    let h = spec
        .psd
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| {
            let q = p / sum;
            -q * q.log2()
        })
        .sum::<f64>();
    Ok(h.max(0.0))
}

/// Integrated power `sum psd * df` over bins with `lo <= f < hi`.
pub fn band_power(spec: &Spectrum, lo_hz: f64, hi_hz: f64) -> Result<f64> {
    if !(lo_hz >= 0.0 && hi_hz > lo_hz) {
        return Err(Error::Parameter(format!("invalid band [{lo_hz}, {hi_hz}) Hz")));
    }
    let df = spec.resolution_hz();
    Ok(spec
        .psd
        .iter()
        .zip(&spec.freqs_hz)
        .filter(|(_, &f)| f >= lo_hz && f < hi_hz)
        .map(|(p, _)| p * df)
        .sum())
}
