//! Thin helpers over `rustfft` shared by filtering, spectra and noise synthesis.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Full complex DFT of a real sequence, `X[k] = sum_n x[n] e^{-2 pi i k n / N}`.
pub fn dft_real(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    if buf.is_empty() {
        return buf;
    }
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

/// Inverse DFT, normalised by 1/N, returning the real part.
pub fn idft_real(spectrum: &[Complex64]) -> Vec<f64> {
    let mut buf = spectrum.to_vec();
    if buf.is_empty() {
        return Vec::new();
    }
    let n = buf.len();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.into_iter().map(|c| c.re * scale).collect()
}

/// Linear (full) convolution computed through a zero-padded FFT.
pub fn convolve_full(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    let size = out_len.next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);

    let mut fa = vec![Complex64::new(0.0, 0.0); size];
    let mut fb = vec![Complex64::new(0.0, 0.0); size];
    for (dst, &v) in fa.iter_mut().zip(a) {
        dst.re = v;
    }
    for (dst, &v) in fb.iter_mut().zip(b) {
        dst.re = v;
    }
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / size as f64;
    fa.truncate(out_len);
    fa.into_iter().map(|c| c.re * scale).collect()
}
