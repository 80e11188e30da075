//! Daubechies filter construction by spectral factorisation.
//!
//! The squared magnitude response of an orthonormal Daubechies low-pass with
//! `p` vanishing moments is `cos^{2p}(w/2) P(sin^2(w/2))` with
//! `P(y) = sum_{k<p} C(p-1+k, k) y^k`. Each root `y_j` of `P` maps to a pair of
//! reciprocal zeros in `z` via `z + 1/z = 2 - 4 y_j`; keeping the zeros inside
//! the unit circle gives the minimum-phase (classic) filter.

use std::sync::OnceLock;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};

/// Analysis low-pass `h` and its quadrature mirror high-pass
/// `g[k] = (-1)^k h[L-1-k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilterPair {
    pub lowpass: Vec<f64>,
    pub highpass: Vec<f64>,
}

impl WaveletFilterPair {
    /// Orthonormal Daubechies filter with `vanishing_moments` (filter length twice that).
    pub fn daubechies(vanishing_moments: usize) -> Result<Self> {
        if !(1..=10).contains(&vanishing_moments) {
            return Err(Error::Parameter(format!(
                "Daubechies order must be in 1..=10, got {vanishing_moments}"
            )));
        }
        let lowpass = daubechies_lowpass(vanishing_moments);
        Ok(Self::from_lowpass(lowpass))
    }

    /// The db4 pair (8 taps), computed once.
    pub fn db4() -> &'static WaveletFilterPair {
        static DB4: OnceLock<WaveletFilterPair> = OnceLock::new();
        DB4.get_or_init(|| WaveletFilterPair::daubechies(4).expect("db4 is a valid order"))
    }

    pub fn from_lowpass(lowpass: Vec<f64>) -> Self {
        let l = lowpass.len();
        let highpass = (0..l)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * lowpass[l - 1 - k]
            })
            .collect();
        WaveletFilterPair { lowpass, highpass }
    }

    pub fn len(&self) -> usize {
        self.lowpass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass.is_empty()
    }

    /// Checks the coefficient identities an orthonormal pair must satisfy.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let l = self.len();
        if l == 0 || !l.is_multiple_of(2) || self.highpass.len() != l {
            return Err(Error::Parameter("filter pair must have equal, even lengths".into()));
        }
        let sum: f64 = self.lowpass.iter().sum();
        if (sum - std::f64::consts::SQRT_2).abs() > tol {
            return Err(Error::Parameter(format!("low-pass sums to {sum}, expected sqrt(2)")));
        }
        for shift in (0..l).step_by(2) {
            let dot: f64 = (0..l - shift).map(|k| self.lowpass[k] * self.lowpass[k + shift]).sum();
            let want = if shift == 0 { 1.0 } else { 0.0 };
            if (dot - want).abs() > tol {
                return Err(Error::Parameter(format!(
                    "low-pass not orthonormal at shift {shift}: {dot}"
                )));
            }
        }
        Ok(())
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Roots of a polynomial given by ascending coefficients (Durand-Kerner).
fn polynomial_roots(ascending: &[f64]) -> Vec<Complex64> {
    let degree = ascending.len() - 1;
    if degree == 0 {
        return Vec::new();
    }
    let lead = ascending[degree];
    let monic: Vec<Complex64> = ascending.iter().map(|&c| Complex64::new(c / lead, 0.0)).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);

    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..degree).map(|i| seed.powu(i as u32)).collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..degree {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..degree {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    // Polish each root with Newton steps on the original polynomial.
    let deriv: Vec<Complex64> = monic.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect();
    let eval_d = |z: Complex64| deriv.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
    for r in &mut roots {
        for _ in 0..5 {
            let d = eval_d(*r);
            if d.norm() == 0.0 {
                break;
            }
            *r -= eval(*r) / d;
        }
    }
    roots
}

fn daubechies_lowpass(p: usize) -> Vec<f64> {
    let p_coeffs: Vec<f64> = (0..p).map(|k| binomial(p - 1 + k, k)).collect();
    let y_roots = polynomial_roots(&p_coeffs);

    // Polynomial in z, descending powers, starting from (z + 1)^p.
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    let mul_linear = |poly: &[Complex64], root: Complex64| -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            out[i] += c;
            out[i + 1] -= c * root;
        }
        out
    };
    for _ in 0..p {
        poly = mul_linear(&poly, Complex64::new(-1.0, 0.0));
    }
    for y in y_roots {
        let b = Complex64::new(2.0, 0.0) - y * 4.0;
        let disc = (b * b - 4.0).sqrt();
        let z1 = (b + disc) / 2.0;
        let z2 = (b - disc) / 2.0;
        let inside = if z1.norm() < z2.norm() { z1 } else { z2 };
        poly = mul_linear(&poly, inside);
    }
    let mut h: Vec<f64> = poly.iter().map(|c| c.re).collect();
    let scale = std::f64::consts::SQRT_2 / h.iter().sum::<f64>();
    for v in &mut h {
        *v *= scale;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_is_order_one() {
        let pair = WaveletFilterPair::daubechies(1).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((pair.lowpass[0] - r).abs() < 1e-15 && (pair.lowpass[1] - r).abs() < 1e-15);
        assert_eq!(pair.highpass, vec![pair.lowpass[1], -pair.lowpass[0]]);
    }

    #[test]
    fn db4_matches_published_coefficients() {
        // Standard db4 scaling filter as tabulated by common wavelet libraries.
        let table = [
            0.230_377_813_308_896_5,
            0.714_846_570_552_915_4,
            0.630_880_767_929_858_9,
            -0.027_983_769_416_859_85,
            -0.187_034_811_719_093_1,
            0.030_841_381_835_560_76,
            0.032_883_011_666_885_2,
            -0.010_597_401_785_069_03,
        ];
        let db4 = WaveletFilterPair::db4();
        for (a, b) in db4.lowpass.iter().zip(&table) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn db4_invariants_tight() {
        let db4 = WaveletFilterPair::db4();
        db4.validate(1e-12).unwrap();
        // Highpass moments vanish up to degree 3 on a polynomial sampled anywhere.
        let t0 = 17.0;
        for m in 0..4 {
            let s: f64 = db4
                .highpass
                .iter()
                .enumerate()
                .map(|(k, g)| g * (t0 + k as f64).powi(m))
                .sum();
            assert!(s.abs() < 1e-10 * t0.powi(m), "degree {m}: {s}");
        }
    }

    #[test]
    fn all_orders_validate() {
        for p in 1..=10 {
            WaveletFilterPair::daubechies(p).unwrap().validate(1e-10).unwrap();
        }
        assert!(WaveletFilterPair::daubechies(0).is_err());
    }
}
