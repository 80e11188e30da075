use crate::error::{Error, Result};

/// Fraction of adjacent pairs with opposite signs.
pub fn zero_crossing_rate(hp: &[f64]) -> Result<f64> {
    if hp.len() < 2 {
        return Err(Error::Parameter("zero-crossing rate needs at least 2 samples".into()));
    }
    let crossings = hp.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    Ok(crossings as f64 / (hp.len() - 1) as f64)
}

/// Moments of the spacing between successive local extrema, in samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalStats {
    pub mean: f64,
    pub sd: f64,
    pub skewness: f64,
}

/// Indices where the first difference changes sign. Flat steps are skipped,
/// so a plateau counts once, at its far end.
pub fn extremum_indices(x: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut last_sign = 0.0f64;
    for i in 0..x.len().saturating_sub(1) {
        let d = x[i + 1] - x[i];
        if d == 0.0 {
            continue;
        }
        let s = d.signum();
        if last_sign != 0.0 && s != last_sign {
            out.push(i);
        }
        last_sign = s;
    }
    out
}

/// Mean, population sd and skewness of the inter-extremum intervals.
pub fn derivative_interval_stats(hp: &[f64]) -> Result<IntervalStats> {
    let ext = extremum_indices(hp);
    if ext.len() < 4 {
        return Err(Error::InsufficientStructure(format!(
            "{} local extrema, need at least 4",
            ext.len()
        )));
    }
    let intervals: Vec<f64> = ext.windows(2).map(|w| (w[1] - w[0]) as f64).collect();
    let n = intervals.len() as f64;
    let mean = intervals.iter().sum::<f64>() / n;
    let m2 = intervals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m3 = intervals.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
    let sd = m2.sqrt();
    let skewness = if sd == 0.0 { 0.0 } else { m3 / sd.powi(3) };
    Ok(IntervalStats { mean, sd, skewness })
}
