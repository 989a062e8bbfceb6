//! Summary statistics for Monte Carlo series.

use serde::{Deserialize, Serialize};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the mean for independent samples.
pub fn standard_error(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Batch-means estimate for a correlated series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchMeans {
    pub mean: f64,
    pub se: f64,
    pub batches: usize,
    pub batch_len: usize,
}

/// Split the series into `batches` equal batches (dropping the oldest
/// remainder) and use the spread of batch averages as the error.
pub fn batch_means(xs: &[f64], batches: usize) -> BatchMeans {
    let batches = batches.max(2);
    let len = xs.len() / batches;
    if len == 0 {
        return BatchMeans { mean: mean(xs), se: f64::NAN, batches: 0, batch_len: 0 };
    }
    let skip = xs.len() - len * batches;
    let avgs: Vec<f64> = xs[skip..].chunks_exact(len).map(mean).collect();
    BatchMeans { mean: mean(&xs[skip..]), se: standard_error(&avgs), batches, batch_len: len }
}

/// Integrated autocorrelation time `½ + Σ_{t=1}^{W} ρ(t)` with Sokal's
/// self-consistent window `W ≥ c·τ(W)`, `c = 6`.
pub fn integrated_autocorrelation_time(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 4 {
        return f64::NAN;
    }
    let m = mean(xs);
    let c0 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return 0.5;
    }
    let mut tau = 0.5;
    for t in 1..n {
        let ct = xs[..n - t].iter().zip(&xs[t..]).map(|(a, b)| (a - m) * (b - m)).sum::<f64>() / n as f64;
        tau += ct / c0;
        if t as f64 >= 6.0 * tau {
            break;
        }
    }
    tau.max(0.5)
}
