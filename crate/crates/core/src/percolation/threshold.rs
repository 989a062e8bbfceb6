//! Finite-size-scaling estimates of percolation thresholds.
//!
//! For each system size the spanning probability is measured on a parameter
//! grid, a logistic curve is fitted by maximum likelihood, and the threshold
//! is read off where the fitted curves of consecutive sizes intersect. The
//! confidence interval comes from a parametric bootstrap of the per-cell
//! spanning counts.

use std::fmt::Write as _;

use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::components::connected_components;
use super::thinning::bernoulli_thin;
use crate::error::{Error, Result};
use crate::geomgraph::build_graph;
use crate::pointprocess::{sample_poisson, BoundaryMode, BoxWindow};
use crate::rng::{self, derive_seed, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdParameter {
    #[serde(rename = "lambda")]
    Intensity,
    #[serde(rename = "q")]
    BondProbability,
}

impl ThresholdParameter {
    pub fn name(self) -> &'static str {
        match self {
            ThresholdParameter::Intensity => "lambda",
            ThresholdParameter::BondProbability => "q",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub param: f64,
    pub spanning: usize,
    pub replicates: usize,
    /// Spanning probability after isotonic (non-decreasing) regression.
    pub monotone_prob: f64,
}

impl CurvePoint {
    pub fn prob(&self) -> f64 {
        self.spanning as f64 / self.replicates as f64
    }

    pub fn se(&self) -> f64 {
        let p = self.prob();
        (p * (1.0 - p) / self.replicates as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanningCurve {
    pub size: f64,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub parameter: ThresholdParameter,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Crossing of each consecutive pair of sizes.
    pub pair_crossings: Vec<f64>,
    pub curves: Vec<SpanningCurve>,
    pub seed: u64,
    pub grid: Vec<f64>,
}

impl ThresholdEstimate {
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "L,param,spanning_prob,replicates,se")?;
        for c in &self.curves {
            for p in &c.points {
                writeln!(w, "{},{},{},{},{}", c.size, p.param, p.prob(), p.replicates, p.se())?;
            }
        }
        Ok(())
    }

    /// `{parameter, estimate, ci_low, ci_high, seeds, grid}` plus the curves.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "parameter": self.parameter.name(),
            "estimate": self.estimate,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "seeds": [self.seed],
            "grid": self.grid,
            "sizes": self.curves.iter().map(|c| c.size).collect::<Vec<_>>(),
            "pair_crossings": self.pair_crossings,
            "curves": self.curves,
        })
    }
}

/// Scan settings shared by both estimators.
#[derive(Debug, Clone)]
pub struct ScanSettings {
    pub sizes: Vec<f64>,
    pub grid: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    pub bootstrap: usize,
    /// Spanning axis (free boundary, face to face).
    pub axis: usize,
}

impl ScanSettings {
    pub fn new(sizes: Vec<f64>, grid: Vec<f64>, replicates: usize, seed: u64) -> Self {
        ScanSettings { sizes, grid, replicates, seed, bootstrap: 400, axis: 0 }
    }

    fn validate(&self) -> Result<()> {
        if self.sizes.len() < 2 {
            return Err(Error::invalid("threshold estimation needs at least two system sizes"));
        }
        if self.sizes.windows(2).any(|w| !(w[1] > w[0])) || !(self.sizes[0] > 0.0) {
            return Err(Error::invalid("system sizes must be positive and strictly increasing"));
        }
        if self.grid.len() < 3 || self.grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("parameter grid must hold ≥3 strictly increasing values"));
        }
        if self.replicates == 0 {
            return Err(Error::invalid("replicates must be ≥ 1"));
        }
        Ok(())
    }
}

/// Pool-adjacent-violators fit of a non-decreasing sequence, weighted.
pub fn isotonic(values: &[f64], weights: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, f64, usize)> = Vec::new();
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((v, w, 1));
        while blocks.len() > 1 {
            let (v2, w2, n2) = blocks[blocks.len() - 1];
            let (v1, w1, n1) = blocks[blocks.len() - 2];
            if v1 <= v2 {
                break;
            }
            blocks.pop();
            let wt = w1 + w2;
            let merged = if wt > 0.0 { (v1 * w1 + v2 * w2) / wt } else { 0.5 * (v1 + v2) };
            *blocks.last_mut().unwrap() = (merged, wt, n1 + n2);
        }
    }
    blocks.into_iter().flat_map(|(v, _, n)| std::iter::repeat_n(v, n)).collect()
}

/// `logit p = b0 + b1·x`, fitted by Newton–Raphson on binomial counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticFit {
    pub intercept: f64,
    pub slope: f64,
}

impl LogisticFit {
    pub fn prob(&self, x: f64) -> f64 {
        1.0 / (1.0 + (-(self.intercept + self.slope * x)).exp())
    }

    /// Parameter value where the fitted probability is one half.
    pub fn midpoint(&self) -> f64 {
        -self.intercept / self.slope
    }
}

/// Pseudo-count added to both outcomes of every cell; keeps the fit finite
/// when a curve is perfectly separated on the grid.
const PSEUDO: f64 = 0.1;

pub fn fit_logistic(xs: &[f64], successes: &[f64], trials: &[f64]) -> Result<LogisticFit> {
    // Centre and scale x for conditioning.
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let scale = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt().max(f64::MIN_POSITIVE);
    let z: Vec<f64> = xs.iter().map(|x| (x - mean) / scale).collect();
    let (mut b0, mut b1) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let (mut g0, mut g1, mut h00, mut h01, mut h11) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for ((&zi, &k), &m) in z.iter().zip(successes).zip(trials) {
            let k = k + PSEUDO;
            let m = m + 2.0 * PSEUDO;
            let p = 1.0 / (1.0 + (-(b0 + b1 * zi)).exp());
            let r = k - m * p;
            let w = m * p * (1.0 - p);
            g0 += r;
            g1 += r * zi;
            h00 += w;
            h01 += w * zi;
            h11 += w * zi * zi;
        }
        let det = h00 * h11 - h01 * h01;
        if !(det > 0.0) {
            return Err(Error::Numerical("singular logistic Hessian".into()));
        }
        let d0 = (h11 * g0 - h01 * g1) / det;
        let d1 = (h00 * g1 - h01 * g0) / det;
        // Damped step keeps Newton inside the basin for steep curves.
        let step = (d0.abs().max(d1.abs()) / 5.0).max(1.0);
        b0 += d0 / step;
        b1 += d1 / step;
        if d0.abs().max(d1.abs()) < 1e-12 {
            return Ok(LogisticFit { intercept: b0 - b1 * mean / scale, slope: b1 / scale });
        }
    }
    Err(Error::Numerical("logistic fit did not converge".into()))
}

/// Intersection of two logistic curves, or `None` if they are parallel.
pub fn crossing(a: &LogisticFit, b: &LogisticFit) -> Option<f64> {
    let ds = a.slope - b.slope;
    if ds.abs() < 1e-12 * a.slope.abs().max(b.slope.abs()) {
        return None;
    }
    Some((b.intercept - a.intercept) / ds)
}

fn format_curves(curves: &[SpanningCurve]) -> String {
    let mut s = String::from("L,param,spanning_prob,replicates\n");
    for c in curves {
        for p in &c.points {
            let _ = writeln!(s, "{},{},{:.4},{}", c.size, p.param, p.prob(), p.replicates);
        }
    }
    s
}

/// Mean of the consecutive-size crossings; errors when any crossing falls
/// outside the scanned grid.
fn crossing_estimate(grid: &[f64], counts: &[Vec<f64>], trials: &[Vec<f64>]) -> Option<(f64, Vec<f64>)> {
    let fits: Vec<LogisticFit> =
        counts.iter().zip(trials).map(|(k, m)| fit_logistic(grid, k, m).ok()).collect::<Option<_>>()?;
    if fits.iter().any(|f| !(f.slope > 0.0)) {
        return None;
    }
    let (lo, hi) = (grid[0], grid[grid.len() - 1]);
    let mut xs = Vec::with_capacity(fits.len() - 1);
    for w in fits.windows(2) {
        let x = crossing(&w[0], &w[1])?;
        if !(lo..=hi).contains(&x) {
            return None;
        }
        xs.push(x);
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    Some((mean, xs))
}

/// Turns per-cell spanning counts into an estimate with bootstrap interval.
pub fn estimate_from_counts(
    parameter: ThresholdParameter,
    settings: &ScanSettings,
    spanning: &[Vec<usize>],
) -> Result<ThresholdEstimate> {
    let grid = &settings.grid;
    let reps = settings.replicates;
    let curves: Vec<SpanningCurve> = settings
        .sizes
        .iter()
        .zip(spanning)
        .map(|(&size, row)| {
            let probs: Vec<f64> = row.iter().map(|&k| k as f64 / reps as f64).collect();
            let mono = isotonic(&probs, &vec![reps as f64; probs.len()]);
            let points = grid
                .iter()
                .zip(row)
                .zip(mono)
                .map(|((&param, &k), m)| CurvePoint { param, spanning: k, replicates: reps, monotone_prob: m })
                .collect();
            SpanningCurve { size, points }
        })
        .collect();
    let counts: Vec<Vec<f64>> = spanning.iter().map(|r| r.iter().map(|&k| k as f64).collect()).collect();
    let trials: Vec<Vec<f64>> = spanning.iter().map(|r| vec![reps as f64; r.len()]).collect();
    let Some((estimate, pair_crossings)) = crossing_estimate(grid, &counts, &trials) else {
        return Err(Error::NoCrossing { curves: format_curves(&curves) });
    };

    let boot: Vec<f64> = (0..settings.bootstrap)
        .into_par_iter()
        .filter_map(|b| {
            let mut rng = rng::stream(settings.seed, Purpose::Bootstrap, b as u64);
            let resampled: Vec<Vec<f64>> = spanning
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|&k| {
                            let p = k as f64 / reps as f64;
                            Binomial::new(reps as u64, p).expect("valid binomial").sample(&mut rng) as f64
                        })
                        .collect()
                })
                .collect();
            crossing_estimate(grid, &resampled, &trials).map(|(x, _)| x)
        })
        .collect();
    let (ci_low, ci_high) = if boot.len() >= 10 {
        let mut sorted = boot;
        sorted.sort_by(f64::total_cmp);
        (quantile(&sorted, 0.025).min(estimate), quantile(&sorted, 0.975).max(estimate))
    } else {
        (f64::NEG_INFINITY, f64::INFINITY)
    };
    Ok(ThresholdEstimate {
        parameter,
        estimate,
        ci_low,
        ci_high,
        pair_crossings,
        curves,
        seed: settings.seed,
        grid: grid.clone(),
    })
}

/// Linear-interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Seed of the configuration used by replicate `rep` of size `size_idx` at
/// grid cell `cell` (pass `cell = 0` when configurations are shared across the
/// grid, as in the bond scan).
pub fn replicate_seed(master: u64, size_idx: usize, cell: usize, rep: usize) -> u64 {
    derive_seed(derive_seed(derive_seed(master, size_idx as u64), cell as u64), rep as u64)
}

/// Spanning counts of free-boundary Poisson–Gilbert graphs over an intensity grid.
pub fn scan_intensity(r_star: f64, d: usize, settings: &ScanSettings) -> Result<Vec<Vec<usize>>> {
    let windows: Vec<BoxWindow> =
        settings.sizes.iter().map(|&l| BoxWindow::new(d, l, BoundaryMode::Free)).collect::<Result<_>>()?;
    let ng = settings.grid.len();
    let reps = settings.replicates;
    let tasks: Vec<(usize, usize, usize)> = (0..windows.len())
        .flat_map(|s| (0..ng).flat_map(move |g| (0..reps).map(move |r| (s, g, r))))
        .collect();
    let flags: Vec<bool> = tasks
        .par_iter()
        .map(|&(s, g, r)| -> Result<bool> {
            let cfg = sample_poisson(settings.grid[g], windows[s], replicate_seed(settings.seed, s, g, r))?;
            let graph = build_graph(&cfg, r_star)?;
            Ok(connected_components(&graph).spanning[settings.axis])
        })
        .collect::<Result<_>>()?;
    Ok(tally(&flags, windows.len(), ng, reps))
}

/// Spanning counts of Bernoulli-thinned graphs over a retention grid at fixed
/// intensity. Each replicate reuses one configuration and one edge-coin seed
/// for every `q`, so the thinned graphs are nested in `q`.
pub fn scan_bond(lambda: f64, r_star: f64, d: usize, settings: &ScanSettings) -> Result<Vec<Vec<usize>>> {
    let windows: Vec<BoxWindow> =
        settings.sizes.iter().map(|&l| BoxWindow::new(d, l, BoundaryMode::Free)).collect::<Result<_>>()?;
    let ng = settings.grid.len();
    let reps = settings.replicates;
    let tasks: Vec<(usize, usize)> = (0..windows.len()).flat_map(|s| (0..reps).map(move |r| (s, r))).collect();
    let rows: Vec<Vec<bool>> = tasks
        .par_iter()
        .map(|&(s, r)| -> Result<Vec<bool>> {
            let seed = replicate_seed(settings.seed, s, 0, r);
            let graph = build_graph(&sample_poisson(lambda, windows[s], seed)?, r_star)?;
            let coin_seed = derive_seed(seed, Purpose::Thinning as u64);
            settings
                .grid
                .iter()
                .map(|&q| {
                    let thinned = bernoulli_thin(&graph, q, coin_seed)?;
                    Ok(connected_components(&thinned).spanning[settings.axis])
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut counts = vec![vec![0usize; ng]; windows.len()];
    for (&(s, _), row) in tasks.iter().zip(&rows) {
        for (g, &f) in row.iter().enumerate() {
            counts[s][g] += f as usize;
        }
    }
    Ok(counts)
}

fn tally(flags: &[bool], nsizes: usize, ng: usize, reps: usize) -> Vec<Vec<usize>> {
    let mut counts = vec![vec![0usize; ng]; nsizes];
    for (t, &f) in flags.iter().enumerate() {
        let s = t / (ng * reps);
        let g = (t / reps) % ng;
        counts[s][g] += f as usize;
    }
    counts
}

/// Continuum threshold `λ*` from the crossing of spanning curves.
pub fn estimate_lambda_star(r_star: f64, d: usize, settings: &ScanSettings) -> Result<ThresholdEstimate> {
    settings.validate()?;
    if settings.grid[0] <= 0.0 {
        return Err(Error::invalid("intensity grid must be positive"));
    }
    let counts = scan_intensity(r_star, d, settings)?;
    estimate_from_counts(ThresholdParameter::Intensity, settings, &counts)
}

/// Empirical bond threshold `q*` at fixed intensity.
pub fn estimate_q_star_empirical(lambda: f64, r_star: f64, d: usize, settings: &ScanSettings) -> Result<ThresholdEstimate> {
    settings.validate()?;
    if settings.grid[0] < 0.0 || settings.grid[settings.grid.len() - 1] > 1.0 {
        return Err(Error::invalid("retention grid must lie in [0,1]"));
    }
    let counts = scan_bond(lambda, r_star, d, settings)?;
    estimate_from_counts(ThresholdParameter::BondProbability, settings, &counts)
}
