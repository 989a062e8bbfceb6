//! Cluster structure, bond thinning, and threshold estimation.

mod components;
mod thinning;
pub mod threshold;
mod unionfind;

pub use components::{bfs_components, connected_components, spans, wraps, ComponentLabeling};
pub use thinning::{bernoulli_thin, edge_uniform};
pub use threshold::{
    estimate_lambda_star, estimate_q_star_empirical, ScanSettings, SpanningCurve, ThresholdEstimate, ThresholdParameter,
};
pub use unionfind::UnionFind;

use crate::error::{Error, Result};

/// Sufficient bond probability `λ*/λ` for percolation of the thinned graph.
pub fn compute_q_star_bound(lambda: f64, lambda_star: f64) -> Result<f64> {
    if !(lambda_star > 0.0) {
        return Err(Error::invalid(format!("threshold must be positive, got {lambda_star}")));
    }
    if !(lambda >= lambda_star) {
        return Err(Error::invalid(format!("intensity {lambda} below threshold {lambda_star}")));
    }
    Ok(lambda_star / lambda)
}

/// `[ln(1+q) − ln(1−q)] / 2φ*`: inverse temperature above which the
/// constant-coupling Ising model orders on a graph with bond threshold `q`.
pub fn ising_beta_threshold(q: f64, phi_star: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::invalid(format!("bond probability must lie in (0,1), got {q}")));
    }
    if !(phi_star > 0.0) {
        return Err(Error::invalid(format!("phi_star must be positive, got {phi_star}")));
    }
    Ok((q.ln_1p() - (-q).ln_1p()) / (2.0 * phi_star))
}

/// `a² · [ln(1+q) − ln(1−q)] / 2φ*`.
pub fn beta_star_bound(q: f64, phi_star: f64, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::invalid(format!("a must be positive, got {a}")));
    }
    Ok(a * a * ising_beta_threshold(q, phi_star)?)
}
