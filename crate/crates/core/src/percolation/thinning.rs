use crate::error::{Error, Result};
use crate::geomgraph::GilbertGraph;
use crate::rng::keyed_uniform;

/// Uniform attached to edge `{i, j}` (`i < j`) under `seed`.
///
/// Thinning keeps an edge iff its uniform is below `q`, so the kept sets are
/// nested in `q` for a fixed seed.
#[inline]
pub fn edge_uniform(seed: u64, i: usize, j: usize) -> f64 {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    keyed_uniform(seed, a as u64, b as u64)
}

/// Independent Bernoulli bond thinning with retention probability `q`.
pub fn bernoulli_thin(graph: &GilbertGraph, q: f64, seed: u64) -> Result<GilbertGraph> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::invalid(format!("retention probability must lie in [0,1], got {q}")));
    }
    Ok(graph.filter_edges(|i, j| edge_uniform(seed, i, j) < q))
}
