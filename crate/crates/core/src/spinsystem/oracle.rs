//! Exact expectations on tiny systems, used to validate the samplers.

use crate::error::{Error, Result};
use crate::geomgraph::GilbertGraph;
use crate::quadrature::gauss_legendre;

use super::measure::SingleSpinMeasure;
use super::profile::InteractionProfile;

/// Largest connected block of interior vertices summed over exhaustively.
pub const MAX_ENUMERATION_VERTICES: usize = 16;

/// Largest number of continuous sites handled by tensor quadrature.
pub const MAX_QUADRATURE_SITES: usize = 3;

/// Interior couplings and boundary fields of a small system.
struct LocalModel {
    vertices: Vec<usize>,
    /// Dense symmetric coupling matrix over `vertices`.
    coupling: Vec<f64>,
    field: Vec<f64>,
}

impl LocalModel {
    fn new(graph: &GilbertGraph, interior: &[bool], profile: &InteractionProfile, boundary: f64) -> Result<Self> {
        if interior.len() != graph.len() {
            return Err(Error::invalid("interior mask must cover every vertex"));
        }
        profile.validate()?;
        let vertices: Vec<usize> = (0..graph.len()).filter(|&x| interior[x]).collect();
        let n = vertices.len();
        let mut index = vec![usize::MAX; graph.len()];
        for (k, &x) in vertices.iter().enumerate() {
            index[x] = k;
        }
        let mut coupling = vec![0.0; n * n];
        let mut field = vec![0.0; n];
        for (k, &x) in vertices.iter().enumerate() {
            for &y in graph.neighbors(x) {
                let y = y as usize;
                let j = profile.value(graph.distance(x, y));
                if interior[y] {
                    coupling[k * n + index[y]] = j;
                } else {
                    field[k] += j * boundary;
                }
            }
        }
        Ok(LocalModel { vertices, coupling, field })
    }

    fn len(&self) -> usize {
        self.vertices.len()
    }

    fn j(&self, a: usize, b: usize) -> f64 {
        self.coupling[a * self.len() + b]
    }

    /// Connected blocks of the interior coupling graph, as local indices.
    fn blocks(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut block = vec![s];
            let mut head = 0;
            while head < block.len() {
                let a = block[head];
                head += 1;
                for b in 0..n {
                    if !seen[b] && self.j(a, b) != 0.0 {
                        seen[b] = true;
                        block.push(b);
                    }
                }
            }
            block.sort_unstable();
            out.push(block);
        }
        out
    }
}

/// Exact Ising expectations over the interior vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingExact {
    /// Interior vertices in increasing order.
    pub vertices: Vec<usize>,
    pub means: Vec<f64>,
    /// `⟨σ_x σ_y⟩` over `vertices`, row-major.
    pub correlations: Vec<f64>,
}

impl IsingExact {
    /// `⟨σ_x⟩` for interior vertex `x`.
    pub fn mean_of(&self, x: usize) -> Option<f64> {
        self.vertices.binary_search(&x).ok().map(|k| self.means[k])
    }

    pub fn correlation(&self, x: usize, y: usize) -> Option<f64> {
        let a = self.vertices.binary_search(&x).ok()?;
        let b = self.vertices.binary_search(&y).ok()?;
        Some(self.correlations[a * self.vertices.len() + b])
    }

    /// Average of `⟨σ_x⟩` over `subset`.
    pub fn magnetization(&self, subset: &[usize]) -> Result<f64> {
        if subset.is_empty() {
            return Err(Error::invalid("magnetization over an empty vertex set"));
        }
        let mut sum = 0.0;
        for &x in subset {
            sum += self.mean_of(x).ok_or_else(|| Error::invalid(format!("vertex {x} is not interior")))?;
        }
        Ok(sum / subset.len() as f64)
    }
}

/// Exact means and pair correlations of the ±1 model by summation over all
/// states of each connected interior block, weights `exp(−βE)`.
///
/// Blocks are independent given the boundary, so only the largest block is
/// limited to [`MAX_ENUMERATION_VERTICES`]. A block that sees no boundary
/// field has all means exactly zero.
pub fn exact_enumeration_ising(
    graph: &GilbertGraph,
    interior: &[bool],
    profile: &InteractionProfile,
    beta: f64,
    boundary: f64,
) -> Result<IsingExact> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::invalid(format!("beta must be non-negative, got {beta}")));
    }
    let model = LocalModel::new(graph, interior, profile, boundary)?;
    let n = model.len();
    if n > 64 * MAX_ENUMERATION_VERTICES {
        return Err(Error::TooLarge { got: n, max: 64 * MAX_ENUMERATION_VERTICES });
    }
    let mut means = vec![0.0; n];
    let mut corr = vec![0.0; n * n];
    for k in 0..n {
        corr[k * n + k] = 1.0;
    }
    let blocks = model.blocks();
    for block in &blocks {
        if block.len() > MAX_ENUMERATION_VERTICES {
            return Err(Error::TooLarge { got: block.len(), max: MAX_ENUMERATION_VERTICES });
        }
        let b = block.len();
        let h: Vec<f64> = block.iter().map(|&k| beta * model.field[k]).collect();
        let jm: Vec<f64> =
            (0..b * b).map(|ab| beta * model.j(block[ab / b], block[ab % b])).collect();
        let log_weight = |state: u32| -> f64 {
            let spin = |i: usize| if state >> i & 1 == 1 { 1.0 } else { -1.0 };
            let mut e = 0.0;
            for i in 0..b {
                let si = spin(i);
                let mut acc = h[i];
                for k in i + 1..b {
                    acc += jm[i * b + k] * spin(k);
                }
                e += si * acc;
            }
            e
        };
        let states = 1u32 << b;
        let max = (0..states).map(log_weight).fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        let mut m = vec![0.0; b];
        let mut c = vec![0.0; b * b];
        for state in 0..states {
            let w = (log_weight(state) - max).exp();
            z += w;
            for i in 0..b {
                let si = if state >> i & 1 == 1 { 1.0 } else { -1.0 };
                m[i] += w * si;
                for k in i + 1..b {
                    let sk = if state >> k & 1 == 1 { 1.0 } else { -1.0 };
                    c[i * b + k] += w * si * sk;
                }
            }
        }
        let free = h.iter().all(|&v| v == 0.0);
        for i in 0..b {
            means[block[i]] = if free { 0.0 } else { m[i] / z };
            for k in i + 1..b {
                let v = c[i * b + k] / z;
                corr[block[i] * n + block[k]] = v;
                corr[block[k] * n + block[i]] = v;
            }
        }
    }
    // Distinct blocks are independent.
    let mut owner = vec![0; n];
    for (bi, block) in blocks.iter().enumerate() {
        for &k in block {
            owner[k] = bi;
        }
    }
    for a in 0..n {
        for b in 0..n {
            if owner[a] != owner[b] {
                corr[a * n + b] = means[a] * means[b];
            }
        }
    }
    Ok(IsingExact { vertices: model.vertices, means, correlations: corr })
}

/// Exact single-site means of a continuous model.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub vertices: Vec<usize>,
    pub means: Vec<f64>,
    /// Nodes per axis at which the doubling converged.
    pub nodes: usize,
}

impl Marginals {
    pub fn mean_of(&self, x: usize) -> Option<f64> {
        self.vertices.iter().position(|&v| v == x).map(|k| self.means[k])
    }
}

/// Means of up to three continuous spins by tensor-product composite
/// Gauss–Legendre quadrature, doubling the panel count until every mean
/// changes by less than `tol`.
pub fn quadrature_marginals(
    graph: &GilbertGraph,
    interior: &[bool],
    measure: &SingleSpinMeasure,
    profile: &InteractionProfile,
    beta: f64,
    boundary: f64,
    tol: f64,
) -> Result<Marginals> {
    if measure.is_atomic() {
        return Err(Error::Unsupported("quadrature needs a continuous single-spin measure".into()));
    }
    measure.validate()?;
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::invalid(format!("beta must be non-negative, got {beta}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let model = LocalModel::new(graph, interior, profile, boundary)?;
    let n = model.len();
    if n > MAX_QUADRATURE_SITES {
        return Err(Error::TooLarge { got: n, max: MAX_QUADRATURE_SITES });
    }
    if n == 0 {
        return Ok(Marginals { vertices: vec![], means: vec![], nodes: 0 });
    }
    let radius = joint_radius(&model, measure, beta)?;
    let field: Vec<f64> = model.field.iter().map(|h| beta * h).collect();
    let coupling: Vec<f64> = model.coupling.iter().map(|j| beta * j).collect();

    let (gx, gw) = gauss_legendre(16);
    let max_panels = match n {
        1 => 256,
        2 => 128,
        _ => 16,
    };
    let mut panels = 4;
    let mut previous: Option<Vec<f64>> = None;
    loop {
        let (t, lw) = composite_nodes(&gx, &gw, panels, radius, measure);
        let means = tensor_means(&t, &lw, &field, &coupling, n);
        if means.iter().any(|m| !m.is_finite()) {
            return Err(Error::Numerical("quadrature produced a non-finite mean".into()));
        }
        if let Some(prev) = &previous {
            if prev.iter().zip(&means).all(|(a, b)| (a - b).abs() <= tol) {
                return Ok(Marginals { vertices: model.vertices, means, nodes: t.len() });
            }
        }
        if panels >= max_panels {
            return Err(Error::Numerical(format!(
                "quadrature did not reach tolerance {tol} with {} nodes per axis",
                t.len()
            )));
        }
        previous = Some(means);
        panels *= 2;
    }
}

/// Half-width of a box outside which the joint density is negligible: the
/// single-site truncation radius under the worst-case tilt from the
/// boundary field and from neighbours held at the radius itself.
fn joint_radius(model: &LocalModel, measure: &SingleSpinMeasure, beta: f64) -> Result<f64> {
    if let SingleSpinMeasure::UniformInterval { half_width } = *measure {
        return Ok(half_width);
    }
    let n = model.len();
    let mut r = measure.truncation_radius(0.0);
    for _ in 0..100 {
        let tilt = (0..n)
            .map(|i| beta * (model.field[i].abs() + (0..n).map(|k| model.j(i, k).abs()).sum::<f64>() * r))
            .fold(0.0, f64::max);
        let next = measure.truncation_radius(tilt);
        if (next - r).abs() <= 1e-9 * next {
            return Ok(next.max(r));
        }
        r = next;
        if !r.is_finite() || r > 1e6 {
            break;
        }
    }
    Err(Error::Numerical("interaction too strong: joint density is not confined".into()))
}

fn composite_nodes(gx: &[f64], gw: &[f64], panels: usize, radius: f64, measure: &SingleSpinMeasure) -> (Vec<f64>, Vec<f64>) {
    let h = 2.0 * radius / panels as f64;
    let mut t = Vec::with_capacity(panels * gx.len());
    let mut lw = Vec::with_capacity(panels * gx.len());
    for p in 0..panels {
        let mid = -radius + (p as f64 + 0.5) * h;
        for (x, w) in gx.iter().zip(gw) {
            let node = mid + 0.5 * h * x;
            t.push(node);
            lw.push((0.5 * h * w).ln() + measure.log_density(node));
        }
    }
    (t, lw)
}

/// `E[σ_i]` under `∏ χ(dσ_i) exp(Σ h_i σ_i + Σ_{i<k} J_ik σ_i σ_k)` on the grid.
fn tensor_means(t: &[f64], lw: &[f64], field: &[f64], coupling: &[f64], n: usize) -> Vec<f64> {
    let m = t.len();
    let total = m.pow(n as u32);
    let exponent = |idx: &[usize]| -> f64 {
        let mut e = 0.0;
        for i in 0..n {
            let si = t[idx[i]];
            e += lw[idx[i]] + field[i] * si;
            for k in i + 1..n {
                e += coupling[i * n + k] * si * t[idx[k]];
            }
        }
        e
    };
    let mut idx = vec![0usize; n];
    let decode = |mut flat: usize, idx: &mut [usize]| {
        for slot in idx.iter_mut() {
            *slot = flat % m;
            flat /= m;
        }
    };
    let mut max = f64::NEG_INFINITY;
    for flat in 0..total {
        decode(flat, &mut idx);
        max = max.max(exponent(&idx));
    }
    let mut z = 0.0;
    let mut sums = vec![0.0; n];
    for flat in 0..total {
        decode(flat, &mut idx);
        let w = (exponent(&idx) - max).exp();
        z += w;
        for i in 0..n {
            sums[i] += w * t[idx[i]];
        }
    }
    sums.iter().map(|s| s / z).collect()
}
