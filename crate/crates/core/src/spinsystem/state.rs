use crate::error::{Error, Result};
use crate::geomgraph::{weight, GilbertGraph};
use crate::percolation::connected_components;

use super::measure::SingleSpinMeasure;
use super::profile::InteractionProfile;

/// Interior vertices: those whose coordinates all lie in the box
/// `[−(L/2 − margin), L/2 − margin]^d`. Everything else is collar.
pub fn box_interior(graph: &GilbertGraph, margin: f64) -> Vec<bool> {
    let h = 0.5 * graph.window().side() - margin;
    let d = graph.window().dim();
    graph.positions().iter().map(|p| p[..d].iter().all(|c| c.abs() <= h)).collect()
}

/// Spins on the interior of a graph, with every other vertex pinned to the
/// constant boundary value `s`.
///
/// `sigma` is stored for every vertex; collar entries always equal `s`.
#[derive(Debug, Clone)]
pub struct SpinState<'g> {
    graph: &'g GilbertGraph,
    interior: Vec<bool>,
    sigma: Vec<f64>,
    boundary: f64,
}

impl<'g> SpinState<'g> {
    /// Interior spins initialised to `init`.
    pub fn uniform(graph: &'g GilbertGraph, interior: Vec<bool>, init: f64, boundary: f64) -> Result<Self> {
        let sigma = interior.iter().map(|&i| if i { init } else { boundary }).collect();
        Self::with_spins(graph, interior, sigma, boundary)
    }

    /// `sigma` holds one value per vertex; collar entries are overwritten by `boundary`.
    pub fn with_spins(graph: &'g GilbertGraph, interior: Vec<bool>, mut sigma: Vec<f64>, boundary: f64) -> Result<Self> {
        if interior.len() != graph.len() || sigma.len() != graph.len() {
            return Err(Error::invalid("interior mask and spins must cover every vertex"));
        }
        if !boundary.is_finite() || sigma.iter().any(|s| !s.is_finite()) {
            return Err(Error::invalid("spin values must be finite"));
        }
        for (s, &inside) in sigma.iter_mut().zip(&interior) {
            if !inside {
                *s = boundary;
            }
        }
        Ok(SpinState { graph, interior, sigma, boundary })
    }

    /// Ising states must carry ±1 on every interior vertex.
    pub fn check_against(&self, measure: &SingleSpinMeasure) -> Result<()> {
        if measure.is_atomic() && self.interior_vertices().any(|x| self.sigma[x].abs() != 1.0) {
            return Err(Error::invalid("Ising spins must be ±1"));
        }
        Ok(())
    }

    pub fn graph(&self) -> &'g GilbertGraph {
        self.graph
    }

    pub fn interior(&self) -> &[bool] {
        &self.interior
    }

    pub fn is_interior(&self, x: usize) -> bool {
        self.interior[x]
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.interior.iter().enumerate().filter(|(_, &i)| i).map(|(x, _)| x)
    }

    pub fn boundary(&self) -> f64 {
        self.boundary
    }

    #[inline]
    pub fn spin(&self, x: usize) -> f64 {
        self.sigma[x]
    }

    pub fn spins(&self) -> &[f64] {
        &self.sigma
    }

    /// Sets an interior spin. Collar spins are fixed.
    #[inline]
    pub fn set(&mut self, x: usize, value: f64) {
        debug_assert!(self.interior[x]);
        self.sigma[x] = value;
    }
}

/// Relative energy of the interior: minus the sum of `φ(|x−y|)σ_xσ_y` over
/// interior pairs and of `φ(|x−y|)σ_x s` over interior–collar pairs.
pub fn relative_energy(state: &SpinState<'_>, profile: &InteractionProfile) -> f64 {
    let g = state.graph;
    let mut coupling = 0.0;
    for (x, y) in g.edges() {
        let (ix, iy) = (state.interior[x], state.interior[y]);
        if ix || iy {
            coupling += profile.value(g.distance(x, y)) * state.sigma[x] * state.sigma[y];
        }
    }
    -coupling
}

/// Coefficient of `σ_x` in minus the relative energy.
pub fn local_field(state: &SpinState<'_>, profile: &InteractionProfile, x: usize) -> f64 {
    let g = state.graph;
    g.neighbors(x).iter().map(|&y| profile.value(g.distance(x, y as usize)) * state.sigma[y as usize]).sum()
}

/// Mean spin over `subset`.
pub fn magnetization(state: &SpinState<'_>, subset: &[usize]) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::invalid("magnetization over an empty vertex set"));
    }
    Ok(subset.iter().map(|&x| state.sigma[x]).sum::<f64>() / subset.len() as f64)
}

/// `Σ_{x ∈ interior} σ_x² e^{−α|x|}`.
pub fn temperedness(state: &SpinState<'_>, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    let pos = state.graph.positions();
    Ok(state.interior_vertices().map(|x| state.sigma[x] * state.sigma[x] * weight(alpha, &pos[x])).sum())
}

/// Vertices in the central half-window `[−L/4, L/4]^d`.
pub fn central_vertices(graph: &GilbertGraph, interior: &[bool]) -> Vec<usize> {
    let q = 0.25 * graph.window().side();
    let d = graph.window().dim();
    graph
        .positions()
        .iter()
        .enumerate()
        .filter(|(x, p)| interior[*x] && p[..d].iter().all(|c| c.abs() <= q))
        .map(|(x, _)| x)
        .collect()
}

/// Default magnetization subset: the vertices of the central half-window that
/// belong to the largest component meeting it (ties to the smallest label).
pub fn central_cluster_subset(graph: &GilbertGraph, interior: &[bool]) -> Vec<usize> {
    let central = central_vertices(graph, interior);
    if central.is_empty() {
        return central;
    }
    let lab = connected_components(graph);
    let best = central
        .iter()
        .map(|&x| lab.labels[x])
        .max_by(|&a, &b| lab.size_of(a).cmp(&lab.size_of(b)).then(b.cmp(&a)))
        .expect("non-empty");
    central.into_iter().filter(|&x| lab.labels[x] == best).collect()
}

/// Per-vertex neighbour lists with the interaction strength of every edge,
/// in compressed-row form. Used by the samplers to avoid recomputing
/// distances.
#[derive(Debug, Clone)]
pub struct Couplings {
    start: Vec<usize>,
    neighbor: Vec<u32>,
    strength: Vec<f64>,
}

impl Couplings {
    pub fn new(graph: &GilbertGraph, profile: &InteractionProfile) -> Self {
        let mut start = Vec::with_capacity(graph.len() + 1);
        let mut neighbor = Vec::new();
        let mut strength = Vec::new();
        start.push(0);
        for x in 0..graph.len() {
            for &y in graph.neighbors(x) {
                neighbor.push(y);
                strength.push(profile.value(graph.distance(x, y as usize)));
            }
            start.push(neighbor.len());
        }
        Couplings { start, neighbor, strength }
    }

    #[inline]
    pub fn row(&self, x: usize) -> (&[u32], &[f64]) {
        let r = self.start[x]..self.start[x + 1];
        (&self.neighbor[r.clone()], &self.strength[r])
    }

    #[inline]
    pub fn field(&self, sigma: &[f64], x: usize) -> f64 {
        let (nb, st) = self.row(x);
        nb.iter().zip(st).map(|(&y, &j)| j * sigma[y as usize]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomgraph::build_graph;
    use crate::pointprocess::{BoundaryMode, BoxWindow, PointConfiguration};

    fn graph(points: Vec<[f64; 3]>) -> GilbertGraph {
        let w = BoxWindow::new(2, 10.0, BoundaryMode::Free).unwrap();
        build_graph(&PointConfiguration::from_points(w, points, 1.0, 0).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn energy_cases() {
        let unit = InteractionProfile::constant(1.0, 1.0).unwrap();
        let g = graph(vec![[0.0; 3], [3.0, 0.0, 0.0]]);
        let s = SpinState::uniform(&g, vec![true, true], 1.0, 1.0).unwrap();
        assert_eq!(relative_energy(&s, &unit), 0.0);

        let g = graph(vec![[0.0; 3], [0.5, 0.0, 0.0]]);
        let s = SpinState::uniform(&g, vec![true, true], 1.0, 0.0).unwrap();
        assert_eq!(relative_energy(&s, &unit), -1.0);

        let a = 0.37;
        let s = SpinState::uniform(&g, vec![true, false], 1.0, a).unwrap();
        assert_eq!(relative_energy(&s, &unit), -a);
        // Collar–collar edges do not count.
        let s = SpinState::uniform(&g, vec![false, false], 1.0, a).unwrap();
        assert_eq!(relative_energy(&s, &unit), 0.0);
    }

    #[test]
    fn field_cases() {
        let unit = InteractionProfile::constant(1.0, 1.0).unwrap();
        let g = graph(vec![[0.0; 3]]);
        let s = SpinState::uniform(&g, vec![true], 1.0, 1.0).unwrap();
        assert_eq!(local_field(&s, &unit, 0), 0.0);

        let g = graph(vec![[0.0; 3], [0.5, 0.0, 0.0]]);
        let s = SpinState::with_spins(&g, vec![true, true], vec![1.0, -1.0], 0.0).unwrap();
        assert_eq!(local_field(&s, &unit, 0), -1.0);

        let phi = InteractionProfile::constant(0.8, 1.0).unwrap();
        let g = graph(vec![[0.0; 3], [0.5, 0.0, 0.0], [-0.5, 0.0, 0.0]]);
        let s = SpinState::uniform(&g, vec![true, false, false], 0.0, 1.5).unwrap();
        assert!((local_field(&s, &phi, 0) - 2.0 * 1.5 * 0.8).abs() < 1e-15);
        let c = Couplings::new(&g, &phi);
        assert_eq!(c.field(s.spins(), 0), local_field(&s, &phi, 0));
    }

    #[test]
    fn magnetization_and_temperedness() {
        let g = graph(vec![[0.0; 3], [0.5, 0.0, 0.0], [3.0, 0.0, 0.0], [4.0, 1.0, 0.0]]);
        let s = SpinState::uniform(&g, vec![true; 4], 1.0, 1.0).unwrap();
        assert_eq!(magnetization(&s, &[0, 1, 2, 3]).unwrap(), 1.0);
        let s = SpinState::with_spins(&g, vec![true; 4], vec![1.0, -1.0, 1.0, -1.0], 0.0).unwrap();
        assert_eq!(magnetization(&s, &[0, 1, 2, 3]).unwrap(), 0.0);
        assert!(magnetization(&s, &[]).is_err());

        let zero = SpinState::uniform(&g, vec![true; 4], 0.0, 0.0).unwrap();
        assert_eq!(temperedness(&zero, 1.0).unwrap(), 0.0);
        let single = graph(vec![[0.0; 3]]);
        let two = SpinState::uniform(&single, vec![true], 2.0, 0.0).unwrap();
        assert_eq!(temperedness(&two, 0.3).unwrap(), 4.0);
        let mut prev = f64::INFINITY;
        for alpha in [0.1, 0.5, 1.0, 2.0, 8.0] {
            let t = temperedness(&s, alpha).unwrap();
            assert!(t <= prev);
            prev = t;
        }
    }

    #[test]
    fn subsets() {
        let g = graph(vec![[0.0; 3], [0.5, 0.0, 0.0], [-2.0, 0.0, 0.0], [4.8, 4.8, 0.0]]);
        let interior = box_interior(&g, 1.0);
        assert_eq!(interior, vec![true, true, true, false]);
        assert_eq!(central_vertices(&g, &interior), vec![0, 1, 2]);
        assert_eq!(central_cluster_subset(&g, &interior), vec![0, 1]);
    }
}
