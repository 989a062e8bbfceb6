use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::unionfind::UnionFind;
use crate::error::{Error, Result};
use crate::geomgraph::GilbertGraph;
use crate::pointprocess::BoundaryMode;

/// Partition of the vertex set into connected components.
///
/// A component is labelled by its smallest vertex index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentLabeling {
    pub labels: Vec<u32>,
    /// `(label, vertex count)`, sorted by label.
    pub sizes: Vec<(u32, usize)>,
    pub largest_fraction: f64,
    /// Per axis: face-to-face spanning (free boundary) or wrapping (torus).
    pub spanning: Vec<bool>,
}

impl ComponentLabeling {
    pub fn component_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn size_of(&self, label: u32) -> usize {
        self.sizes.binary_search_by_key(&label, |&(l, _)| l).map(|k| self.sizes[k].1).unwrap_or(0)
    }

    /// Label of the largest component; ties go to the smallest label.
    pub fn largest(&self) -> Option<u32> {
        self.sizes.iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0))).map(|&(l, _)| l)
    }

    pub fn spans_any(&self) -> bool {
        self.spanning.iter().any(|&s| s)
    }
}

/// Labels the components of `graph` with union-find, then records spanning
/// (free boundary) or wrapping (torus) along every axis.
pub fn connected_components(graph: &GilbertGraph) -> ComponentLabeling {
    let n = graph.len();
    let mut uf = UnionFind::new(n);
    for (i, j) in graph.edges() {
        uf.union(i, j);
    }
    // Canonical label: smallest vertex index in the component. Vertices are
    // visited in increasing order, so the first one seen for a root is it.
    let mut root_label = vec![u32::MAX; n];
    let mut labels = vec![0u32; n];
    let mut counts = vec![0usize; n];
    for i in 0..n {
        let r = uf.find(i);
        if root_label[r] == u32::MAX {
            root_label[r] = i as u32;
        }
        labels[i] = root_label[r];
        counts[labels[i] as usize] += 1;
    }
    let sizes: Vec<(u32, usize)> =
        counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(l, &c)| (l as u32, c)).collect();
    let largest_fraction = if n == 0 { 0.0 } else { sizes.iter().map(|s| s.1).max().unwrap_or(0) as f64 / n as f64 };
    let mut lab = ComponentLabeling { labels, sizes, largest_fraction, spanning: Vec::new() };
    let dim = graph.window().dim();
    lab.spanning = match graph.boundary_mode() {
        BoundaryMode::Free => (0..dim).map(|axis| spans_free(graph, &lab, axis)).collect(),
        BoundaryMode::Torus => wrapping_axes(graph, &lab),
    };
    lab
}

/// Reference labelling by breadth-first search, same canonical labels.
pub fn bfs_components(graph: &GilbertGraph) -> Vec<u32> {
    let n = graph.len();
    let mut labels = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if labels[s] != u32::MAX {
            continue;
        }
        labels[s] = s as u32;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &w in graph.neighbors(v) {
                if labels[w as usize] == u32::MAX {
                    labels[w as usize] = s as u32;
                    queue.push_back(w as usize);
                }
            }
        }
    }
    labels
}

fn spans_free(graph: &GilbertGraph, labeling: &ComponentLabeling, axis: usize) -> bool {
    let h = 0.5 * graph.window().side();
    let r = graph.r_star();
    let n = graph.len();
    let mut touches_low = vec![false; n];
    for (i, p) in graph.positions().iter().enumerate() {
        if p[axis] <= -h + r {
            touches_low[labeling.labels[i] as usize] = true;
        }
    }
    graph
        .positions()
        .iter()
        .enumerate()
        .any(|(i, p)| p[axis] >= h - r && touches_low[labeling.labels[i] as usize])
}

/// Whether one component joins the low and high faces along `axis`: some
/// vertex within `r*` of the low face and another within `r*` of the high
/// face. Only meaningful for free boundaries; on the torus use [`wraps`].
pub fn spans(graph: &GilbertGraph, labeling: &ComponentLabeling, axis: usize) -> Result<bool> {
    if graph.boundary_mode() == BoundaryMode::Torus {
        return Err(Error::Unsupported("face-to-face spanning on a torus; use wrapping".into()));
    }
    if axis >= graph.window().dim() {
        return Err(Error::invalid(format!("axis {axis} out of range")));
    }
    Ok(spans_free(graph, labeling, axis))
}

/// Whether some component winds around the torus along `axis`.
pub fn wraps(graph: &GilbertGraph, labeling: &ComponentLabeling, axis: usize) -> Result<bool> {
    if graph.boundary_mode() != BoundaryMode::Torus {
        return Err(Error::Unsupported("wrapping needs torus boundary".into()));
    }
    if axis >= graph.window().dim() {
        return Err(Error::invalid(format!("axis {axis} out of range")));
    }
    Ok(wrapping_axes(graph, labeling)[axis])
}

/// Unfolds each component by breadth-first search, assigning every vertex an
/// unwrapped position. A component wraps along an axis when some edge closes
/// a cycle whose unwrapped endpoints differ by a full period on that axis.
fn wrapping_axes(graph: &GilbertGraph, _labeling: &ComponentLabeling) -> Vec<bool> {
    let window = graph.window();
    let dim = window.dim();
    let half = 0.5 * window.side();
    let pos = graph.positions();
    let n = graph.len();
    let mut unwrapped: Vec<Option<[f64; 3]>> = vec![None; n];
    let mut result = vec![false; dim];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if unwrapped[s].is_some() {
            continue;
        }
        unwrapped[s] = Some(pos[s]);
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            let uv = unwrapped[v].unwrap();
            for &w in graph.neighbors(v) {
                let w = w as usize;
                let d = window.displacement(&pos[v], &pos[w]);
                let cand = [uv[0] + d[0], uv[1] + d[1], uv[2] + d[2]];
                match unwrapped[w] {
                    None => {
                        unwrapped[w] = Some(cand);
                        queue.push_back(w);
                    }
                    Some(uw) => {
                        for k in 0..dim {
                            if (uw[k] - cand[k]).abs() > half {
                                result[k] = true;
                            }
                        }
                    }
                }
            }
        }
        if result.iter().all(|&r| r) {
            break;
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geomgraph::{brute_force_graph, build_graph};
    use crate::pointprocess::{sample_poisson, BoxWindow, PointConfiguration};

    fn line_graph(xs: &[f64], side: f64, mode: BoundaryMode) -> GilbertGraph {
        let w = BoxWindow::new(2, side, mode).unwrap();
        let pts = xs.iter().map(|&x| [x, 0.0, 0.0]).collect();
        build_graph(&PointConfiguration::from_points(w, pts, 1.0, 0).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn edgeless_five() {
        let g = line_graph(&[-4.0, -2.0, 0.0, 2.0, 4.0], 10.0, BoundaryMode::Free);
        let c = connected_components(&g);
        assert_eq!(c.component_count(), 5);
        assert!((c.largest_fraction - 0.2).abs() < 1e-15);
    }

    #[test]
    fn path_is_one_component() {
        let g = line_graph(&[0.0, 0.9, 1.8, 2.7], 10.0, BoundaryMode::Free);
        let c = connected_components(&g);
        assert_eq!(c.component_count(), 1);
        assert_eq!(c.labels, vec![0; 4]);
        assert_eq!(c.largest_fraction, 1.0);
    }

    #[test]
    fn spanning_chain() {
        let side = 9.0;
        let xs: Vec<f64> = (0..11).map(|k| -4.5 + 0.9 * k as f64).collect();
        let g = line_graph(&xs, side, BoundaryMode::Free);
        let c = connected_components(&g);
        assert!(spans(&g, &c, 0).unwrap());
        assert!(!spans(&g, &c, 1).unwrap());
        // Breaking the chain in the middle stops spanning.
        let broken: Vec<f64> = xs.iter().copied().filter(|&x| (x - 0.0).abs() > 0.5).collect();
        let g = line_graph(&broken, side, BoundaryMode::Free);
        assert!(!spans(&g, &connected_components(&g), 0).unwrap());
    }

    #[test]
    fn empty_graph_does_not_span() {
        let g = line_graph(&[], 10.0, BoundaryMode::Free);
        let c = connected_components(&g);
        assert!(!spans(&g, &c, 0).unwrap());
        assert_eq!(c.largest_fraction, 0.0);
    }

    #[test]
    fn spans_rejects_torus() {
        let g = line_graph(&[0.0], 10.0, BoundaryMode::Torus);
        let c = connected_components(&g);
        assert!(matches!(spans(&g, &c, 0), Err(Error::Unsupported(_))));
        assert!(wraps(&g, &c, 0).is_ok());
    }

    #[test]
    fn wrapping_ring_versus_seam_crossing_segment() {
        // Closed ring around the torus: wraps.
        let xs: Vec<f64> = (0..12).map(|k| -4.95 + 0.9 * k as f64).filter(|&x| x < 5.0).collect();
        let g = line_graph(&xs, 10.0, BoundaryMode::Torus);
        let c = connected_components(&g);
        assert!(wraps(&g, &c, 0).unwrap());
        assert!(!wraps(&g, &c, 1).unwrap());
        // A short segment that crosses the seam without closing the loop does not.
        let g = line_graph(&[4.2, 4.9, -4.6, -3.8], 10.0, BoundaryMode::Torus);
        let c = connected_components(&g);
        assert_eq!(c.component_count(), 1);
        assert!(!wraps(&g, &c, 0).unwrap());
    }

    #[test]
    fn union_find_matches_bfs() {
        for (k, mode) in [BoundaryMode::Free, BoundaryMode::Torus].into_iter().enumerate() {
            for seed in 0..20u64 {
                let w = BoxWindow::new(2 + (seed as usize % 2), 12.0, mode).unwrap();
                let lambda = if w.dim() == 2 { 1.2 } else { 0.25 };
                let c = sample_poisson(lambda, w, seed * 10 + k as u64).unwrap();
                let g = brute_force_graph(&c, 1.0).unwrap();
                assert_eq!(connected_components(&g).labels, bfs_components(&g));
            }
        }
    }
}
