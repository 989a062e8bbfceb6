//! Fixed-radius (Gilbert) graphs on point configurations and the weighted
//! degree functionals used to control their sparsity.

use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointprocess::{ball_volume, poisson_weighted_moment, BoundaryMode, BoxWindow, Point, PointConfiguration};

/// Undirected graph joining every pair of points at distance `≤ r_star`.
///
/// Neighbour lists are sorted by vertex index, so every traversal of the graph
/// is reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct GilbertGraph {
    window: BoxWindow,
    positions: Vec<Point>,
    r_star: f64,
    adjacency: Vec<Vec<u32>>,
}

impl GilbertGraph {
    /// Assemble a graph from explicit neighbour lists. Lists are sorted and
    /// checked for symmetry and self-loops.
    pub fn from_adjacency(window: BoxWindow, positions: Vec<Point>, r_star: f64, mut adjacency: Vec<Vec<u32>>) -> Result<Self> {
        if adjacency.len() != positions.len() {
            return Err(Error::invalid("adjacency length differs from vertex count"));
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        for (i, list) in adjacency.iter().enumerate() {
            for &j in list {
                let j = j as usize;
                if j == i {
                    return Err(Error::invalid(format!("self-loop at vertex {i}")));
                }
                if j >= positions.len() || adjacency[j].binary_search(&(i as u32)).is_err() {
                    return Err(Error::invalid(format!("asymmetric edge {i}-{j}")));
                }
            }
        }
        Ok(GilbertGraph { window, positions, r_star, adjacency })
    }

    pub fn window(&self) -> &BoxWindow {
        &self.window
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn r_star(&self) -> f64 {
        self.r_star
    }

    pub fn boundary_mode(&self) -> BoundaryMode {
        self.window.mode()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.adjacency[i]
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adjacency
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().map(move |&j| (i, j as usize)).filter(|&(i, j)| i < j))
    }

    /// Distance between two vertices under the window metric.
    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.window.distance(&self.positions[i], &self.positions[j])
    }

    /// Same vertices, edge set restricted to those `keep` accepts.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, usize) -> bool) -> GilbertGraph {
        let mut adjacency = vec![Vec::new(); self.len()];
        for (i, j) in self.edges() {
            if keep(i, j) {
                adjacency[i].push(j as u32);
                adjacency[j].push(i as u32);
            }
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
        GilbertGraph { window: self.window, positions: self.positions.clone(), r_star: self.r_star, adjacency }
    }

    pub fn write_edges_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# n={}", self.len())?;
        writeln!(w, "# r_star={}", self.r_star)?;
        for (i, j) in self.edges() {
            writeln!(w, "{i},{j}")?;
        }
        Ok(())
    }

    pub fn save_edges(&self, path: &Path) -> Result<()> {
        self.write_edges_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }

    /// Read an edge list written by [`GilbertGraph::write_edges_csv`] against
    /// the point configuration it was built from.
    pub fn read_edges_csv<R: BufRead>(r: R, points: &PointConfiguration, path: &Path) -> Result<Self> {
        let perr = |msg: String| Error::Parse { path: path.to_path_buf(), msg };
        let mut n = None;
        let mut r_star = None;
        let mut adjacency = vec![Vec::new(); points.len()];
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                if let Some((k, v)) = h.trim().split_once('=') {
                    match k.trim() {
                        "n" => n = v.trim().parse::<usize>().ok(),
                        "r_star" => r_star = v.trim().parse::<f64>().ok(),
                        _ => {}
                    }
                }
                continue;
            }
            let (a, b) = line.split_once(',').ok_or_else(|| perr(format!("line {}: expected `i,j`", lineno + 1)))?;
            let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| perr(format!("line {}: bad index `{s}`", lineno + 1)));
            let (i, j) = (parse(a)?, parse(b)?);
            if i >= j || j >= points.len() {
                return Err(perr(format!("line {}: edge {i},{j} violates i<j<n", lineno + 1)));
            }
            adjacency[i].push(j as u32);
            adjacency[j].push(i as u32);
        }
        if n != Some(points.len()) {
            return Err(perr(format!("`# n=` header {n:?} does not match {} points", points.len())));
        }
        let r_star = r_star.ok_or_else(|| perr("missing `# r_star=` header".into()))?;
        GilbertGraph::from_adjacency(points.window, points.points.clone(), r_star, adjacency)
    }
}

fn check_radius(window: &BoxWindow, r_star: f64) -> Result<()> {
    if !(r_star > 0.0 && r_star.is_finite()) {
        return Err(Error::invalid(format!("connection radius must be positive, got {r_star}")));
    }
    if window.mode() == BoundaryMode::Torus && r_star >= 0.5 * window.side() {
        return Err(Error::invalid(format!(
            "connection radius {r_star} must be below half the torus side {}",
            window.side()
        )));
    }
    Ok(())
}

/// Uniform grid of cells with side `≥ r_star` covering the window.
struct CellGrid {
    dim: usize,
    per_axis: usize,
    cell_side: f64,
    origin: f64,
    wrap: bool,
    /// CSR layout: vertices of cell `c` are `members[start[c]..start[c+1]]`.
    start: Vec<usize>,
    members: Vec<u32>,
}

impl CellGrid {
    fn new(window: &BoxWindow, positions: &[Point], r_star: f64) -> Self {
        let dim = window.dim();
        let side = window.side();
        let per_axis = ((side / r_star).floor() as usize).clamp(1, 1 << 10);
        let per_axis = if dim == 3 { per_axis.min(1 << 7) } else { per_axis };
        let cell_side = side / per_axis as f64;
        let mut grid = CellGrid {
            dim,
            per_axis,
            cell_side,
            origin: -0.5 * side,
            wrap: window.mode() == BoundaryMode::Torus,
            start: Vec::new(),
            members: Vec::new(),
        };
        let ncells = per_axis.pow(dim as u32);
        let cells: Vec<usize> = positions.iter().map(|p| grid.cell_of(p)).collect();
        let mut counts = vec![0usize; ncells + 1];
        for &c in &cells {
            counts[c + 1] += 1;
        }
        for c in 0..ncells {
            counts[c + 1] += counts[c];
        }
        let mut fill = counts.clone();
        let mut members = vec![0u32; positions.len()];
        for (i, &c) in cells.iter().enumerate() {
            members[fill[c]] = i as u32;
            fill[c] += 1;
        }
        grid.start = counts;
        grid.members = members;
        grid
    }

    fn axis_index(&self, x: f64) -> usize {
        let k = ((x - self.origin) / self.cell_side).floor();
        (k.max(0.0) as usize).min(self.per_axis - 1)
    }

    fn cell_of(&self, p: &Point) -> usize {
        let mut c = 0;
        for k in (0..self.dim).rev() {
            c = c * self.per_axis + self.axis_index(p[k]);
        }
        c
    }

    /// Indices of the cells adjacent to (and including) the cell holding `p`.
    fn neighbor_cells(&self, p: &Point, out: &mut Vec<usize>) {
        out.clear();
        let m = self.per_axis as isize;
        let mut ranges: [Vec<usize>; 3] = Default::default();
        for k in 0..3 {
            if k >= self.dim {
                ranges[k].push(0);
                continue;
            }
            let c = self.axis_index(p[k]) as isize;
            for dc in -1..=1 {
                let v = c + dc;
                let v = if self.wrap {
                    v.rem_euclid(m)
                } else if (0..m).contains(&v) {
                    v
                } else {
                    continue;
                };
                if !ranges[k].contains(&(v as usize)) {
                    ranges[k].push(v as usize);
                }
            }
        }
        let m = self.per_axis;
        for &z in &ranges[2] {
            for &y in &ranges[1] {
                for &x in &ranges[0] {
                    out.push(x + m * (y + m * z));
                }
            }
        }
    }

    fn cell(&self, c: usize) -> &[u32] {
        &self.members[self.start[c]..self.start[c + 1]]
    }
}

/// Exact fixed-radius graph via a cell list; expected linear time at bounded
/// mean degree. Ties at distance exactly `r_star` are edges.
pub fn build_graph(points: &PointConfiguration, r_star: f64) -> Result<GilbertGraph> {
    let window = points.window;
    check_radius(&window, r_star)?;
    let positions = &points.points;
    let grid = CellGrid::new(&window, positions, r_star);
    let r2 = r_star * r_star;
    let adjacency: Vec<Vec<u32>> = positions
        .par_iter()
        .enumerate()
        .map_init(Vec::new, |cells, (i, p)| {
            grid.neighbor_cells(p, cells);
            let mut list = Vec::new();
            for &c in cells.iter() {
                for &j in grid.cell(c) {
                    if j as usize != i && window.distance_sq(p, &positions[j as usize]) <= r2 {
                        list.push(j);
                    }
                }
            }
            list.sort_unstable();
            list
        })
        .collect();
    Ok(GilbertGraph { window, positions: positions.clone(), r_star, adjacency })
}

/// All-pairs reference construction, O(n²).
pub fn brute_force_graph(points: &PointConfiguration, r_star: f64) -> Result<GilbertGraph> {
    let window = points.window;
    check_radius(&window, r_star)?;
    let n = points.len();
    let r2 = r_star * r_star;
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if window.distance_sq(&points.points[i], &points.points[j]) <= r2 {
                adjacency[i].push(j as u32);
                adjacency[j].push(i as u32);
            }
        }
    }
    for list in adjacency.iter_mut() {
        list.sort_unstable();
    }
    Ok(GilbertGraph { window, positions: points.points.clone(), r_star, adjacency })
}

/// `exp(−α|x|)` with `|x|` measured from the window centre.
#[inline]
pub fn weight(alpha: f64, x: &Point) -> f64 {
    (-alpha * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparsityReport {
    pub alpha: f64,
    pub theta: f64,
    pub a_gamma: f64,
    pub b_gamma: f64,
    pub max_degree: usize,
    pub mean_degree: f64,
}

/// Window-restricted weighted degree sums:
/// `a = Σ_{x∼y} [w(x)+w(y)]·(n(x)n(y))^θ` and `b = Σ_x w(x)`.
pub fn sparsity_functionals(graph: &GilbertGraph, alpha: f64, theta: f64) -> Result<SparsityReport> {
    if !(alpha > 0.0) || !(theta > 0.0) {
        return Err(Error::invalid(format!("alpha and theta must be positive, got {alpha}, {theta}")));
    }
    let w: Vec<f64> = graph.positions.iter().map(|p| weight(alpha, p)).collect();
    let a_gamma = graph
        .edges()
        .map(|(i, j)| (w[i] + w[j]) * ((graph.degree(i) * graph.degree(j)) as f64).powf(theta))
        .sum();
    let b_gamma = w.iter().sum();
    let max_degree = (0..graph.len()).map(|i| graph.degree(i)).max().unwrap_or(0);
    let mean_degree = if graph.is_empty() { 0.0 } else { 2.0 * graph.edge_count() as f64 / graph.len() as f64 };
    Ok(SparsityReport { alpha, theta, a_gamma, b_gamma, max_degree, mean_degree })
}

/// `∫_{ℝ^d} e^{−α|x|} dx`.
pub fn weight_integral(alpha: f64, d: usize) -> Result<f64> {
    use std::f64::consts::PI;
    match d {
        2 => Ok(2.0 * PI / (alpha * alpha)),
        3 => Ok(8.0 * PI / (alpha * alpha * alpha)),
        _ => Err(Error::invalid(format!("unsupported dimension {d}"))),
    }
}

/// Upper bound on the mean of `a_γ(α, θ)`: `ℓ_{2θ+1}(λ V(2r*)) · ∫ e^{−α|x|} dx`.
pub fn expected_a_bound(lambda: f64, alpha: f64, theta: f64, r_star: f64, d: usize) -> Result<f64> {
    if !(lambda > 0.0 && alpha > 0.0 && theta > 0.0 && r_star > 0.0) {
        return Err(Error::invalid("expected_a_bound parameters must be positive"));
    }
    let kappa = lambda * ball_volume(d, 2.0 * r_star)?;
    Ok(poisson_weighted_moment(2.0 * theta + 1.0, kappa, 1e-14)? * weight_integral(alpha, d)?)
}
