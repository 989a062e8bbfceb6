use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::geomgraph::{build_graph, GilbertGraph};
use crate::percolation::{beta_star_bound, compute_q_star_bound, estimate_lambda_star, ScanSettings};
use crate::pointprocess::{ball_volume, sample_poisson, PointConfiguration};
use crate::rng::{derive_seed, Purpose};
use crate::spinsystem::{box_interior, central_cluster_subset, central_vertices, run_chain, SingleSpinMeasure};
use crate::stats::batch_means;
use crate::wells::find_a;

/// One chain pair at one `(λ, replicate, β)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCell {
    pub lambda: f64,
    pub replicate: usize,
    pub beta: f64,
    pub seed: u64,
    pub vertices: usize,
    pub interior: usize,
    pub subset: usize,
    pub m_plus: f64,
    pub se_plus: f64,
    pub m_minus: f64,
    pub se_minus: f64,
    /// `m(+a) − m(−a)` and the batch-means error of the paired series.
    pub diff: f64,
    pub diff_se: f64,
    pub tau_int: f64,
    pub unreliable: bool,
    /// The −a chain reproduced the negated +a magnetization series exactly.
    pub mirrored_exact: bool,
}

/// Replicate average at one `(λ, β)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSummary {
    pub lambda: f64,
    pub beta: f64,
    pub m_plus: f64,
    pub se_plus: f64,
    pub diff: f64,
    pub diff_se: f64,
    /// `m(+a) − m(−a) > 3` joint standard errors.
    pub transition: bool,
    pub unreliable_cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaAnnotation {
    pub lambda: f64,
    pub mean_degree: f64,
    pub supercritical: bool,
    pub q_bound: Option<f64>,
    /// Sufficient inverse temperature for a transition.
    pub beta_star: Option<f64>,
    /// Smallest grid β from which every larger grid β shows a transition.
    pub onset_beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagramResult {
    pub measure: String,
    pub a: f64,
    pub lambda_star: f64,
    pub lambda_star_ci: Option<(f64, f64)>,
    pub lambda_star_estimated: bool,
    pub cells: Vec<PhaseCell>,
    pub summary: Vec<PhaseSummary>,
    pub annotations: Vec<LambdaAnnotation>,
}

impl PhaseDiagramResult {
    pub fn summary_at(&self, lambda: f64, beta: f64) -> Option<&PhaseSummary> {
        self.summary.iter().find(|s| s.lambda == lambda && s.beta == beta)
    }

    /// Long form, one row per cell and replicate.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "lambda,replicate,beta,seed,vertices,interior,subset,m_plus,se_plus,m_minus,se_minus,diff,diff_se,tau_int,unreliable"
        )?;
        for c in &self.cells {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                c.lambda,
                c.replicate,
                c.beta,
                c.seed,
                c.vertices,
                c.interior,
                c.subset,
                c.m_plus,
                c.se_plus,
                c.m_minus,
                c.se_minus,
                c.diff,
                c.diff_se,
                c.tau_int,
                c.unreliable
            )?;
        }
        Ok(())
    }
}

/// Boundary magnitude: the configured `a`, 1 for Ising spins, otherwise the
/// Wells supremum shrunk by a factor `1 − 10⁻⁶`.
pub fn boundary_magnitude(cfg: &ExperimentConfig, measure: &SingleSpinMeasure) -> Result<f64> {
    if let Some(a) = cfg.a {
        if !(a > 0.0) {
            return Err(Error::Config(format!("a must be positive, got {a}")));
        }
        return Ok(a);
    }
    if measure.is_atomic() {
        return Ok(1.0);
    }
    Ok(find_a(measure, 1e-10)?.a * (1.0 - 1e-6))
}

/// Mean-degree grid `3.5, 3.7, …, 5.5` used for the threshold pre-pass.
pub fn default_threshold_grid(dim: usize, r_star: f64) -> Result<Vec<f64>> {
    let v = ball_volume(dim, r_star)?;
    let (lo, hi) = if dim == 2 { (3.5, 5.5) } else { (2.0, 3.6) };
    let steps = 10;
    Ok((0..=steps).map(|k| (lo + (hi - lo) * k as f64 / steps as f64) / v).collect())
}

/// Graph seed for replicate `rep` at intensity index `li`.
pub fn graph_seed(master: u64, li: usize, rep: usize) -> u64 {
    derive_seed(derive_seed(derive_seed(master, Purpose::Points as u64), li as u64), rep as u64)
}

/// Chain seed for grid cell `bi` on a given graph.
pub fn chain_seed(graph_seed: u64, bi: usize) -> u64 {
    derive_seed(derive_seed(graph_seed, Purpose::Chain as u64), bi as u64)
}

/// Sampled graph and the derived interior and magnetization subset.
pub struct QuenchedSample {
    pub points: PointConfiguration,
    pub graph: GilbertGraph,
    pub interior: Vec<bool>,
    pub subset: Vec<usize>,
}

pub fn quenched_sample(cfg: &ExperimentConfig, lambda: f64, seed: u64) -> Result<QuenchedSample> {
    let points = sample_poisson(lambda, cfg.window()?, seed)?;
    let graph = build_graph(&points, cfg.r_star)?;
    let interior = box_interior(&graph, cfg.margin());
    let mut subset = central_cluster_subset(&graph, &interior);
    if subset.is_empty() {
        subset = central_vertices(&graph, &interior);
    }
    if subset.is_empty() {
        subset = (0..graph.len()).filter(|&x| interior[x]).collect();
    }
    Ok(QuenchedSample { points, graph, interior, subset })
}

/// Sweeps `(λ, β)`, running coupled chains from boundaries `+a` and `−a` on
/// each sampled graph.
pub fn run_phase_diagram(cfg: &ExperimentConfig) -> Result<PhaseDiagramResult> {
    Ok(run_phase_diagram_with_samples(cfg)?.0)
}

pub(crate) fn run_phase_diagram_with_samples(cfg: &ExperimentConfig) -> Result<(PhaseDiagramResult, Vec<Vec<QuenchedSample>>)> {
    cfg.validate()?;
    let lambdas = cfg.intensities()?;
    if lambdas.is_empty() || cfg.beta.is_empty() {
        return Err(Error::Config("phase diagram needs `lambda` (or `mean_degree`) and `beta` grids".into()));
    }
    let measure = cfg.spin_measure()?;
    let profile = cfg.profile()?;
    let a = boundary_magnitude(cfg, &measure)?;

    let (lambda_star, ci, estimated) = match cfg.lambda_star {
        Some(l) => (l, None, false),
        None => {
            let sizes = if cfg.sizes.is_empty() { vec![16.0 * cfg.r_star, 32.0 * cfg.r_star, 64.0 * cfg.r_star] } else { cfg.sizes.clone() };
            let mut s = ScanSettings::new(sizes, default_threshold_grid(cfg.dim, cfg.r_star)?, cfg.fss_replicates, derive_seed(cfg.seed, Purpose::Bootstrap as u64));
            s.bootstrap = cfg.bootstrap;
            let est = estimate_lambda_star(cfg.r_star, cfg.dim, &s)?;
            (est.estimate, Some((est.ci_low, est.ci_high)), true)
        }
    };
    if cfg.require_supercritical && lambdas.iter().all(|&l| l <= lambda_star) {
        return Err(Error::Infeasible(format!(
            "every intensity in the grid is at or below the estimated threshold {lambda_star:.4}; no transition can be certified"
        )));
    }

    let ball = ball_volume(cfg.dim, cfg.r_star)?;
    let reps = cfg.replicates;
    let graph_tasks: Vec<(usize, usize)> = (0..lambdas.len()).flat_map(|li| (0..reps).map(move |r| (li, r))).collect();
    let samples: Vec<QuenchedSample> = graph_tasks
        .par_iter()
        .map(|&(li, r)| quenched_sample(cfg, lambdas[li], graph_seed(cfg.seed, li, r)))
        .collect::<Result<_>>()?;
    if let Some(i) = samples.iter().position(|s| s.subset.is_empty()) {
        return Err(Error::Config(format!(
            "replicate {} at lambda {} has no interior vertices; enlarge `side` or shrink `margin`",
            graph_tasks[i].1, lambdas[graph_tasks[i].0]
        )));
    }

    let nb = cfg.beta.len();
    let cell_tasks: Vec<(usize, usize)> = (0..graph_tasks.len()).flat_map(|g| (0..nb).map(move |b| (g, b))).collect();
    let cells: Vec<PhaseCell> = cell_tasks
        .par_iter()
        .map(|&(g, bi)| -> Result<PhaseCell> {
            let (li, rep) = graph_tasks[g];
            let sample = &samples[g];
            let beta = cfg.beta[bi];
            let seed = chain_seed(graph_seed(cfg.seed, li, rep), bi);
            let chain = cfg.chain_config(beta, seed);
            let plus = run_chain(&sample.graph, &sample.interior, &measure, &profile, a, &chain, &sample.subset)?;
            let minus =
                run_chain(&sample.graph, &sample.interior, &measure, &profile, -a, &chain.mirror(), &sample.subset)?;
            let diff_series: Vec<f64> =
                plus.records.iter().zip(&minus.records).map(|(p, m)| p.magnetization - m.magnetization).collect();
            let d = batch_means(&diff_series, cfg.batches);
            let mirrored_exact = plus.records.iter().zip(&minus.records).all(|(p, m)| p.magnetization == -m.magnetization);
            Ok(PhaseCell {
                lambda: lambdas[li],
                replicate: rep,
                beta,
                seed,
                vertices: sample.graph.len(),
                interior: sample.interior.iter().filter(|&&i| i).count(),
                subset: sample.subset.len(),
                m_plus: plus.m_mean,
                se_plus: plus.m_se,
                m_minus: minus.m_mean,
                se_minus: minus.m_se,
                diff: d.mean,
                diff_se: d.se,
                tau_int: plus.tau_int,
                unreliable: plus.unreliable(cfg.sweeps - cfg.burn_in),
                mirrored_exact,
            })
        })
        .collect::<Result<_>>()?;

    let mut summary = Vec::with_capacity(lambdas.len() * nb);
    for &lambda in &lambdas {
        for &beta in &cfg.beta {
            let group: Vec<&PhaseCell> = cells.iter().filter(|c| c.lambda == lambda && c.beta == beta).collect();
            let r = group.len() as f64;
            let m_plus = group.iter().map(|c| c.m_plus).sum::<f64>() / r;
            let se_plus = group.iter().map(|c| c.se_plus * c.se_plus).sum::<f64>().sqrt() / r;
            let diff = group.iter().map(|c| c.diff).sum::<f64>() / r;
            let diff_se = group.iter().map(|c| c.diff_se * c.diff_se).sum::<f64>().sqrt() / r;
            summary.push(PhaseSummary {
                lambda,
                beta,
                m_plus,
                se_plus,
                diff,
                diff_se,
                transition: diff > 3.0 * diff_se,
                unreliable_cells: group.iter().filter(|c| c.unreliable).count(),
            });
        }
    }

    let annotations = lambdas
        .iter()
        .map(|&lambda| {
            let supercritical = lambda > lambda_star;
            let q_bound = if supercritical { compute_q_star_bound(lambda, lambda_star).ok() } else { None };
            let beta_star = q_bound.and_then(|q| if q < 1.0 { beta_star_bound(q, cfg.phi_star, a).ok() } else { None });
            let row: Vec<&PhaseSummary> = summary.iter().filter(|s| s.lambda == lambda).collect();
            let onset = (0..row.len()).find(|&k| row[k..].iter().all(|s| s.transition)).map(|k| row[k].beta);
            LambdaAnnotation { lambda, mean_degree: lambda * ball, supercritical, q_bound, beta_star, onset_beta: onset }
        })
        .collect();

    let result = PhaseDiagramResult {
        measure: measure.to_string(),
        a,
        lambda_star,
        lambda_star_ci: ci,
        lambda_star_estimated: estimated,
        cells,
        summary,
        annotations,
    };
    let grouped = group_samples(samples, lambdas.len(), reps);
    Ok((result, grouped))
}

fn group_samples(samples: Vec<QuenchedSample>, nl: usize, reps: usize) -> Vec<Vec<QuenchedSample>> {
    let mut out: Vec<Vec<QuenchedSample>> = (0..nl).map(|_| Vec::with_capacity(reps)).collect();
    for (k, s) in samples.into_iter().enumerate() {
        out[k / reps].push(s);
    }
    out
}
