use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::output::Outputs;
use super::phase::{default_threshold_grid, graph_seed, quenched_sample, run_phase_diagram_with_samples};
use super::svg::{line_chart, Series};
use crate::error::{Error, Result};
use crate::geomgraph::{build_graph, expected_a_bound, sparsity_functionals, weight, SparsityReport};
use crate::percolation::{estimate_lambda_star, estimate_q_star_empirical, ScanSettings, ThresholdEstimate};
use crate::pointprocess::{sample_poisson, BoxWindow};
use crate::quadrature;
use crate::rng::{derive_seed, Purpose};
use crate::spinsystem::{run_chain, SingleSpinMeasure};
use crate::stats::{mean, standard_error};
use crate::wells::{find_a, finite_volume_wells_check, random_tiny_instance, verify_one_site_positivity, WellsCertificate};

/// An experiment kind, selected by the `kind` key of a configuration.
pub trait Experiment: Sync {
    fn kind(&self) -> &'static str;

    /// Checks kind-specific requirements beyond [`ExperimentConfig::validate`].
    fn check(&self, cfg: &ExperimentConfig) -> Result<()>;

    fn run(&self, cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()>;
}

/// Every experiment kind, by name.
pub const EXPERIMENTS: &[&dyn Experiment] = &[&PercolationSweep, &ChainExperiment, &PhaseDiagram, &WellsSuite, &SparsityExperiment];

pub fn experiment(kind: &str) -> Result<&'static dyn Experiment> {
    EXPERIMENTS.iter().copied().find(|e| e.kind() == kind).ok_or_else(|| {
        let known: Vec<&str> = EXPERIMENTS.iter().map(|e| e.kind()).collect();
        Error::Config(format!("unknown experiment kind `{kind}` (known: {})", known.join(", ")))
    })
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Config(msg.into()))
    }
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

/// Finite-size-scaling threshold estimate.
pub struct PercolationSweep;

impl PercolationSweep {
    fn estimate(&self, cfg: &ExperimentConfig) -> Result<ThresholdEstimate> {
        let sizes = if cfg.sizes.is_empty() {
            [16.0, 32.0, 64.0].iter().map(|s| s * cfg.r_star).collect()
        } else {
            cfg.sizes.clone()
        };
        match cfg.estimate.as_deref().unwrap_or("lambda-star") {
            "lambda-star" => {
                let grid = match cfg.intensities()? {
                    g if g.is_empty() => default_threshold_grid(cfg.dim, cfg.r_star)?,
                    g => g,
                };
                let mut s = ScanSettings::new(sizes, grid, cfg.replicates, cfg.seed);
                s.bootstrap = cfg.bootstrap;
                estimate_lambda_star(cfg.r_star, cfg.dim, &s)
            }
            "q-star" => {
                let lambda = *cfg.intensities()?.first().ok_or_else(|| Error::Config("q-star needs `lambda`".into()))?;
                let mut s = ScanSettings::new(sizes, cfg.q.clone(), cfg.replicates, cfg.seed);
                s.bootstrap = cfg.bootstrap;
                estimate_q_star_empirical(lambda, cfg.r_star, cfg.dim, &s)
            }
            other => Err(Error::Config(format!("unknown estimate `{other}` (lambda-star or q-star)"))),
        }
    }
}

impl Experiment for PercolationSweep {
    fn kind(&self) -> &'static str {
        "percolation-sweep"
    }

    fn check(&self, cfg: &ExperimentConfig) -> Result<()> {
        match cfg.estimate.as_deref().unwrap_or("lambda-star") {
            "lambda-star" => Ok(()),
            "q-star" => require(!cfg.q.is_empty() && cfg.intensities()?.len() == 1, "q-star needs one `lambda` and a `q` grid"),
            other => Err(Error::Config(format!("unknown estimate `{other}` (lambda-star or q-star)"))),
        }
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
        let est = self.estimate(cfg)?;
        out.seed("scan", cfg.seed);
        out.add("sweeps/spanning.csv", csv_bytes(|b| est.write_csv(b))?);
        out.add_json("threshold.json", &est.to_json())?;
        if cfg.svg {
            let series: Vec<Series> = est
                .curves
                .iter()
                .map(|c| Series { label: format!("L = {}", c.size), points: c.points.iter().map(|p| (p.param, p.prob())).collect() })
                .collect();
            out.add("spanning.svg", line_chart("spanning probability", est.parameter.name(), "P(span)", &series).into_bytes());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainSummary {
    pub beta: f64,
    pub lambda: f64,
    pub s: f64,
    pub m_mean: f64,
    pub m_se: f64,
    pub tau_int: f64,
    pub seeds: Vec<u64>,
    pub measure: String,
    pub vertices: usize,
    pub interior: usize,
    pub subset: usize,
    pub acceptance: f64,
    pub unreliable: bool,
}

/// A single chain on one sampled graph.
pub struct ChainExperiment;

impl Experiment for ChainExperiment {
    fn kind(&self) -> &'static str {
        "chain"
    }

    fn check(&self, cfg: &ExperimentConfig) -> Result<()> {
        require(cfg.side.is_some(), "chain needs `side`")?;
        require(cfg.intensities()?.len() == 1, "chain needs exactly one intensity")?;
        require(cfg.beta.len() == 1, "chain needs exactly one `beta`")
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
        let lambda = cfg.intensities()?[0];
        let measure = cfg.spin_measure()?;
        let s = match cfg.s {
            Some(s) => s,
            None => super::phase::boundary_magnitude(cfg, &measure)?,
        };
        let gseed = graph_seed(cfg.seed, 0, 0);
        let sample = quenched_sample(cfg, lambda, gseed)?;
        if sample.subset.is_empty() {
            return Err(Error::Config("no interior vertices; enlarge `side` or shrink `margin`".into()));
        }
        let cseed = derive_seed(gseed, Purpose::Chain as u64);
        let r = run_chain(
            &sample.graph,
            &sample.interior,
            &measure,
            &cfg.profile()?,
            s,
            &cfg.chain_config(cfg.beta[0], cseed),
            &sample.subset,
        )?;
        out.seed("points", gseed);
        out.seed("chain", cseed);
        out.add("points/points.csv", csv_bytes(|b| sample.points.write_csv(b))?);
        out.add("graphs/edges.csv", csv_bytes(|b| sample.graph.write_edges_csv(b))?);
        out.add("sweeps/chain.csv", csv_bytes(|b| r.write_csv(b))?);
        let summary = ChainSummary {
            beta: cfg.beta[0],
            lambda,
            s,
            m_mean: r.m_mean,
            m_se: r.m_se,
            tau_int: r.tau_int,
            seeds: vec![gseed, cseed],
            measure: measure.to_string(),
            vertices: sample.graph.len(),
            interior: sample.interior.iter().filter(|&&i| i).count(),
            subset: sample.subset.len(),
            acceptance: r.acceptance,
            unreliable: r.unreliable(cfg.sweeps - cfg.burn_in),
        };
        out.add_json("summary.json", &summary)
    }
}

/// Coupled ±a chains over a `(λ, β)` grid.
pub struct PhaseDiagram;

impl Experiment for PhaseDiagram {
    fn kind(&self) -> &'static str {
        "phase-diagram"
    }

    fn check(&self, cfg: &ExperimentConfig) -> Result<()> {
        require(cfg.side.is_some(), "phase diagram needs `side`")?;
        require(!cfg.intensities()?.is_empty() && !cfg.beta.is_empty(), "phase diagram needs intensity and `beta` grids")
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
        let (result, samples) = run_phase_diagram_with_samples(cfg)?;
        for (li, reps) in samples.iter().enumerate() {
            for (r, s) in reps.iter().enumerate() {
                out.seed(format!("graph/{li}/{r}"), graph_seed(cfg.seed, li, r));
                out.add(format!("points/lambda{li}_rep{r}.csv"), csv_bytes(|b| s.points.write_csv(b))?);
                out.add(format!("graphs/lambda{li}_rep{r}.csv"), csv_bytes(|b| s.graph.write_edges_csv(b))?);
            }
        }
        for c in &result.cells {
            out.seed(format!("chain/{}/{}/{}", c.lambda, c.replicate, c.beta), c.seed);
        }
        out.add("sweeps/phase_diagram.csv", csv_bytes(|b| result.write_csv(b))?);
        out.add_json("phase_diagram.json", &result)?;
        if cfg.svg {
            let series: Vec<Series> = result
                .annotations
                .iter()
                .map(|an| Series {
                    label: format!("mean degree {:.2}", an.mean_degree),
                    points: result.summary.iter().filter(|s| s.lambda == an.lambda).map(|s| (s.beta, s.m_plus)).collect(),
                })
                .collect();
            out.add("phase_diagram.svg", line_chart("m(+a) against beta", "beta", "m(+a)", &series).into_bytes());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WellsInstanceRow {
    pub measure: String,
    pub instance: usize,
    pub seed: u64,
    pub beta: f64,
    pub vertex: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WellsSuiteSummary {
    pub measure: String,
    pub a_supremum: f64,
    pub a_attained: bool,
    pub a: f64,
    pub certificate: WellsCertificate,
    pub instances: usize,
    pub instances_holding: usize,
}

/// One-site certificates and random finite-volume comparisons per measure.
pub struct WellsSuite;

impl WellsSuite {
    pub fn measures(cfg: &ExperimentConfig) -> Result<Vec<SingleSpinMeasure>> {
        if cfg.measures.is_empty() {
            return Ok(vec![
                SingleSpinMeasure::Ising,
                SingleSpinMeasure::UniformInterval { half_width: 1.0 },
                SingleSpinMeasure::double_well(),
            ]);
        }
        cfg.measures.iter().map(|m| m.parse::<SingleSpinMeasure>().map_err(|e| Error::Config(e.to_string()))).collect()
    }
}

impl Experiment for WellsSuite {
    fn kind(&self) -> &'static str {
        "wells-suite"
    }

    fn check(&self, cfg: &ExperimentConfig) -> Result<()> {
        Self::measures(cfg).map(|_| ())
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
        let mut summaries = Vec::new();
        let mut rows = Vec::new();
        for (mi, measure) in Self::measures(cfg)?.iter().enumerate() {
            let found = find_a(measure, cfg.tol)?;
            let a = found.usable();
            let certificate = verify_one_site_positivity(measure, a, cfg.max_exponent, cfg.tol)?;
            let checks: Vec<(u64, f64, Vec<usize>, Vec<f64>, Vec<f64>, bool)> = (0..cfg.instances)
                .into_par_iter()
                .map(|k| {
                    let seed = derive_seed(derive_seed(cfg.seed, mi as u64), k as u64);
                    let t = random_tiny_instance(measure, seed)?;
                    let c = finite_volume_wells_check(&t.graph, &t.interior, measure, &t.profile, a, t.beta, 1e-8)?;
                    Ok((seed, t.beta, c.vertices, c.lhs, c.rhs, c.holds))
                })
                .collect::<Result<_>>()?;
            let holding = checks.iter().filter(|c| c.5).count();
            for (k, (seed, beta, vs, lhs, rhs, _)) in checks.into_iter().enumerate() {
                for i in 0..vs.len() {
                    rows.push(WellsInstanceRow {
                        measure: measure.to_string(),
                        instance: k,
                        seed,
                        beta,
                        vertex: vs[i],
                        lhs: lhs[i],
                        rhs: rhs[i],
                        holds: lhs[i] >= rhs[i] - 1e-8,
                    });
                }
            }
            out.seed(format!("instances/{measure}"), derive_seed(cfg.seed, mi as u64));
            summaries.push(WellsSuiteSummary {
                measure: measure.to_string(),
                a_supremum: found.a,
                a_attained: found.attained,
                a,
                certificate,
                instances: cfg.instances,
                instances_holding: holding,
            });
        }
        let mut csv = String::from("measure,instance,seed,beta,vertex,lhs,rhs,holds\n");
        for r in &rows {
            csv.push_str(&format!("{},{},{},{},{},{},{},{}\n", r.measure, r.instance, r.seed, r.beta, r.vertex, r.lhs, r.rhs, r.holds));
        }
        out.add("wells/instances.csv", csv.into_bytes());
        out.add_json("wells/certificates.json", &summaries)
    }
}

/// `∫_W e^{−α|x|} dx` over the sampling window.
pub fn window_weight_integral(alpha: f64, window: &BoxWindow) -> Result<f64> {
    let h = 0.5 * window.side();
    let tol = 1e-10;
    let v = match window.dim() {
        2 => quadrature::integrate(
            |x| quadrature::integrate(|y| weight(alpha, &[x, y, 0.0]), 0.0, h, tol).unwrap_or(f64::NAN),
            0.0,
            h,
            tol * h,
        )?,
        _ => quadrature::integrate(
            |x| {
                quadrature::integrate(
                    |y| quadrature::integrate(|z| weight(alpha, &[x, y, z]), 0.0, h, tol).unwrap_or(f64::NAN),
                    0.0,
                    h,
                    tol * h,
                )
                .unwrap_or(f64::NAN)
            },
            0.0,
            h,
            tol * h * h,
        )?,
    };
    if !v.is_finite() {
        return Err(Error::Numerical("window weight integral did not converge".into()));
    }
    Ok(v * f64::powi(2.0, window.dim() as i32))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SparsityAggregate {
    pub lambda: f64,
    pub replicates: usize,
    pub alpha: f64,
    pub theta: f64,
    pub a_mean: f64,
    pub a_se: f64,
    pub a_bound: f64,
    /// Mean `a_γ` at most the bound plus three standard errors.
    pub within_bound: bool,
    pub b_mean: f64,
    pub b_se: f64,
    /// `λ ∫_W e^{−α|x|} dx`.
    pub b_expected: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SparsityResult {
    pub reports: Vec<(f64, usize, u64, SparsityReport)>,
    pub aggregates: Vec<SparsityAggregate>,
}

/// Sparsity functionals over replicates of each intensity.
pub fn run_sparsity_report(cfg: &ExperimentConfig) -> Result<SparsityResult> {
    cfg.validate()?;
    let window = cfg.window()?;
    let lambdas = cfg.intensities()?;
    if lambdas.is_empty() {
        return Err(Error::Config("sparsity report needs `lambda` or `mean_degree`".into()));
    }
    let tasks: Vec<(usize, usize)> = (0..lambdas.len()).flat_map(|l| (0..cfg.replicates).map(move |r| (l, r))).collect();
    let reports: Vec<(f64, usize, u64, SparsityReport)> = tasks
        .par_iter()
        .map(|&(l, r)| {
            let seed = graph_seed(cfg.seed, l, r);
            let g = build_graph(&sample_poisson(lambdas[l], window, seed)?, cfg.r_star)?;
            Ok((lambdas[l], r, seed, sparsity_functionals(&g, cfg.alpha, cfg.theta)?))
        })
        .collect::<Result<_>>()?;
    let w_int = window_weight_integral(cfg.alpha, &window)?;
    let aggregates = lambdas
        .iter()
        .map(|&lambda| {
            let rows: Vec<&SparsityReport> = reports.iter().filter(|r| r.0 == lambda).map(|r| &r.3).collect();
            let a: Vec<f64> = rows.iter().map(|r| r.a_gamma).collect();
            let b: Vec<f64> = rows.iter().map(|r| r.b_gamma).collect();
            let a_bound = expected_a_bound(lambda, cfg.alpha, cfg.theta, cfg.r_star, cfg.dim)?;
            let (a_mean, a_se) = (mean(&a), if a.len() > 1 { standard_error(&a) } else { 0.0 });
            Ok(SparsityAggregate {
                lambda,
                replicates: rows.len(),
                alpha: cfg.alpha,
                theta: cfg.theta,
                a_mean,
                a_se,
                a_bound,
                within_bound: a_mean <= a_bound + 3.0 * a_se,
                b_mean: mean(&b),
                b_se: if b.len() > 1 { standard_error(&b) } else { 0.0 },
                b_expected: lambda * w_int,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SparsityResult { reports, aggregates })
}

pub struct SparsityExperiment;

impl Experiment for SparsityExperiment {
    fn kind(&self) -> &'static str {
        "sparsity-report"
    }

    fn check(&self, cfg: &ExperimentConfig) -> Result<()> {
        require(cfg.side.is_some(), "sparsity report needs `side`")?;
        require(!cfg.intensities()?.is_empty(), "sparsity report needs `lambda` or `mean_degree`")
    }

    fn run(&self, cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
        let res = run_sparsity_report(cfg)?;
        let mut csv = String::from("lambda,replicate,seed,alpha,theta,a_gamma,b_gamma,max_degree,mean_degree\n");
        for (lambda, r, seed, rep) in &res.reports {
            out.seed(format!("graph/{lambda}/{r}"), *seed);
            csv.push_str(&format!(
                "{lambda},{r},{seed},{},{},{},{},{},{}\n",
                rep.alpha, rep.theta, rep.a_gamma, rep.b_gamma, rep.max_degree, rep.mean_degree
            ));
        }
        out.add("sweeps/sparsity.csv", csv.into_bytes());
        out.add_json("sparsity.json", &res.aggregates)
    }
}
