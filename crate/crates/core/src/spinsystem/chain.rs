use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geomgraph::GilbertGraph;
use crate::rng::{stream, Mirrored, Purpose, UniformSource, Uniforms};
use crate::stats::{batch_means, integrated_autocorrelation_time};

use super::measure::SingleSpinMeasure;
use super::profile::InteractionProfile;
use super::state::Couplings;
use super::update::{default_rule, update_rule, SiteUpdate};

/// Starting configuration of the interior spins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    /// Every interior spin equal to the boundary value (its sign for Ising).
    #[default]
    Boundary,
    /// Every interior spin zero; continuous measures only.
    Zero,
    /// One value per vertex; collar entries are ignored.
    Given(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub beta: f64,
    pub sweeps: usize,
    pub burn_in: usize,
    #[serde(default = "default_width")]
    pub proposal_width: f64,
    pub seed: u64,
    #[serde(default = "one")]
    pub thin: usize,
    #[serde(default = "default_batches")]
    pub batches: usize,
    /// Adapt the proposal width during burn-in, then freeze it.
    #[serde(default)]
    pub tune: bool,
    /// Registered update rule; the measure's default when absent.
    #[serde(default)]
    pub rule: Option<String>,
    /// Reflect the first uniform of every pair (see [`Mirrored`]).
    #[serde(default)]
    pub mirrored: bool,
    #[serde(default)]
    pub initial: InitialState,
}

fn default_width() -> f64 {
    1.0
}
fn one() -> usize {
    1
}
fn default_batches() -> usize {
    20
}

impl ChainConfig {
    pub fn new(beta: f64, sweeps: usize, burn_in: usize, seed: u64) -> Self {
        ChainConfig {
            beta,
            sweeps,
            burn_in,
            proposal_width: default_width(),
            seed,
            thin: 1,
            batches: default_batches(),
            tune: false,
            rule: None,
            mirrored: false,
            initial: InitialState::Boundary,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::invalid(format!("beta must be non-negative, got {}", self.beta)));
        }
        if self.sweeps <= self.burn_in {
            return Err(Error::invalid(format!("sweeps ({}) must exceed burn_in ({})", self.sweeps, self.burn_in)));
        }
        if self.thin == 0 {
            return Err(Error::invalid("thin must be at least 1"));
        }
        if !(self.proposal_width > 0.0 && self.proposal_width.is_finite()) {
            return Err(Error::invalid(format!("proposal width must be positive, got {}", self.proposal_width)));
        }
        if self.batches < 2 {
            return Err(Error::invalid("at least two batches are needed for an error bar"));
        }
        Ok(())
    }

    /// The same chain run against the negated boundary on the mirrored stream.
    pub fn mirror(&self) -> Self {
        ChainConfig { mirrored: !self.mirrored, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub sweep: usize,
    pub magnetization: f64,
    pub energy: f64,
}

/// Recorded series and its summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainResult {
    pub records: Vec<ChainRecord>,
    pub m_mean: f64,
    pub m_se: f64,
    pub tau_int: f64,
    pub batches: usize,
    pub acceptance: f64,
    pub proposal_width: Option<f64>,
    pub final_spins: Vec<f64>,
}

impl ChainResult {
    pub fn magnetizations(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.magnetization).collect()
    }

    /// Fewer than 50 effective sweeps per autocorrelation time.
    pub fn unreliable(&self, sweeps: usize) -> bool {
        !(self.tau_int <= sweeps as f64 / 50.0)
    }

    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "sweep,magnetization,energy")?;
        for r in &self.records {
            writeln!(out, "{},{},{}", r.sweep, r.magnetization, r.energy)?;
        }
        Ok(())
    }
}

/// A single-site Markov chain on the interior of a quenched graph with
/// constant boundary value.
pub struct Chain<'g> {
    graph: &'g GilbertGraph,
    interior: Vec<usize>,
    is_interior: Vec<bool>,
    measure: SingleSpinMeasure,
    couplings: Couplings,
    rule: Box<dyn SiteUpdate>,
    source: Box<dyn UniformSource>,
    beta: f64,
    boundary: f64,
    sigma: Vec<f64>,
    accepted: u64,
    proposed: u64,
}

impl<'g> Chain<'g> {
    pub fn new(
        graph: &'g GilbertGraph,
        interior: &[bool],
        measure: &SingleSpinMeasure,
        profile: &InteractionProfile,
        boundary: f64,
        config: &ChainConfig,
    ) -> Result<Self> {
        config.validate()?;
        measure.validate()?;
        profile.validate()?;
        if interior.len() != graph.len() {
            return Err(Error::invalid("interior mask must cover every vertex"));
        }
        if !boundary.is_finite() {
            return Err(Error::invalid("boundary value must be finite"));
        }
        let rule = match &config.rule {
            Some(name) => update_rule(name, config.proposal_width)?,
            None => default_rule(measure, config.proposal_width),
        };
        if !rule.supports(measure) {
            return Err(Error::Unsupported(format!("update rule `{}` cannot sample {measure}", rule.name())));
        }
        let init = match &config.initial {
            InitialState::Boundary if measure.is_atomic() => Some(if boundary < 0.0 { -1.0 } else { 1.0 }),
            InitialState::Boundary => Some(boundary),
            InitialState::Zero if measure.is_atomic() => {
                return Err(Error::invalid("Ising spins cannot start at zero"));
            }
            InitialState::Zero => Some(0.0),
            InitialState::Given(v) => {
                if v.len() != graph.len() {
                    return Err(Error::invalid("initial spins must cover every vertex"));
                }
                None
            }
        };
        let sigma: Vec<f64> = (0..graph.len())
            .map(|x| match (interior[x], init, &config.initial) {
                (false, _, _) => boundary,
                (true, Some(v), _) => v,
                (true, None, InitialState::Given(v)) => v[x],
                _ => unreachable!(),
            })
            .collect();
        if measure.is_atomic() && (0..graph.len()).any(|x| interior[x] && sigma[x].abs() != 1.0) {
            return Err(Error::invalid("Ising spins must be ±1"));
        }
        let rng = stream(config.seed, Purpose::Chain, 0);
        let source: Box<dyn UniformSource> =
            if config.mirrored { Box::new(Mirrored(rng)) } else { Box::new(Uniforms(rng)) };
        Ok(Chain {
            graph,
            interior: (0..graph.len()).filter(|&x| interior[x]).collect(),
            is_interior: interior.to_vec(),
            measure: *measure,
            couplings: Couplings::new(graph, profile),
            rule,
            source,
            beta: config.beta,
            boundary,
            sigma,
            accepted: 0,
            proposed: 0,
        })
    }

    /// One systematic sweep over the interior in increasing vertex order.
    pub fn sweep(&mut self) {
        for &x in &self.interior {
            let h = self.couplings.field(&self.sigma, x);
            let u = self.source.pair();
            let old = self.sigma[x];
            let new = self.rule.update(&self.measure, old, h, self.beta, u);
            self.proposed += 1;
            if new != old {
                self.accepted += 1;
            }
            self.sigma[x] = new;
        }
    }

    pub fn spins(&self) -> &[f64] {
        &self.sigma
    }

    pub fn graph(&self) -> &'g GilbertGraph {
        self.graph
    }

    pub fn boundary(&self) -> f64 {
        self.boundary
    }

    pub fn proposal_width(&self) -> Option<f64> {
        self.rule.width()
    }

    /// Fraction of site updates that changed the spin since the last reset.
    pub fn acceptance(&self) -> f64 {
        if self.proposed == 0 {
            return f64::NAN;
        }
        self.accepted as f64 / self.proposed as f64
    }

    fn reset_acceptance(&mut self) {
        self.accepted = 0;
        self.proposed = 0;
    }

    /// Relative energy of the current configuration.
    pub fn energy(&self) -> f64 {
        let mut e = 0.0;
        for &x in &self.interior {
            let (nb, st) = self.couplings.row(x);
            let mut acc = 0.0;
            for (&y, &j) in nb.iter().zip(st) {
                let y = y as usize;
                if !self.is_interior[y] {
                    acc += j * self.boundary;
                } else if y > x {
                    acc += j * self.sigma[y];
                }
            }
            e -= self.sigma[x] * acc;
        }
        e
    }

    pub fn magnetization(&self, subset: &[usize]) -> f64 {
        subset.iter().map(|&x| self.sigma[x]).sum::<f64>() / subset.len() as f64
    }
}

/// Runs burn-in then records every `thin` sweeps. `subset` selects the
/// vertices averaged into the magnetization.
pub fn run_chain(
    graph: &GilbertGraph,
    interior: &[bool],
    measure: &SingleSpinMeasure,
    profile: &InteractionProfile,
    boundary: f64,
    config: &ChainConfig,
    subset: &[usize],
) -> Result<ChainResult> {
    if subset.is_empty() {
        return Err(Error::invalid("magnetization over an empty vertex set"));
    }
    if subset.iter().any(|&x| x >= graph.len()) {
        return Err(Error::invalid("magnetization subset refers to a missing vertex"));
    }
    let mut chain = Chain::new(graph, interior, measure, profile, boundary, config)?;
    for k in 0..config.burn_in {
        chain.sweep();
        // Adapt towards ~40% acceptance in blocks of 50 sweeps.
        if config.tune && (k + 1) % 50 == 0 {
            if let Some(w) = chain.proposal_width() {
                let acc = chain.acceptance();
                let factor = if acc > 0.5 { 1.25 } else if acc < 0.3 { 0.8 } else { 1.0 };
                chain.rule = chain.rule.with_width(w * factor);
            }
            chain.reset_acceptance();
        }
    }
    chain.reset_acceptance();
    let mut records = Vec::with_capacity((config.sweeps - config.burn_in) / config.thin + 1);
    for sweep in config.burn_in + 1..=config.sweeps {
        chain.sweep();
        if (sweep - config.burn_in) % config.thin == 0 {
            records.push(ChainRecord { sweep, magnetization: chain.magnetization(subset), energy: chain.energy() });
        }
    }
    let ms: Vec<f64> = records.iter().map(|r| r.magnetization).collect();
    let bm = batch_means(&ms, config.batches);
    Ok(ChainResult {
        m_mean: bm.mean,
        m_se: bm.se,
        tau_int: integrated_autocorrelation_time(&ms),
        batches: bm.batches,
        acceptance: chain.acceptance(),
        proposal_width: chain.proposal_width(),
        final_spins: chain.sigma,
        records,
    })
}

/// Per-vertex time averages of the interior spins over the recorded sweeps,
/// with batch-means errors.
pub fn vertex_means(
    graph: &GilbertGraph,
    interior: &[bool],
    measure: &SingleSpinMeasure,
    profile: &InteractionProfile,
    boundary: f64,
    config: &ChainConfig,
) -> Result<Vec<(f64, f64)>> {
    let mut chain = Chain::new(graph, interior, measure, profile, boundary, config)?;
    for _ in 0..config.burn_in {
        chain.sweep();
    }
    let mut series = vec![Vec::new(); graph.len()];
    for sweep in 1..=config.sweeps - config.burn_in {
        chain.sweep();
        if sweep % config.thin == 0 {
            for &x in &chain.interior {
                series[x].push(chain.sigma[x]);
            }
        }
    }
    Ok(series
        .iter()
        .enumerate()
        .map(|(x, s)| {
            if interior[x] {
                let bm = batch_means(s, config.batches);
                (bm.mean, bm.se)
            } else {
                (boundary, 0.0)
            }
        })
        .collect())
}
