use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pointprocess::{ball_volume, BoundaryMode, BoxWindow};
use crate::spinsystem::{ChainConfig, InteractionProfile, SingleSpinMeasure};

/// One experiment, fully specified. Serialized as a flat TOML document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: String,
    #[serde(default = "defaults::dim")]
    pub dim: usize,
    /// Side of the sampling window.
    #[serde(default)]
    pub side: Option<f64>,
    #[serde(default)]
    pub boundary: BoundaryMode,
    /// Intensities; alternatively give `mean_degree`.
    #[serde(default)]
    pub lambda: Vec<f64>,
    /// Mean degrees `λ·V_d(r*)`, converted to intensities.
    #[serde(default)]
    pub mean_degree: Vec<f64>,
    #[serde(default = "defaults::one")]
    pub r_star: f64,
    #[serde(default = "defaults::one")]
    pub phi_star: f64,
    /// Linear taper from this value at r = 0 down to `phi_star` at `r_star`.
    #[serde(default)]
    pub taper_peak: Option<f64>,
    #[serde(default = "defaults::measure")]
    pub measure: String,
    /// Boundary magnitude; found from the Wells condition when absent.
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub beta: Vec<f64>,
    /// Boundary value for single chains.
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default)]
    pub q: Vec<f64>,
    /// System sizes for finite-size scaling.
    #[serde(default)]
    pub sizes: Vec<f64>,
    /// `lambda-star` or `q-star` for percolation sweeps.
    #[serde(default)]
    pub estimate: Option<String>,
    #[serde(default = "defaults::replicates")]
    pub replicates: usize,
    #[serde(default = "defaults::fss_replicates")]
    pub fss_replicates: usize,
    #[serde(default = "defaults::bootstrap")]
    pub bootstrap: usize,
    #[serde(default)]
    pub lambda_star: Option<f64>,
    #[serde(default = "defaults::yes")]
    pub require_supercritical: bool,
    #[serde(default = "defaults::sweeps")]
    pub sweeps: usize,
    #[serde(default = "defaults::burn_in")]
    pub burn_in: usize,
    #[serde(default = "defaults::thin")]
    pub thin: usize,
    #[serde(default = "defaults::batches")]
    pub batches: usize,
    #[serde(default = "defaults::one")]
    pub proposal_width: f64,
    #[serde(default = "defaults::yes")]
    pub tune: bool,
    #[serde(default)]
    pub rule: Option<String>,
    /// Collar width; defaults to `r_star`.
    #[serde(default)]
    pub margin: Option<f64>,
    #[serde(default = "defaults::one")]
    pub alpha: f64,
    #[serde(default = "defaults::one")]
    pub theta: f64,
    #[serde(default)]
    pub measures: Vec<String>,
    #[serde(default = "defaults::max_exponent")]
    pub max_exponent: u32,
    #[serde(default = "defaults::tol")]
    pub tol: f64,
    #[serde(default = "defaults::instances")]
    pub instances: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub svg: bool,
}

mod defaults {
    pub fn dim() -> usize {
        2
    }
    pub fn one() -> f64 {
        1.0
    }
    pub fn measure() -> String {
        "ising".into()
    }
    pub fn replicates() -> usize {
        1
    }
    pub fn fss_replicates() -> usize {
        200
    }
    pub fn bootstrap() -> usize {
        400
    }
    pub fn yes() -> bool {
        true
    }
    pub fn sweeps() -> usize {
        2000
    }
    pub fn burn_in() -> usize {
        500
    }
    pub fn thin() -> usize {
        1
    }
    pub fn batches() -> usize {
        20
    }
    pub fn max_exponent() -> u32 {
        8
    }
    pub fn tol() -> f64 {
        1e-10
    }
    pub fn instances() -> usize {
        50
    }
}

fn strictly_increasing(name: &str, v: &[f64]) -> Result<()> {
    if v.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config(format!("`{name}` must be strictly increasing")));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config(format!("`{name}` must be finite")));
    }
    Ok(())
}

impl ExperimentConfig {
    /// A configuration of the given kind with every other field defaulted.
    pub fn new(kind: &str) -> Self {
        toml::from_str(&format!("kind = \"{kind}\"")).expect("defaults deserialize")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Parse { path: path.to_path_buf(), msg: e.message().to_string() })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        hex(&Sha256::digest(self.to_toml().as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dim == 2 || self.dim == 3) {
            return Err(Error::Config(format!("dim must be 2 or 3, got {}", self.dim)));
        }
        if !self.lambda.is_empty() && !self.mean_degree.is_empty() {
            return Err(Error::Config("give either `lambda` or `mean_degree`, not both".into()));
        }
        for (name, grid) in [
            ("lambda", &self.lambda),
            ("mean_degree", &self.mean_degree),
            ("beta", &self.beta),
            ("q", &self.q),
            ("sizes", &self.sizes),
        ] {
            strictly_increasing(name, grid)?;
        }
        if self.replicates == 0 || self.fss_replicates == 0 {
            return Err(Error::Config("replicates must be ≥ 1".into()));
        }
        if !(self.r_star > 0.0) {
            return Err(Error::Config("r_star must be positive".into()));
        }
        if self.lambda.iter().chain(&self.mean_degree).any(|&l| !(l > 0.0)) {
            return Err(Error::Config("intensities must be positive".into()));
        }
        if self.beta.iter().any(|&b| b < 0.0) {
            return Err(Error::Config("beta must be non-negative".into()));
        }
        if self.q.iter().any(|&q| !(0.0..=1.0).contains(&q)) {
            return Err(Error::Config("q must lie in [0, 1]".into()));
        }
        if let Some(side) = self.side {
            BoxWindow::new(self.dim, side, self.boundary).map_err(|e| Error::Config(e.to_string()))?;
        }
        self.spin_measure().map_err(|e| Error::Config(e.to_string()))?;
        self.profile().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    /// Intensities, from `lambda` or converted from `mean_degree`.
    pub fn intensities(&self) -> Result<Vec<f64>> {
        if !self.mean_degree.is_empty() {
            let v = ball_volume(self.dim, self.r_star)?;
            return Ok(self.mean_degree.iter().map(|m| m / v).collect());
        }
        Ok(self.lambda.clone())
    }

    pub fn window(&self) -> Result<BoxWindow> {
        let side = self.side.ok_or_else(|| Error::Config("`side` is required".into()))?;
        BoxWindow::new(self.dim, side, self.boundary)
    }

    pub fn spin_measure(&self) -> Result<SingleSpinMeasure> {
        self.measure.parse()
    }

    pub fn profile(&self) -> Result<InteractionProfile> {
        match self.taper_peak {
            Some(peak) => InteractionProfile::linear_taper(self.phi_star, peak, self.r_star),
            None => InteractionProfile::constant(self.phi_star, self.r_star),
        }
    }

    pub fn margin(&self) -> f64 {
        self.margin.unwrap_or(self.r_star)
    }

    pub fn chain_config(&self, beta: f64, seed: u64) -> ChainConfig {
        ChainConfig {
            beta,
            sweeps: self.sweeps,
            burn_in: self.burn_in,
            proposal_width: self.proposal_width,
            seed,
            thin: self.thin,
            batches: self.batches,
            tune: self.tune,
            rule: self.rule.clone(),
            mirrored: false,
            initial: Default::default(),
        }
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
