//! Experiment orchestration: configurations, seeded sweeps, manifests and the
//! command-line interface.

pub mod cli;
mod config;
mod experiments;
mod output;
mod phase;
mod svg;

use std::path::Path;

pub use config::ExperimentConfig;
pub use experiments::{
    experiment, run_sparsity_report, window_weight_integral, ChainExperiment, ChainSummary, Experiment, PercolationSweep,
    PhaseDiagram, SparsityAggregate, SparsityExperiment, SparsityResult, WellsInstanceRow, WellsSuite, WellsSuiteSummary,
    EXPERIMENTS,
};
pub use output::{sha256_hex, sidecar_manifest_path, FileRecord, Outputs, RunManifest, Stopwatch};
pub use phase::{
    boundary_magnitude, chain_seed, default_threshold_grid, graph_seed, quenched_sample, run_phase_diagram, LambdaAnnotation,
    PhaseCell, PhaseDiagramResult, PhaseSummary, QuenchedSample,
};
pub use svg::{line_chart, Series};

use crate::error::{Error, Result};

/// Runs `f` on a dedicated pool of `threads` workers (all cores when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<(T, usize)> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
    let n = pool.current_num_threads();
    Ok((pool.install(f), n))
}

/// Runs a configured experiment and returns its files, without touching disk.
pub fn compute_outputs(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<(Outputs, usize)> {
    cfg.validate()?;
    let exp = experiment(&cfg.kind)?;
    exp.check(cfg)?;
    let (res, n) = with_threads(threads, || {
        let mut out = Outputs::new();
        exp.run(cfg, &mut out).map(|_| out)
    })?;
    Ok((res?, n))
}

/// Runs an experiment and writes its files and `manifest.json` below `outdir`.
pub fn run_experiment(cfg: &ExperimentConfig, outdir: &Path, threads: Option<usize>) -> Result<RunManifest> {
    let watch = Stopwatch::start();
    let (outputs, n) = compute_outputs(cfg, threads)?;
    outputs.write_all(outdir)?;
    let manifest = watch.manifest("sweep", cfg.hash(), serde_json::to_value(cfg)?, &outputs, n);
    manifest.save(&outdir.join("manifest.json"))?;
    Ok(manifest)
}

/// Re-runs the configuration recorded in a manifest and lists the files whose
/// contents differ from the recorded hashes.
pub fn recheck_manifest(manifest: &RunManifest, threads: Option<usize>) -> Result<Vec<String>> {
    match manifest.command.as_str() {
        "sweep" => {
            let cfg: ExperimentConfig = serde_json::from_value(manifest.config.clone())?;
            if cfg.hash() != manifest.config_hash {
                return Err(Error::Config("manifest config does not match its recorded hash".into()));
            }
            let (outputs, _) = compute_outputs(&cfg, threads)?;
            Ok(manifest.mismatches(&outputs.records()))
        }
        "gen" => {
            let (points, name) = cli::regenerate_points(&manifest.config)?;
            let mut bytes = Vec::new();
            points.write_csv(&mut bytes)?;
            Ok(manifest.mismatches(&[FileRecord::of(&name, &bytes)]))
        }
        other => Err(Error::Unsupported(format!("cannot re-run manifests of `{other}`"))),
    }
}
