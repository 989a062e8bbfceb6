use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use super::{compute_outputs, recheck_manifest, run_experiment, sidecar_manifest_path, with_threads, ExperimentConfig, Outputs, RunManifest, Stopwatch};
use crate::error::{Error, Result};
use crate::geomgraph::{build_graph, sparsity_functionals};
use crate::percolation::bernoulli_thin;
use crate::pointprocess::{sample_poisson, BoundaryMode, BoxWindow, PointConfiguration};
use crate::spinsystem::{box_interior, central_cluster_subset, run_chain, ChainConfig, InteractionProfile, SingleSpinMeasure};
use crate::wells::{find_a, verify_one_site_positivity};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "quenched", version, about = "Ferromagnets on Poisson–Gilbert graphs")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a Poisson point configuration.
    Gen(GenArgs),
    /// Build the Gilbert graph of a point file.
    Graph(GraphArgs),
    /// Estimate a percolation threshold by finite-size scaling.
    Percolate(PercolateArgs),
    /// Bernoulli bond thinning of a Gilbert graph.
    Thin(ThinArgs),
    /// Run one Markov chain on a point file.
    Chain(ChainArgs),
    /// Run an experiment described by a config file.
    Sweep(SweepArgs),
    /// Wells-condition solve and one-site positivity certificate.
    Wells(WellsArgs),
    /// Summarize or re-verify a run manifest.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long)]
    side: f64,
    #[arg(long, default_value = "free")]
    boundary: BoundaryMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct GraphArgs {
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    rstar: f64,
    #[arg(short, long)]
    output: PathBuf,
    /// Also print the sparsity functionals for this α.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Estimate {
    LambdaStar,
    QStar,
}

#[derive(Args, Debug)]
struct PercolateArgs {
    #[arg(long, value_enum, default_value = "lambda-star")]
    estimate: Estimate,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 1.0)]
    rstar: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<f64>,
    /// Parameter grid (intensities or retention probabilities).
    #[arg(long, value_delimiter = ',')]
    grid: Vec<f64>,
    /// Intensity for the bond threshold.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = 200)]
    replicates: usize,
    #[arg(long, default_value_t = 400)]
    bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Threshold JSON destination (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Spanning-curve CSV destination.
    #[arg(long)]
    curves: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ThinArgs {
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    rstar: f64,
    #[arg(long)]
    q: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct ChainArgs {
    #[arg(long)]
    points: PathBuf,
    #[arg(long)]
    rstar: f64,
    #[arg(long, default_value_t = 1.0)]
    phi_star: f64,
    #[arg(long)]
    taper_peak: Option<f64>,
    #[arg(long, default_value = "ising")]
    measure: SingleSpinMeasure,
    #[arg(long)]
    beta: f64,
    /// Boundary value.
    #[arg(long, allow_negative_numbers = true)]
    s: f64,
    #[arg(long, default_value_t = 2000)]
    sweeps: usize,
    #[arg(long, default_value_t = 500)]
    burn_in: usize,
    #[arg(long, default_value_t = 1)]
    thin: usize,
    #[arg(long, default_value_t = 1.0)]
    width: f64,
    #[arg(long)]
    margin: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Chain CSV destination.
    #[arg(short, long)]
    output: PathBuf,
    /// Summary JSON destination (default: stdout).
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Experiment config (flat TOML).
    config: PathBuf,
    #[arg(long)]
    outdir: PathBuf,
    /// Override the master seed of the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct WellsArgs {
    #[arg(long)]
    measure: SingleSpinMeasure,
    /// Use this a instead of the largest feasible one.
    #[arg(long)]
    a: Option<f64>,
    #[arg(long, default_value_t = 8)]
    max_exponent: u32,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Output directory or manifest file.
    target: PathBuf,
    /// Re-run and compare every recorded file hash; exit 3 on mismatch.
    #[arg(long)]
    check: bool,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidParameter(_) | Error::Config(_) | Error::Parse { .. } => EXIT_CONFIG,
                _ => EXIT_RUNTIME,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let threads = cli.threads;
    match cli.command {
        Command::Gen(a) => gen(a, threads),
        Command::Graph(a) => graph(a),
        Command::Percolate(a) => percolate(a, threads),
        Command::Thin(a) => thin(a),
        Command::Chain(a) => chain(a),
        Command::Sweep(a) => sweep(a, threads),
        Command::Wells(a) => wells(a),
        Command::Report(a) => report(a, threads),
    }
}

fn write_to(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(p, bytes)?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Writes `output` and a sidecar manifest recording `config`.
fn single_file(command: &str, output: &Path, bytes: Vec<u8>, config: serde_json::Value, seeds: &[(&str, u64)]) -> Result<()> {
    let watch = Stopwatch::start();
    write_to(Some(output), &bytes)?;
    let mut outs = Outputs::new();
    for (k, s) in seeds {
        outs.seed(*k, *s);
    }
    outs.add(file_name(output), bytes);
    let hash = super::sha256_hex(serde_json::to_string(&config)?.as_bytes());
    watch.manifest(command, hash, config, &outs, 1).save(&sidecar_manifest_path(output))
}

#[derive(Serialize, Deserialize)]
struct GenConfig {
    lambda: f64,
    dim: usize,
    side: f64,
    boundary: BoundaryMode,
    seed: u64,
    output: String,
}

/// Re-samples the configuration recorded by a `gen` manifest.
pub(crate) fn regenerate_points(config: &serde_json::Value) -> Result<(PointConfiguration, String)> {
    let c: GenConfig = serde_json::from_value(config.clone())?;
    let w = BoxWindow::new(c.dim, c.side, c.boundary)?;
    Ok((sample_poisson(c.lambda, w, c.seed)?, c.output))
}

fn gen(a: GenArgs, _threads: Option<usize>) -> Result<i32> {
    let cfg = GenConfig { lambda: a.lambda, dim: a.dim, side: a.side, boundary: a.boundary, seed: a.seed, output: file_name(&a.output) };
    let value = serde_json::to_value(&cfg)?;
    let (points, _) = regenerate_points(&value)?;
    let mut bytes = Vec::new();
    points.write_csv(&mut bytes)?;
    single_file("gen", &a.output, bytes, value, &[("points", a.seed)])?;
    Ok(EXIT_OK)
}

fn graph(a: GraphArgs) -> Result<i32> {
    let points = PointConfiguration::load(&a.points)?;
    let g = build_graph(&points, a.rstar)?;
    let mut bytes = Vec::new();
    g.write_edges_csv(&mut bytes)?;
    let config = serde_json::json!({ "points": a.points.display().to_string(), "r_star": a.rstar });
    single_file("graph", &a.output, bytes, config, &[])?;
    if let Some(alpha) = a.alpha {
        let r = sparsity_functionals(&g, alpha, a.theta)?;
        let mut s = serde_json::to_vec_pretty(&r)?;
        s.push(b'\n');
        write_to(None, &s)?;
    }
    Ok(EXIT_OK)
}

fn percolate(a: PercolateArgs, threads: Option<usize>) -> Result<i32> {
    let mut cfg = ExperimentConfig::new("percolation-sweep");
    cfg.dim = a.dim;
    cfg.r_star = a.rstar;
    cfg.sizes = a.sizes;
    cfg.replicates = a.replicates;
    cfg.bootstrap = a.bootstrap;
    cfg.seed = a.seed;
    match a.estimate {
        Estimate::LambdaStar => {
            cfg.estimate = Some("lambda-star".into());
            cfg.lambda = a.grid;
        }
        Estimate::QStar => {
            cfg.estimate = Some("q-star".into());
            cfg.lambda = vec![a.lambda.ok_or_else(|| Error::Config("--estimate q-star needs --lambda".into()))?];
            cfg.q = if a.grid.is_empty() { (0..=10).map(|k| 0.3 + 0.05 * k as f64).collect() } else { a.grid };
        }
    }
    let (outputs, _) = compute_outputs(&cfg, threads)?;
    write_to(a.output.as_deref(), outputs.file("threshold.json").expect("threshold written"))?;
    if let Some(p) = a.curves {
        write_to(Some(&p), outputs.file("sweeps/spanning.csv").expect("curves written"))?;
    }
    Ok(EXIT_OK)
}

fn thin(a: ThinArgs) -> Result<i32> {
    let points = PointConfiguration::load(&a.points)?;
    let g = bernoulli_thin(&build_graph(&points, a.rstar)?, a.q, a.seed)?;
    let mut bytes = Vec::new();
    g.write_edges_csv(&mut bytes)?;
    let config = serde_json::json!({ "points": a.points.display().to_string(), "r_star": a.rstar, "q": a.q, "seed": a.seed });
    single_file("thin", &a.output, bytes, config, &[("thinning", a.seed)])?;
    Ok(EXIT_OK)
}

fn chain(a: ChainArgs) -> Result<i32> {
    let points = PointConfiguration::load(&a.points)?;
    let g = build_graph(&points, a.rstar)?;
    let profile = match a.taper_peak {
        Some(p) => InteractionProfile::linear_taper(a.phi_star, p, a.rstar)?,
        None => InteractionProfile::constant(a.phi_star, a.rstar)?,
    };
    let interior = box_interior(&g, a.margin.unwrap_or(a.rstar));
    let mut subset = central_cluster_subset(&g, &interior);
    if subset.is_empty() {
        subset = (0..g.len()).filter(|&x| interior[x]).collect();
    }
    let mut cfg = ChainConfig::new(a.beta, a.sweeps, a.burn_in, a.seed);
    cfg.thin = a.thin;
    cfg.proposal_width = a.width;
    let r = run_chain(&g, &interior, &a.measure, &profile, a.s, &cfg, &subset)?;
    let mut bytes = Vec::new();
    r.write_csv(&mut bytes)?;
    let config = serde_json::json!({
        "points": a.points.display().to_string(), "r_star": a.rstar, "phi_star": a.phi_star,
        "taper_peak": a.taper_peak, "measure": a.measure.to_string(), "beta": a.beta, "s": a.s,
        "sweeps": a.sweeps, "burn_in": a.burn_in, "thin": a.thin, "width": a.width, "seed": a.seed,
    });
    single_file("chain", &a.output, bytes, config, &[("chain", a.seed)])?;
    let summary = serde_json::json!({
        "beta": a.beta, "lambda": points.intensity, "s": a.s, "m_mean": r.m_mean, "m_se": r.m_se,
        "tau_int": r.tau_int, "seeds": [a.seed],
    });
    let mut s = serde_json::to_vec_pretty(&summary)?;
    s.push(b'\n');
    write_to(a.summary.as_deref(), &s)?;
    Ok(EXIT_OK)
}

fn sweep(a: SweepArgs, threads: Option<usize>) -> Result<i32> {
    let mut cfg = ExperimentConfig::load(&a.config)?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let m = run_experiment(&cfg, &a.outdir, threads)?;
    eprintln!("{} files written to {} in {:.1}s", m.files.len(), a.outdir.display(), m.wall_clock_seconds);
    Ok(EXIT_OK)
}

fn wells(a: WellsArgs) -> Result<i32> {
    let value = match a.a {
        Some(v) => v,
        None => find_a(&a.measure, a.tol)?.usable(),
    };
    let c = verify_one_site_positivity(&a.measure, value, a.max_exponent, a.tol)?;
    let mut s = c.to_json()?.into_bytes();
    s.push(b'\n');
    write_to(a.output.as_deref(), &s)?;
    Ok(EXIT_OK)
}

fn report(a: ReportArgs, threads: Option<usize>) -> Result<i32> {
    let path = if a.target.is_dir() { a.target.join("manifest.json") } else { a.target.clone() };
    let manifest = RunManifest::load(&path)?;
    let mut out = String::new();
    out.push_str(&format!("command: {}\nversion: {}\nconfig: {}\n", manifest.command, manifest.version, manifest.config_hash));
    for f in &manifest.files {
        out.push_str(&format!("  {}  {}  {} bytes\n", f.sha256, f.path, f.bytes));
    }
    write_to(None, out.as_bytes())?;
    if !a.check {
        return Ok(EXIT_OK);
    }
    let (bad, _) = with_threads(threads, || recheck_manifest(&manifest, threads))?;
    let bad = bad?;
    if bad.is_empty() {
        println!("check: all {} files reproduced", manifest.files.len());
        Ok(EXIT_OK)
    } else {
        eprintln!("check failed: {}", bad.join(", "));
        Ok(EXIT_CHECK)
    }
}
