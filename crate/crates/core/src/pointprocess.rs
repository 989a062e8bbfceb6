//! Homogeneous Poisson configurations in origin-centred boxes.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Purpose};

/// Coordinates are stored padded to three components; the third is zero in d=2.
pub type Point = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    #[default]
    Free,
    Torus,
}

impl fmt::Display for BoundaryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryMode::Free => "free",
            BoundaryMode::Torus => "torus",
        })
    }
}

impl FromStr for BoundaryMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(BoundaryMode::Free),
            "torus" => Ok(BoundaryMode::Torus),
            other => Err(Error::invalid(format!("boundary mode `{other}`"))),
        }
    }
}

/// The box `[−L/2, L/2]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxWindow {
    dim: usize,
    side: f64,
    mode: BoundaryMode,
}

impl BoxWindow {
    pub fn new(dim: usize, side: f64, mode: BoundaryMode) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::invalid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::invalid(format!("side must be positive, got {side}")));
        }
        Ok(BoxWindow { dim, side, mode })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn mode(&self) -> BoundaryMode {
        self.mode
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    pub fn contains(&self, p: &Point) -> bool {
        let h = 0.5 * self.side;
        p[..self.dim].iter().all(|&c| (-h..=h).contains(&c))
    }

    /// Displacement `q − p` under the window's metric (minimal image on the torus).
    #[inline]
    pub fn displacement(&self, p: &Point, q: &Point) -> Point {
        let mut d = [0.0; 3];
        for k in 0..self.dim {
            let mut dx = q[k] - p[k];
            if self.mode == BoundaryMode::Torus {
                dx -= self.side * (dx / self.side).round();
            }
            d[k] = dx;
        }
        d
    }

    #[inline]
    pub fn distance_sq(&self, p: &Point, q: &Point) -> f64 {
        let d = self.displacement(p, q);
        d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
    }

    #[inline]
    pub fn distance(&self, p: &Point, q: &Point) -> f64 {
        self.distance_sq(p, q).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointConfiguration {
    pub window: BoxWindow,
    pub points: Vec<Point>,
    pub intensity: f64,
    pub seed: u64,
}

impl PointConfiguration {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Build a configuration from explicit coordinates (tests, files).
    pub fn from_points(window: BoxWindow, points: Vec<Point>, intensity: f64, seed: u64) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !window.contains(p)) {
            return Err(Error::invalid(format!("point {p:?} outside the window")));
        }
        Ok(PointConfiguration { window, points, intensity, seed })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let d = self.window.dim();
        writeln!(w, "# dim={d}")?;
        writeln!(w, "# side={}", self.window.side())?;
        writeln!(w, "# lambda={}", self.intensity)?;
        writeln!(w, "# seed={}", self.seed)?;
        writeln!(w, "# boundary={}", self.window.mode())?;
        for p in &self.points {
            let row: Vec<String> = p[..d].iter().map(|c| c.to_string()).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R, path: &Path) -> Result<Self> {
        let perr = |msg: String| Error::Parse { path: path.to_path_buf(), msg };
        let (mut dim, mut side, mut lambda, mut seed, mut mode) = (None, None, None, None, None);
        let mut rows = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                let Some((k, v)) = h.trim().split_once('=') else { continue };
                let v = v.trim();
                let bad = |_| perr(format!("line {}: bad header value `{v}`", lineno + 1));
                match k.trim() {
                    "dim" => dim = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                    "side" => side = Some(v.parse::<f64>().map_err(|e| bad(e.to_string()))?),
                    "lambda" => lambda = Some(v.parse::<f64>().map_err(|e| bad(e.to_string()))?),
                    "seed" => seed = Some(v.parse::<u64>().map_err(|e| bad(e.to_string()))?),
                    "boundary" => mode = Some(v.parse::<BoundaryMode>().map_err(|e| bad(e.to_string()))?),
                    _ => {}
                }
                continue;
            }
            let mut p = [0.0; 3];
            let mut k = 0;
            for field in line.split(',') {
                if k == 3 {
                    return Err(perr(format!("line {}: too many coordinates", lineno + 1)));
                }
                p[k] = field
                    .trim()
                    .parse()
                    .map_err(|_| perr(format!("line {}: bad coordinate `{field}`", lineno + 1)))?;
                k += 1;
            }
            rows.push((lineno + 1, k, p));
        }
        let dim = dim.ok_or_else(|| perr("missing `# dim=` header".into()))?;
        let side = side.ok_or_else(|| perr("missing `# side=` header".into()))?;
        let window = BoxWindow::new(dim, side, mode.unwrap_or(BoundaryMode::Free))?;
        let mut points = Vec::with_capacity(rows.len());
        for (lineno, k, p) in rows {
            if k != dim {
                return Err(perr(format!("line {lineno}: expected {dim} coordinates, got {k}")));
            }
            points.push(p);
        }
        PointConfiguration::from_points(window, points, lambda.unwrap_or(f64::NAN), seed.unwrap_or(0))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(f)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_csv(f, path)
    }
}

/// Sample a homogeneous Poisson configuration of intensity `lambda` in `window`.
///
/// The count is drawn first, then the points are placed independently and
/// uniformly. The result depends only on `(lambda, window, seed)`.
pub fn sample_poisson(lambda: f64, window: BoxWindow, seed: u64) -> Result<PointConfiguration> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("intensity must be positive, got {lambda}")));
    }
    let mean = lambda * window.volume();
    let mut rng = rng::stream(seed, Purpose::Points, 0);
    let count = Poisson::new(mean)
        .map_err(|e| Error::invalid(format!("Poisson mean {mean}: {e}")))?
        .sample(&mut rng) as usize;
    let (d, side) = (window.dim(), window.side());
    let h = 0.5 * side;
    let points = (0..count)
        .map(|_| {
            let mut p = [0.0; 3];
            for c in p.iter_mut().take(d) {
                *c = -h + side * rng.random::<f64>();
            }
            p
        })
        .collect();
    Ok(PointConfiguration { window, points, intensity: lambda, seed })
}

/// Volume of the Euclidean ball of radius `r`.
pub fn ball_volume(d: usize, r: f64) -> Result<f64> {
    if r < 0.0 || r.is_nan() {
        return Err(Error::invalid(format!("radius must be nonnegative, got {r}")));
    }
    match d {
        2 => Ok(std::f64::consts::PI * r * r),
        3 => Ok(4.0 / 3.0 * std::f64::consts::PI * r * r * r),
        _ => Err(Error::invalid(format!("unsupported dimension {d}"))),
    }
}

/// Mean number of isolated points on the torus, `λ L^d exp(−λ V(r*))`.
pub fn expected_isolated_count(lambda: f64, r_star: f64, window: &BoxWindow) -> Result<f64> {
    if window.mode() != BoundaryMode::Torus {
        return Err(Error::Unsupported("isolated-count closed form needs torus boundary".into()));
    }
    if !(lambda > 0.0) {
        return Err(Error::invalid(format!("intensity must be positive, got {lambda}")));
    }
    let v = ball_volume(window.dim(), r_star)?;
    Ok(lambda * window.volume() * (-lambda * v).exp())
}

/// `e^{−κ} Σ_{k≥1} k^ϑ κ^k / k!`, the ϑ-th moment of a Poisson(κ) variable.
///
/// Terms are summed in log space; summation stops past the mode once a term
/// falls below `truncation_tol`.
pub fn poisson_weighted_moment(theta_exp: f64, kappa: f64, truncation_tol: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::invalid(format!("kappa must be positive, got {kappa}")));
    }
    if !(theta_exp >= 0.0) {
        return Err(Error::invalid(format!("exponent must be nonnegative, got {theta_exp}")));
    }
    if !(truncation_tol > 0.0) {
        return Err(Error::invalid("truncation tolerance must be positive"));
    }
    let ln_kappa = kappa.ln();
    let mut ln_fact = 0.0;
    let mut sum = 0.0;
    let mut k = 1u64;
    loop {
        let kf = k as f64;
        ln_fact += kf.ln();
        let term = (theta_exp * kf.ln() + kf * ln_kappa - ln_fact - kappa).exp();
        sum += term;
        if kf > kappa + theta_exp && term < truncation_tol {
            break;
        }
        k += 1;
        if k > 10_000_000 {
            return Err(Error::Numerical("Poisson moment series did not converge".into()));
        }
    }
    Ok(sum)
}
