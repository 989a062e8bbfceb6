use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

/// Natural log of the density ratio below which the tail of a density is cut.
pub const TRUNCATION_LOG_RATIO: f64 = 36.841_361_487_904_734; // ln 1e16

/// Absolute tolerance used for moments of continuous single-spin measures.
pub const DEFAULT_TOL: f64 = 1e-12;

/// A priori law of one spin. Every variant is symmetric under `t ↦ −t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum SingleSpinMeasure {
    /// Atoms of mass ½ at ±1.
    Ising,
    /// Uniform law on `[−half_width, half_width]`.
    UniformInterval { half_width: f64 },
    /// Density `∝ exp(−(v4 t⁴ + v2 t²))`. With `v4 = 0` and `v2 > 0` this is a
    /// centred Gaussian.
    GibbsDensity { v4: f64, v2: f64 },
}

impl SingleSpinMeasure {
    pub fn quartic(v4: f64, v2: f64) -> Result<Self> {
        let m = SingleSpinMeasure::GibbsDensity { v4, v2 };
        m.validate()?;
        Ok(m)
    }

    /// Double-well measure `exp(−(t⁴ − 2t²))`, wells at ±1.
    pub fn double_well() -> Self {
        SingleSpinMeasure::GibbsDensity { v4: 1.0, v2: -2.0 }
    }

    /// Standard normal law.
    pub fn gaussian() -> Self {
        SingleSpinMeasure::GibbsDensity { v4: 0.0, v2: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SingleSpinMeasure::Ising => Ok(()),
            SingleSpinMeasure::UniformInterval { half_width } => {
                if half_width > 0.0 && half_width.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid(format!("uniform half-width must be positive, got {half_width}")))
                }
            }
            SingleSpinMeasure::GibbsDensity { v4, v2 } => {
                if !(v4.is_finite() && v2.is_finite()) || v4 < 0.0 || (v4 == 0.0 && !(v2 > 0.0)) {
                    Err(Error::invalid(format!("density exp(−({v4}t⁴ + {v2}t²)) is not normalizable")))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, SingleSpinMeasure::Ising)
    }

    pub fn atoms(&self) -> &'static [(f64, f64)] {
        match self {
            SingleSpinMeasure::Ising => &[(-1.0, 0.5), (1.0, 0.5)],
            _ => &[],
        }
    }

    /// Unnormalized log density `−V(t)`; `−∞` outside the support.
    /// Only meaningful for continuous variants.
    #[inline]
    pub fn log_density(&self, t: f64) -> f64 {
        match *self {
            SingleSpinMeasure::Ising => f64::NAN,
            SingleSpinMeasure::UniformInterval { half_width } => {
                if t.abs() <= half_width {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            SingleSpinMeasure::GibbsDensity { v4, v2 } => {
                let t2 = t * t;
                -(v4 * t2 * t2 + v2 * t2)
            }
        }
    }

    /// Symmetric interval outside of which the density, tilted by
    /// `exp(tilt·|t|)`, falls below `10⁻¹⁶` of its maximum.
    pub fn truncation_radius(&self, tilt: f64) -> f64 {
        match *self {
            SingleSpinMeasure::Ising => 1.0,
            SingleSpinMeasure::UniformInterval { half_width } => half_width,
            SingleSpinMeasure::GibbsDensity { .. } => {
                let w = |t: f64| -self.log_density(t) - tilt * t;
                // Grow an upper bracket until W has climbed well past its minimum.
                let mut hi: f64 = 1.0;
                let mut wmin = w(0.0);
                loop {
                    let n = 4000;
                    wmin = (0..=n).map(|k| w(hi * k as f64 / n as f64)).fold(wmin, f64::min);
                    if w(hi) - wmin > TRUNCATION_LOG_RATIO {
                        break;
                    }
                    hi *= 2.0;
                    if hi > 1e8 {
                        return hi;
                    }
                }
                // Bisection from the right on W(t) − Wmin = ln 1e16.
                let mut lo = hi * 0.5;
                while w(lo) - wmin > TRUNCATION_LOG_RATIO && lo > 1e-12 {
                    lo *= 0.5;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if w(mid) - wmin > TRUNCATION_LOG_RATIO {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
        }
    }

    /// Normalizing constant of the density on its truncated support.
    pub fn normalization(&self, tol: f64) -> Result<f64> {
        match *self {
            SingleSpinMeasure::Ising => Ok(1.0),
            SingleSpinMeasure::UniformInterval { half_width } => Ok(2.0 * half_width),
            SingleSpinMeasure::GibbsDensity { .. } => {
                let t = self.truncation_radius(0.0);
                quadrature::integrate(|x| self.log_density(x).exp(), -t, t, tol)
            }
        }
    }

    /// `∫ f dχ` to absolute accuracy `tol`.
    pub fn expectation<F: Fn(f64) -> f64>(&self, f: F, tol: f64) -> Result<f64> {
        match *self {
            SingleSpinMeasure::Ising => Ok(self.atoms().iter().map(|&(t, w)| w * f(t)).sum()),
            SingleSpinMeasure::UniformInterval { half_width } => {
                let b = half_width;
                Ok(quadrature::integrate(&f, -b, b, tol * 2.0 * b)? / (2.0 * b))
            }
            SingleSpinMeasure::GibbsDensity { .. } => {
                let z = self.normalization(tol)?;
                let t = self.truncation_radius(0.0);
                Ok(quadrature::integrate(|x| f(x) * self.log_density(x).exp(), -t, t, tol * z)? / z)
            }
        }
    }

    /// `χ([lo, hi])` for a closed interval; atoms on the endpoints count.
    pub fn mass(&self, lo: f64, hi: f64, tol: f64) -> Result<f64> {
        if hi < lo {
            return Ok(0.0);
        }
        match *self {
            SingleSpinMeasure::Ising => {
                Ok(self.atoms().iter().filter(|&&(t, _)| lo <= t && t <= hi).map(|&(_, w)| w).sum())
            }
            SingleSpinMeasure::UniformInterval { half_width } => {
                let b = half_width;
                Ok((hi.min(b) - lo.max(-b)).max(0.0) / (2.0 * b))
            }
            SingleSpinMeasure::GibbsDensity { .. } => {
                let t = self.truncation_radius(0.0);
                let (a, b) = (lo.max(-t), hi.min(t));
                if b <= a {
                    return Ok(0.0);
                }
                let z = self.normalization(tol)?;
                Ok(quadrature::integrate(|x| self.log_density(x).exp(), a, b, tol * z)? / z)
            }
        }
    }

    pub fn variance(&self) -> Result<f64> {
        match *self {
            SingleSpinMeasure::Ising => Ok(1.0),
            SingleSpinMeasure::UniformInterval { half_width } => Ok(half_width * half_width / 3.0),
            SingleSpinMeasure::GibbsDensity { .. } => self.expectation(|t| t * t, DEFAULT_TOL),
        }
    }
}

impl fmt::Display for SingleSpinMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingleSpinMeasure::Ising => write!(f, "ising"),
            SingleSpinMeasure::UniformInterval { half_width } => write!(f, "uniform:{half_width}"),
            SingleSpinMeasure::GibbsDensity { v4, v2 } => write!(f, "quartic:{v4},{v2}"),
        }
    }
}

/// Parses `ising`, `uniform:<b>`, `quartic:<v4>,<v2>`, `double-well`, `gaussian`.
impl FromStr for SingleSpinMeasure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, args) = s.split_once(':').unwrap_or((s, ""));
        let nums = || -> Result<Vec<f64>> {
            args.split(',')
                .filter(|a| !a.trim().is_empty())
                .map(|a| a.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad number `{a}` in `{s}`"))))
                .collect()
        };
        let m = match head {
            "ising" => SingleSpinMeasure::Ising,
            "uniform" => match nums()?.as_slice() {
                [] => SingleSpinMeasure::UniformInterval { half_width: 1.0 },
                [b] => SingleSpinMeasure::UniformInterval { half_width: *b },
                _ => return Err(Error::invalid(format!("`{s}`: expected uniform:<half_width>"))),
            },
            "quartic" => match nums()?.as_slice() {
                [v4, v2] => SingleSpinMeasure::GibbsDensity { v4: *v4, v2: *v2 },
                _ => return Err(Error::invalid(format!("`{s}`: expected quartic:<v4>,<v2>"))),
            },
            "double-well" => SingleSpinMeasure::double_well(),
            "gaussian" => SingleSpinMeasure::gaussian(),
            other => return Err(Error::invalid(format!("unknown single-spin measure `{other}`"))),
        };
        m.validate()?;
        Ok(m)
    }
}
