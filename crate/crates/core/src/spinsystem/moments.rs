use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

use super::measure::{SingleSpinMeasure, DEFAULT_TOL, TRUNCATION_LOG_RATIO};

/// Outcome of the exponential moment check `∫ exp(κ|t|^u) χ(dt)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", content = "value", rename_all = "snake_case")]
pub enum MomentCheck {
    Finite(f64),
    Divergent,
}

impl MomentCheck {
    pub fn is_finite(&self) -> bool {
        matches!(self, MomentCheck::Finite(_))
    }
}

/// Evaluates `∫ exp(κ|t|^u) χ(dt)`, reporting divergence when the tilt
/// outgrows the tail of χ.
pub fn check_moment_condition(measure: &SingleSpinMeasure, u: f64, kappa: f64) -> Result<MomentCheck> {
    if !(u > 2.0 && u.is_finite()) {
        return Err(Error::invalid(format!("moment exponent must exceed 2, got {u}")));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::invalid(format!("kappa must be positive, got {kappa}")));
    }
    measure.validate()?;
    let tilt = |t: f64| kappa * t.abs().powf(u);
    match *measure {
        SingleSpinMeasure::Ising => Ok(MomentCheck::Finite(kappa.exp())),
        SingleSpinMeasure::UniformInterval { half_width } => {
            let b = half_width;
            let scale = tilt(b).exp();
            let v = quadrature::integrate(|t| (tilt(t) - tilt(b)).exp(), 0.0, b, DEFAULT_TOL)?;
            Ok(MomentCheck::Finite(v * scale / b))
        }
        SingleSpinMeasure::GibbsDensity { v4, v2 } => {
            // Leading tail exponent of the density against that of the tilt.
            let (lead, coef, next) = if v4 > 0.0 { (4.0, v4, v2) } else { (2.0, v2, 0.0) };
            let divergent = u > lead || (u == lead && (kappa > coef || (kappa == coef && next <= 0.0)));
            if divergent {
                return Ok(MomentCheck::Divergent);
            }
            let log_f = |t: f64| tilt(t) + measure.log_density(t);
            let peak = peak_on_half_line(log_f);
            let mut hi = 1.0f64;
            while log_f(hi) > peak - TRUNCATION_LOG_RATIO {
                hi *= 2.0;
                if hi > 1e8 {
                    return Ok(MomentCheck::Divergent);
                }
            }
            let z = measure.normalization(DEFAULT_TOL)?;
            let v = quadrature::integrate(|t| (log_f(t) - peak).exp(), 0.0, hi, DEFAULT_TOL)?;
            let value = 2.0 * v * peak.exp() / z;
            if value.is_finite() {
                Ok(MomentCheck::Finite(value))
            } else {
                Ok(MomentCheck::Divergent)
            }
        }
    }
}

fn peak_on_half_line<F: Fn(f64) -> f64>(f: F) -> f64 {
    let mut best = f(0.0);
    let mut hi = 1.0;
    loop {
        let m = (0..=2000).map(|k| f(hi * k as f64 / 2000.0)).fold(best, f64::max);
        if m <= best && f(hi) < best - TRUNCATION_LOG_RATIO {
            return best;
        }
        best = m;
        hi *= 2.0;
        if hi > 1e8 {
            return best;
        }
    }
}
