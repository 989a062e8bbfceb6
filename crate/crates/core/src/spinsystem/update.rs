//! Single-site update rules and their registry.
//!
//! Each rule leaves the single-site conditional `∝ exp(β h σ) χ(dσ)` invariant
//! and is equivariant under the global flip `(σ, h, u₁) ↦ (−σ, −h, 1 − u₁)`.

use crate::error::{Error, Result};

use super::measure::SingleSpinMeasure;
use super::profile::InteractionProfile;
use super::state::{local_field, SpinState};

/// One site update: maps the current spin, its local field and a pair of
/// uniforms to the new spin.
pub trait SiteUpdate: Send + Sync {
    fn name(&self) -> &'static str;

    fn supports(&self, measure: &SingleSpinMeasure) -> bool;

    fn update(&self, measure: &SingleSpinMeasure, current: f64, field: f64, beta: f64, u: [f64; 2]) -> f64;

    /// Proposal scale, for rules that have one.
    fn width(&self) -> Option<f64> {
        None
    }

    fn with_width(&self, _width: f64) -> Box<dyn SiteUpdate> {
        self.boxed()
    }

    fn boxed(&self) -> Box<dyn SiteUpdate>;
}

/// Probability of `+1` under the Ising heat-bath rule, `e^{βh}/(e^{βh}+e^{−βh})`.
///
/// For `h < 0` it is computed as `1 − p(−h)`, which keeps the rule exactly
/// flip-equivariant in floating point.
#[inline]
pub fn heat_bath_plus_probability(beta: f64, field: f64) -> f64 {
    let p = |h: f64| 1.0 / (1.0 + (-2.0 * beta * h).exp());
    if field >= 0.0 {
        p(field)
    } else {
        1.0 - p(-field)
    }
}

/// Heat bath for ±1 spins.
#[derive(Debug, Clone, Copy, Default)]
pub struct HeatBath;

impl SiteUpdate for HeatBath {
    fn name(&self) -> &'static str {
        "heat-bath"
    }

    fn supports(&self, measure: &SingleSpinMeasure) -> bool {
        measure.is_atomic()
    }

    #[inline]
    fn update(&self, _measure: &SingleSpinMeasure, _current: f64, field: f64, beta: f64, u: [f64; 2]) -> f64 {
        if u[0] < heat_bath_plus_probability(beta, field) {
            1.0
        } else {
            -1.0
        }
    }

    fn boxed(&self) -> Box<dyn SiteUpdate> {
        Box::new(*self)
    }
}

/// Acceptance probability of a Metropolis move `from → to`.
#[inline]
pub fn metropolis_acceptance(measure: &SingleSpinMeasure, beta: f64, field: f64, from: f64, to: f64) -> f64 {
    let log_ratio = beta * field * (to - from) + measure.log_density(to) - measure.log_density(from);
    if log_ratio >= 0.0 {
        1.0
    } else {
        log_ratio.exp()
    }
}

/// Symmetric random-walk Metropolis for continuous spins.
#[derive(Debug, Clone, Copy)]
pub struct Metropolis {
    pub width: f64,
}

impl SiteUpdate for Metropolis {
    fn name(&self) -> &'static str {
        "metropolis"
    }

    fn supports(&self, measure: &SingleSpinMeasure) -> bool {
        !measure.is_atomic()
    }

    #[inline]
    fn update(&self, measure: &SingleSpinMeasure, current: f64, field: f64, beta: f64, u: [f64; 2]) -> f64 {
        let proposal = current + self.width * (2.0 * u[0] - 1.0);
        if u[1] < metropolis_acceptance(measure, beta, field, current, proposal) {
            proposal
        } else {
            current
        }
    }

    fn width(&self) -> Option<f64> {
        Some(self.width)
    }

    fn with_width(&self, width: f64) -> Box<dyn SiteUpdate> {
        Box::new(Metropolis { width })
    }

    fn boxed(&self) -> Box<dyn SiteUpdate> {
        Box::new(*self)
    }
}

type Factory = fn(f64) -> Box<dyn SiteUpdate>;

/// Update rules selectable by name.
pub const UPDATE_RULES: &[(&str, Factory)] = &[
    ("heat-bath", |_| Box::new(HeatBath)),
    ("metropolis", |w| Box::new(Metropolis { width: w })),
];

/// Look up an update rule by name; `width` parameterises proposal-based rules.
pub fn update_rule(name: &str, width: f64) -> Result<Box<dyn SiteUpdate>> {
    UPDATE_RULES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, make)| make(width))
        .ok_or_else(|| {
            let known: Vec<&str> = UPDATE_RULES.iter().map(|(n, _)| *n).collect();
            Error::invalid(format!("unknown update rule `{name}` (known: {})", known.join(", ")))
        })
}

/// Heat bath for Ising measures, Metropolis otherwise.
pub fn default_rule(measure: &SingleSpinMeasure, width: f64) -> Box<dyn SiteUpdate> {
    if measure.is_atomic() {
        Box::new(HeatBath)
    } else {
        Box::new(Metropolis { width })
    }
}

/// Heat-bath update of interior site `x`.
pub fn heat_bath_step_ising(state: &mut SpinState<'_>, profile: &InteractionProfile, x: usize, beta: f64, u: f64) {
    let h = local_field(state, profile, x);
    let v = HeatBath.update(&SingleSpinMeasure::Ising, state.spin(x), h, beta, [u, 0.0]);
    state.set(x, v);
}

/// Metropolis update of interior site `x` with proposal half-width `width`.
pub fn metropolis_step_continuous(
    state: &mut SpinState<'_>,
    measure: &SingleSpinMeasure,
    profile: &InteractionProfile,
    x: usize,
    beta: f64,
    width: f64,
    u1: f64,
    u2: f64,
) {
    let h = local_field(state, profile, x);
    let v = Metropolis { width }.update(measure, state.spin(x), h, beta, [u1, u2]);
    state.set(x, v);
}
