use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum ProfileShape {
    Constant,
    /// Decreases linearly from `peak` at r = 0 to `φ*` at r = r*.
    LinearTaper { peak: f64 },
}

/// Pair interaction `φ(r)`: at least `phi_star` on `[0, r_star]`, zero beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionProfile {
    pub phi_star: f64,
    pub r_star: f64,
    pub shape: ProfileShape,
    /// Overall multiplier, used for the rescaled Ising comparison model.
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

impl InteractionProfile {
    pub fn constant(phi_star: f64, r_star: f64) -> Result<Self> {
        let p = InteractionProfile { phi_star, r_star, shape: ProfileShape::Constant, scale: 1.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn linear_taper(phi_star: f64, peak: f64, r_star: f64) -> Result<Self> {
        let p = InteractionProfile { phi_star, r_star, shape: ProfileShape::LinearTaper { peak }, scale: 1.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.phi_star > 0.0 && self.phi_star.is_finite()) {
            return Err(Error::invalid(format!("phi_star must be positive, got {}", self.phi_star)));
        }
        if !(self.r_star > 0.0 && self.r_star.is_finite()) {
            return Err(Error::invalid(format!("interaction range must be positive, got {}", self.r_star)));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::invalid(format!("interaction scale must be positive, got {}", self.scale)));
        }
        if let ProfileShape::LinearTaper { peak } = self.shape {
            if !(peak >= self.phi_star && peak.is_finite()) {
                return Err(Error::invalid(format!("taper peak {peak} below phi_star {}", self.phi_star)));
            }
        }
        Ok(())
    }

    /// The same shape multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        InteractionProfile { scale: self.scale * factor, ..*self }
    }

    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        if r > self.r_star {
            return 0.0;
        }
        let base = match self.shape {
            ProfileShape::Constant => self.phi_star,
            ProfileShape::LinearTaper { peak } => peak - (peak - self.phi_star) * (r / self.r_star),
        };
        self.scale * base
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        let c = InteractionProfile::constant(0.7, 1.0).unwrap();
        assert_eq!(c.value(0.0), 0.7);
        assert_eq!(c.value(1.0), 0.7);
        assert_eq!(c.value(1.0 + 1e-12), 0.0);
        let t = InteractionProfile::linear_taper(1.0, 3.0, 2.0).unwrap();
        assert_eq!(t.value(0.0), 3.0);
        assert_eq!(t.value(1.0), 2.0);
        assert_eq!(t.value(2.0), 1.0);
        assert!((0..=100).all(|k| t.value(2.0 * k as f64 / 100.0) >= 1.0));
        assert_eq!(c.scaled(4.0).value(0.5), 2.8);
    }

    #[test]
    fn rejects_bad_profiles() {
        assert!(InteractionProfile::constant(0.0, 1.0).is_err());
        assert!(InteractionProfile::constant(1.0, -1.0).is_err());
        assert!(InteractionProfile::linear_taper(1.0, 0.5, 1.0).is_err());
    }
}
