use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParamsError {
    #[error("path-loss exponent must exceed 2, got {0}")]
    Alpha(f64),
    #[error("SINR threshold must be at least 1, got {0}")]
    Beta(f64),
    #[error("{0} must be positive, got {1}")]
    NonPositive(&'static str, f64),
}

/// Constants of the uniform-power SINR model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinrParams<T> {
    pub alpha: T,
    pub beta: T,
    pub noise: T,
    pub epsilon: T,
    pub power: T,
}

impl<T: Real> SinrParams<T> {
    pub fn new(alpha: T, beta: T, noise: T, epsilon: T, power: T) -> Result<Self, ParamsError> {
        let p = Self { alpha, beta, noise, epsilon, power };
        p.validate()?;
        Ok(p)
    }

    /// `power = beta = noise = 1` with the given path loss and sensitivity.
    pub fn normalized(alpha: T, epsilon: T) -> Result<Self, ParamsError> {
        Self::new(alpha, T::one(), T::one(), epsilon, T::one())
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        let f = |v: T| v.to_f64_lossy();
        if !(self.alpha > T::lit(2.0)) {
            return Err(ParamsError::Alpha(f(self.alpha)));
        }
        if !(self.beta >= T::one()) {
            return Err(ParamsError::Beta(f(self.beta)));
        }
        for (name, v) in [("noise", self.noise), ("epsilon", self.epsilon), ("power", self.power)] {
            if !(v > T::zero()) {
                return Err(ParamsError::NonPositive(name, f(v)));
            }
        }
        Ok(())
    }

    /// Minimum received power accepted by a receiver: `(1+eps)·beta·noise`.
    pub fn sensitivity(&self) -> T {
        (T::one() + self.epsilon) * self.beta * self.noise
    }

    /// Communication range `r`.
    pub fn range(&self) -> T {
        (self.power / self.sensitivity()).powf(T::one() / self.alpha)
    }

    /// Side of the pivotal grid boxes, `r / sqrt(2)`.
    pub fn gamma(&self) -> T {
        self.range() / T::lit(2.0).sqrt()
    }

    /// Received power at distance `d`.
    pub fn signal_at(&self, d: T) -> T {
        self.power * d.powf(-self.alpha)
    }
}

impl Default for SinrParams<f64> {
    fn default() -> Self {
        Self { alpha: 3.0, beta: 1.0, noise: 1.0, epsilon: 0.5, power: 1.0 }
    }
}

impl Default for SinrParams<f32> {
    fn default() -> Self {
        Self { alpha: 3.0, beta: 1.0, noise: 1.0, epsilon: 0.5, power: 1.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_range_matches_closed_form() {
        let p = SinrParams::<f64>::normalized(3.0, 0.5).unwrap();
        let expected = 1.5f64.powf(-1.0 / 3.0);
        assert!((p.range() - expected).abs() < 1e-15);
        assert!((p.gamma() * 2f64.sqrt() - p.range()).abs() < 1e-15);
    }

    #[test]
    fn general_constants_enter_range() {
        let p = SinrParams::<f64>::new(4.0, 2.0, 0.5, 1.0, 8.0).unwrap();
        // (8 / (2 * 2 * 0.5))^(1/4) = 4^(1/4)
        assert!((p.range() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid() {
        assert!(matches!(SinrParams::<f64>::normalized(2.0, 0.5), Err(ParamsError::Alpha(_))));
        assert!(matches!(SinrParams::<f64>::new(3.0, 0.9, 1.0, 0.5, 1.0), Err(ParamsError::Beta(_))));
        assert!(SinrParams::<f64>::new(3.0, 1.0, 0.0, 0.5, 1.0).is_err());
        assert!(SinrParams::<f64>::normalized(3.0, 0.0).is_err());
    }

    #[test]
    fn works_for_f32() {
        let p = SinrParams::<f32>::default();
        assert!(p.range() < 1.0 && p.range() > 0.8);
    }
}
