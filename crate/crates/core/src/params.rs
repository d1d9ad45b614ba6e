//! Model parameters, their validation, and the electron-hole duality map.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The five real parameters of the strong-coupling BCS-Hubbard Hamiltonian:
/// inverse temperature, chemical potential, one-site repulsion, BCS coupling
/// and magnetic field. All in the same (dimensionless) energy units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub beta: f64,
    pub mu: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("beta must be strictly positive")]
    NonPositiveBeta,
    #[error("gamma must be strictly positive")]
    NonPositiveGamma,
    #[error("all parameters must be finite")]
    NonFinite,
}

impl ModelParams {
    /// Validate the five raw values. The analysis requires beta > 0 and
    /// gamma > 0 (the gamma = 0 model is trivial and is rejected so that no
    /// downstream denominator can vanish).
    pub fn new(beta: f64, mu: f64, lambda: f64, gamma: f64, h: f64) -> Result<Self, ParamError> {
        for v in [beta, mu, lambda, gamma, h] {
            if !v.is_finite() {
                return Err(ParamError::NonFinite);
            }
        }
        if beta <= 0.0 {
            return Err(ParamError::NonPositiveBeta);
        }
        if gamma <= 0.0 {
            return Err(ParamError::NonPositiveGamma);
        }
        Ok(Self {
            beta,
            mu,
            lambda,
            gamma,
            h,
        })
    }

    /// Validate a deserialized value (same checks as [`ModelParams::new`]).
    pub fn validated(self) -> Result<Self, ParamError> {
        Self::new(self.beta, self.mu, self.lambda, self.gamma, self.h)
    }

    /// The electron-hole dual parameter point: (mu, h) -> (2 lambda - mu, -h).
    ///
    /// This is the infinite-volume map; the O(1/N) shift of the hole chemical
    /// potential at finite N vanishes in the thermodynamic limit and is not
    /// part of this transform.
    pub fn hole_dual(&self) -> Self {
        Self {
            beta: self.beta,
            mu: 2.0 * self.lambda - self.mu,
            lambda: self.lambda,
            gamma: self.gamma,
            h: -self.h,
        }
    }

    /// mu - lambda, the detuning from half filling.
    pub(crate) fn detuning(&self) -> f64 {
        self.mu - self.lambda
    }
}

/// One-site observable densities: electron density d in [0,2], magnetization
/// m in [-1,1] and Coulomb correlation (double occupancy) w in [0,1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityVector {
    pub d: f64,
    pub m: f64,
    pub w: f64,
}

impl DensityVector {
    /// Cauchy-Schwarz ceiling for the double occupancy at given (d, m).
    pub fn w_max(&self) -> f64 {
        0.5 * (self.d * self.d - self.m * self.m).max(0.0).sqrt()
    }
}
