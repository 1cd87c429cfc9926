//! Noise-amplitude profiles β(w) and the wrapper that attaches one to a
//! landscape.
//!
//! The diffusion layers model the gradient-noise covariance as β(w)·I. The
//! built-in analytic families use β ≡ 1; `WithBeta` overrides that, e.g. to
//! mimic the one-dimensional regression noise `β(w) = 2(w−w₀)² + 1` on top
//! of its population loss.

use super::{DomainBox, IsotropicLandscape, Landscape, LandscapeError};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BetaProfile {
    Constant { value: f64 },
    /// `base + coeff·‖w − center‖²`.
    Quadratic { base: f64, coeff: f64, center: Vec<f64> },
}

impl BetaProfile {
    /// Sign and dimension checks. A constant profile may be exactly zero —
    /// that turns the diffusion into plain gradient flow, which the
    /// integrator tests use as an analytic control.
    pub fn validate(&self, dim: usize) -> Result<(), LandscapeError> {
        match self {
            BetaProfile::Constant { value } => {
                if !(*value >= 0.0) {
                    return Err(LandscapeError::Invalid(format!(
                        "constant noise amplitude must be nonnegative, got {value}"
                    )));
                }
            }
            BetaProfile::Quadratic { base, coeff, center } => {
                if !(*base > 0.0) || !(*coeff >= 0.0) {
                    return Err(LandscapeError::Invalid(format!(
                        "quadratic noise amplitude needs base > 0 and coeff >= 0, \
                         got base {base}, coeff {coeff}"
                    )));
                }
                if center.len() != dim {
                    return Err(LandscapeError::Invalid(format!(
                        "noise-amplitude center has dimension {}, landscape has {dim}",
                        center.len()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        match self {
            BetaProfile::Constant { value } => *value,
            BetaProfile::Quadratic { base, coeff, center } => {
                let d2: f64 = w.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
                base + coeff * d2
            }
        }
    }
}

/// A landscape with its noise amplitude replaced by the given profile.
#[derive(Debug, Clone)]
pub struct WithBeta<L> {
    inner: L,
    profile: BetaProfile,
}

impl<L: Landscape> WithBeta<L> {
    pub fn new(inner: L, profile: BetaProfile) -> Result<Self, LandscapeError> {
        profile.validate(inner.dim())?;
        Ok(WithBeta { inner, profile })
    }

    pub fn profile(&self) -> &BetaProfile {
        &self.profile
    }

    pub fn inner(&self) -> &L {
        &self.inner
    }
}

impl<L: Landscape> Landscape for WithBeta<L> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, w: &[f64]) -> f64 {
        self.inner.value(w)
    }
    fn gradient_into(&self, w: &[f64], out: &mut [f64]) {
        self.inner.gradient_into(w, out)
    }
    fn hessian(&self, w: &[f64]) -> DMatrix<f64> {
        self.inner.hessian(w)
    }
    fn domain(&self) -> &DomainBox {
        self.inner.domain()
    }
}

impl<L: Landscape> IsotropicLandscape for WithBeta<L> {
    fn beta(&self, w: &[f64]) -> f64 {
        self.profile.value(w)
    }
}
