//! Serializable specs for landscapes and schedules — the vocabulary of the
//! CLI's experiment configs. Each spec is a plain data description that
//! `build` turns into the working objects via the factory functions, so a
//! config file and a programmatic setup go through identical validation.

use serde::{Deserialize, Serialize};

use crate::dynamics::{DynamicsError, Profile, Schedule};
use crate::landscape::{
    make_asymmetric_double_well, make_double_well, make_empirical_regression,
    make_flat_bottom_well, make_multiwell, make_quadratic, BetaProfile, CriticalPointCatalog,
    EmpiricalKind, EmpiricalLandscape, IsotropicLandscape, LandscapeError, WellSpec, WithBeta,
};

/// Landscape description as it appears in a config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LandscapeSpec {
    /// Single minimum at the origin with the given Hessian diagonal.
    Quadratic { curvatures: Vec<f64> },
    /// Symmetric 1D double well with minima at ±1.
    DoubleWell { barrier_height: f64 },
    /// Equal-depth 1D wells of different curvature at ±half_separation.
    AsymmetricDoubleWell { curv_flat: f64, curv_sharp: f64, half_separation: f64 },
    /// 1D well with a quartic-flat bottom.
    FlatBottomWell { half_width: f64, stiffness: f64 },
    /// Wells with prescribed locations, depths and Hessian spectra.
    Multiwell { wells: Vec<WellSpec> },
    /// Synthetic linear or logistic regression dataset.
    Regression {
        task: EmpiricalKind,
        n_samples: usize,
        true_weights: Vec<f64>,
        l2_penalty: f64,
        seed: u64,
    },
    /// Any analytic landscape above with its noise amplitude replaced.
    WithBeta { inner: Box<LandscapeSpec>, profile: BetaProfile },
}

/// What a [`LandscapeSpec`] builds into. Analytic landscapes carry isotropic
/// noise and (usually) a critical-point catalog; dataset-backed landscapes
/// feed the SGD and assumption-check paths instead.
pub enum BuiltLandscape {
    Isotropic {
        landscape: Box<dyn IsotropicLandscape + Send + Sync>,
        catalog: Option<CriticalPointCatalog>,
    },
    Empirical(EmpiricalLandscape),
}

impl std::fmt::Debug for BuiltLandscape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BuiltLandscape::Isotropic { catalog, .. } => f
                .debug_struct("Isotropic")
                .field("has_catalog", &catalog.is_some())
                .finish_non_exhaustive(),
            BuiltLandscape::Empirical(l) => f.debug_tuple("Empirical").field(l).finish(),
        }
    }
}

impl BuiltLandscape {
    pub fn isotropic(&self) -> Option<&(dyn IsotropicLandscape + Send + Sync)> {
        match self {
            BuiltLandscape::Isotropic { landscape, .. } => Some(landscape.as_ref()),
            BuiltLandscape::Empirical(_) => None,
        }
    }

    pub fn catalog(&self) -> Option<&CriticalPointCatalog> {
        match self {
            BuiltLandscape::Isotropic { catalog, .. } => catalog.as_ref(),
            BuiltLandscape::Empirical(_) => None,
        }
    }

    pub fn empirical(&self) -> Option<&EmpiricalLandscape> {
        match self {
            BuiltLandscape::Isotropic { .. } => None,
            BuiltLandscape::Empirical(l) => Some(l),
        }
    }
}

impl LandscapeSpec {
    pub fn build(&self) -> Result<BuiltLandscape, LandscapeError> {
        let built = match self {
            LandscapeSpec::Quadratic { curvatures } => {
                let (l, c) = make_quadratic(curvatures)?;
                BuiltLandscape::Isotropic { landscape: Box::new(l), catalog: Some(c) }
            }
            LandscapeSpec::DoubleWell { barrier_height } => {
                let (l, c) = make_double_well(*barrier_height)?;
                BuiltLandscape::Isotropic { landscape: Box::new(l), catalog: Some(c) }
            }
            LandscapeSpec::AsymmetricDoubleWell { curv_flat, curv_sharp, half_separation } => {
                let (l, c) = make_asymmetric_double_well(*curv_flat, *curv_sharp, *half_separation)?;
                BuiltLandscape::Isotropic { landscape: Box::new(l), catalog: Some(c) }
            }
            LandscapeSpec::FlatBottomWell { half_width, stiffness } => {
                let l = make_flat_bottom_well(*half_width, *stiffness)?;
                BuiltLandscape::Isotropic { landscape: Box::new(l), catalog: None }
            }
            LandscapeSpec::Multiwell { wells } => {
                let (l, c) = make_multiwell(wells)?;
                BuiltLandscape::Isotropic { landscape: Box::new(l), catalog: Some(c) }
            }
            LandscapeSpec::Regression { task, n_samples, true_weights, l2_penalty, seed } => {
                let l =
                    make_empirical_regression(*task, *n_samples, true_weights, *l2_penalty, *seed)?;
                BuiltLandscape::Empirical(l)
            }
            LandscapeSpec::WithBeta { inner, profile } => match inner.build()? {
                BuiltLandscape::Isotropic { landscape, catalog } => {
                    // β rescales the noise, not the loss: the catalog of
                    // critical points carries over unchanged.
                    let wrapped = WithBeta::new(landscape, profile.clone())?;
                    BuiltLandscape::Isotropic { landscape: Box::new(wrapped), catalog }
                }
                BuiltLandscape::Empirical(_) => {
                    return Err(LandscapeError::Invalid(
                        "landscape.with_beta: a beta profile needs an analytic inner \
                         landscape, not a regression dataset"
                            .into(),
                    ))
                }
            },
        };
        Ok(built)
    }
}

/// Schedule description as it appears in a config file: one profile for the
/// learning rate, one for the batch size.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub gamma: Profile,
    pub batch: Profile,
}

impl ScheduleSpec {
    /// Runs the same validation as [`Schedule::new`], whose error messages
    /// name the offending field (`schedule.gamma` / `schedule.batch`).
    pub fn build(&self) -> Result<Schedule, DynamicsError> {
        Schedule::new(self.gamma.clone(), self.batch.clone())
    }
}
