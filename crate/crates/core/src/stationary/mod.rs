//! Where the limiting iterate settles.
//!
//! The stationary density κe^{−η∞L} concentrates mass near minimizers, and
//! the mass of an ε-ball around a minimizer has a closed form built from the
//! local Hessian spectrum. This module evaluates that closed form next to a
//! direct quadrature of the ball mass ([`probability`]), reduces pairs of
//! minima to the sharp-vs-flat ratio law ([`probability::probability_ratio`]),
//! measures the same ratio empirically from a long trajectory
//! ([`occupation`]), and packages the three standard example suites as tables
//! ([`examples`]).

mod examples;
mod occupation;
mod probability;

pub use examples::{appendix_h_example, AppendixHRow, AppendixHTable};
pub use occupation::{occupation_ratio_mc, OccupationRatio};
pub use probability::{
    minimizer_probability, probability_ratio, DepthConvention, MinimizerProbability,
    ProbabilityRatio, RatioRegime,
};

use crate::dynamics::DynamicsError;
use crate::fokker_planck::FokkerPlanckError;
use crate::landscape::LandscapeError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StationaryError {
    #[error("invalid stationary analysis: {0}")]
    Invalid(String),

    /// The ε-ball pokes out of the quadrature grid, so the ball mass and the
    /// normalization would be computed over inconsistent regions.
    #[error(
        "ball of radius {epsilon} around minimum {minimum} leaves the \
         quadrature grid; shrink ε or widen the grid"
    )]
    BallOutsideGrid { minimum: usize, epsilon: f64 },

    #[error(transparent)]
    Landscape(#[from] LandscapeError),

    #[error(transparent)]
    FokkerPlanck(#[from] FokkerPlanckError),

    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}
