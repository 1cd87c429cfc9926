//! Direct density-space view of the diffusion: a conservative
//! finite-volume solver for the evolution equation
//! `∂_t p = ∇·(∇(L + γβ/2M) p + (γβ/2M) ∇p)` on truncated 1D/2D grids,
//! the closed-form Gibbs stationary density `κ e^{−η∞ L}`, and the
//! weighted-L² distance used to measure convergence toward it.
//!
//! The exponential-fitting flux makes the cell-sampled Gibbs density an
//! exact discrete fixed point, so "stationarity" is testable to round-off
//! instead of to discretization order. Mass is conserved face-by-face and
//! positivity is enforced by the step-size rule (explicit path) or the
//! M-matrix structure (implicit fallback).

mod grid;
mod metrics;
mod solver;

pub use grid::{DensityField, GridSpec, MAX_CELLS_2D};
pub use metrics::{fit_decay_rate, weighted_l2_distance, WeightedL2Distance, DENSITY_FLOOR};
pub use solver::{evolve, mollified_delta, stationary_density};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FokkerPlanckError {
    #[error("{0}")]
    Invalid(String),
    #[error("grid axis {axis}: minimum sits {got:.4} from the boundary, margin {needed:.4} required")]
    MarginTooSmall { axis: usize, needed: f64, got: f64 },
    #[error("grid too small: boundary cells hold {tail_fraction:.3e} of the mass (limit 1e-6)")]
    GridTooSmall { tail_fraction: f64 },
    #[error("density fields live on different grids")]
    GridMismatch,
    #[error("negative cell {cell} = {value:.6e} after sub-step {step}")]
    NegativeCell { step: usize, cell: usize, value: f64 },
    #[error("need at least {need} points in the fit window, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("nonpositive distance {value:.3e} at t = {t}")]
    NonpositiveDistance { t: f64, value: f64 },
    #[error(transparent)]
    Stats(#[from] crate::stats::StatsError),
}
