//! Numerical laboratory for the diffusion picture of mini-batch SGD.
//!
//! The crate is organized around one experiment pipeline:
//!
//! * [`landscape`] — loss surfaces with known critical-point structure
//!   (factories for quadratic, double-well, multi-well and empirical
//!   regression losses), exact catalogs of minima/saddles, and numeric
//!   sanity oracles.
//! * [`dynamics`] — mini-batch SGD and its Euler-Maruyama SDE analogue,
//!   driven by learning-rate/batch-size schedules with counter-based
//!   RNG streams so every trajectory is reproducible in parallel.
//! * [`fokker_planck`] — conservative finite-volume solver for the
//!   density evolution induced by the SDE, with an exponentially fitted
//!   flux that keeps the Gibbs density stationary to round-off.
//! * [`metastability`] — Eyring-Kramers escape-time predictions and the
//!   Monte Carlo first-passage experiments that test them.
//! * [`stationary`] — closed-form minimizer probabilities, quadrature
//!   oracles, and long-run occupation measurements.
//! * [`stats`] — small statistical utilities shared by the experiment
//!   layer (bootstrap CIs, rank and KS tests, log-linear fits).
//! * [`config`] — serializable specs for landscapes and schedules, the
//!   vocabulary used by the CLI experiment configs.
//! * [`export`] — CSV/JSON writers with a fixed float format so reruns
//!   produce byte-identical artifacts.

pub mod config;
pub mod dynamics;
pub mod export;
pub mod fokker_planck;
pub mod landscape;
pub mod metastability;
pub mod stationary;
pub mod stats;

pub use dynamics::{Schedule, Trajectory};
pub use metastability::{EscapeReport, EscapeSpec};
pub use stationary::{MinimizerProbability, OccupationRatio};
pub use fokker_planck::{DensityField, GridSpec};
pub use landscape::{
    CriticalPointCatalog, DomainBox, EmpiricalLandscape, IsotropicLandscape, Landscape,
};
