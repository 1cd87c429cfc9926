//! Loss landscapes with exact critical-point metadata.
//!
//! Every analytic family ships with a [`CriticalPointCatalog`] that records
//! minima, saddles and barrier heights symbolically, so downstream closed
//! forms (escape times, stationary probabilities) never depend on numeric
//! root finding. Numeric finite-difference oracles live in [`numeric`] and
//! are used by tests to cross-check the analytic derivatives.
//!
//! Two traits split the hierarchy:
//!
//! * [`Landscape`] — any differentiable scalar loss with a bounded study
//!   domain. Implemented by the analytic families *and* by
//!   [`EmpiricalLandscape`], so assumption checks and derivative oracles
//!   work everywhere.
//! * [`IsotropicLandscape`] — adds the scalar noise amplitude `β(w)`.
//!   Only landscapes whose gradient-noise covariance is isotropic by
//!   construction implement it; the diffusion/Fokker-Planck/escape layers
//!   require this trait, which keeps empirical losses (anisotropic noise)
//!   out of those code paths at compile time.

mod assumptions;
mod asymmetric;
mod beta;
mod catalog;
mod double_well;
mod empirical;
mod flat_well;
mod jet;
mod multiwell;
pub mod numeric;
mod quadratic;
mod saddle;

pub use assumptions::{check_assumptions, AssumptionReport, AssumptionVerdict};
pub use asymmetric::make_asymmetric_double_well;
pub use beta::{BetaProfile, WithBeta};
pub use catalog::{Barrier, CriticalPointCatalog, Minimum, Saddle, DEGENERACY_TOL};
pub use double_well::make_double_well;
pub use empirical::{make_empirical_regression, EmpiricalKind, EmpiricalLandscape};
pub use flat_well::make_flat_bottom_well;
pub use multiwell::{make_multiwell, WellSpec};
pub use quadratic::{make_quadratic, Quadratic};
pub use saddle::{find_saddle_1d, find_saddle_2d};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while constructing landscapes or validating catalogs.
#[derive(Debug, Error)]
pub enum LandscapeError {
    #[error("curvature[{index}] = {value} must be positive")]
    NonPositiveCurvature { index: usize, value: f64 },
    #[error("{context}: Hessian eigenvalue {value:.3e} is within {tol:.0e} of zero; formulas divide by determinants")]
    DegenerateEigenvalue { context: String, value: f64, tol: f64 },
    #[error("saddle at {location:?} has {count} negative eigenvalues, expected exactly 1")]
    NotASaddle { location: Vec<f64>, count: usize },
    #[error("barrier ({from},{to}) has negative height {height:.3e}")]
    NegativeBarrier { from: usize, to: usize, height: f64 },
    #[error("wells {a} and {b} overlap: separation {separation:.3} < {required:.3} (4x widest well width)")]
    OverlappingWells { a: usize, b: usize, separation: f64, required: f64 },
    #[error("requested Hessian for well {index} is not positive definite (eigenvalue {value:.3e})")]
    NotPositiveDefinite { index: usize, value: f64 },
    #[error("point {w:?} is within {step} of the domain boundary; finite differences need interior room")]
    TooCloseToBoundary { w: Vec<f64>, step: f64 },
    #[error("saddle search between minima {from} and {to} failed: {reason}")]
    SaddleSearchFailed { from: usize, to: usize, reason: String },
    #[error("catalog check failed at {context}: {detail}")]
    CatalogMismatch { context: String, detail: String },
    #[error("{0}")]
    Invalid(String),
}

/// Axis-aligned box `[lo_1, hi_1] x ... x [lo_d, hi_d]` bounding the region
/// a landscape is studied on. Simulations abort when iterates leave the box
/// scaled by 2 about its center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl DomainBox {
    /// Build a box from per-axis bounds. Panics if `lo` and `hi` differ in
    /// length or any interval is empty: domains are fixed at construction
    /// and a bad one is a programming error, not a runtime condition.
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "lo/hi dimension mismatch");
        assert!(!lo.is_empty(), "domain must have at least one axis");
        for (i, (a, b)) in lo.iter().zip(&hi).enumerate() {
            assert!(a < b, "empty interval on axis {i}: [{a}, {b}]");
        }
        Self { lo, hi }
    }

    /// Cube `[-half_width, half_width]^d`.
    pub fn symmetric(dim: usize, half_width: f64) -> Self {
        Self::new(vec![-half_width; dim], vec![half_width; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    pub fn contains(&self, w: &[f64]) -> bool {
        self.contains_with_margin(w, 0.0)
    }

    /// True if `w` is inside the box and at least `margin` from every face.
    pub fn contains_with_margin(&self, w: &[f64], margin: f64) -> bool {
        w.len() == self.dim()
            && w.iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(x, (a, b))| *x >= a + margin && *x <= b - margin)
    }

    /// The box scaled by `factor` about its center.
    pub fn scaled(&self, factor: f64) -> Self {
        let c = self.center();
        let lo = c
            .iter()
            .zip(&self.lo)
            .map(|(c, a)| c + factor * (a - c))
            .collect();
        let hi = c
            .iter()
            .zip(&self.hi)
            .map(|(c, b)| c + factor * (b - c))
            .collect();
        Self { lo, hi }
    }
}

/// A differentiable scalar loss on a bounded domain.
///
/// Implementations provide exact (symbolic) derivatives; the contract is
/// checked against finite differences in the test suite. `gradient_into`
/// is the allocation-free form used by simulation hot loops.
pub trait Landscape: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, w: &[f64]) -> f64;

    /// Writes `∇L(w)` into `out` (length `dim`).
    fn gradient_into(&self, w: &[f64], out: &mut [f64]);

    /// Exact Hessian `∇²L(w)` as a dense symmetric matrix.
    fn hessian(&self, w: &[f64]) -> DMatrix<f64>;

    fn domain(&self) -> &DomainBox;

    /// Allocating convenience wrapper around [`Landscape::gradient_into`].
    fn gradient(&self, w: &[f64]) -> DVector<f64> {
        let mut g = DVector::zeros(self.dim());
        self.gradient_into(w, g.as_mut_slice());
        g
    }
}

/// A landscape whose gradient-noise covariance is isotropic: `σ²(w) = β(w)·I`
/// with scalar `β(w) > 0`. This is the hypothesis under which the diffusion,
/// Fokker-Planck and escape-time layers operate, so those layers accept only
/// this trait.
pub trait IsotropicLandscape: Landscape {
    /// Scalar noise amplitude `β(w)`; must be positive on the domain.
    fn beta(&self, w: &[f64]) -> f64;
}

impl<T: Landscape + ?Sized> Landscape for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, w: &[f64]) -> f64 {
        (**self).value(w)
    }
    fn gradient_into(&self, w: &[f64], out: &mut [f64]) {
        (**self).gradient_into(w, out)
    }
    fn hessian(&self, w: &[f64]) -> DMatrix<f64> {
        (**self).hessian(w)
    }
    fn domain(&self) -> &DomainBox {
        (**self).domain()
    }
}

impl<T: IsotropicLandscape + ?Sized> IsotropicLandscape for &T {
    fn beta(&self, w: &[f64]) -> f64 {
        (**self).beta(w)
    }
}

impl<T: Landscape + ?Sized> Landscape for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, w: &[f64]) -> f64 {
        (**self).value(w)
    }
    fn gradient_into(&self, w: &[f64], out: &mut [f64]) {
        (**self).gradient_into(w, out)
    }
    fn hessian(&self, w: &[f64]) -> DMatrix<f64> {
        (**self).hessian(w)
    }
    fn domain(&self) -> &DomainBox {
        (**self).domain()
    }
}

impl<T: IsotropicLandscape + ?Sized> IsotropicLandscape for Box<T> {
    fn beta(&self, w: &[f64]) -> f64 {
        (**self).beta(w)
    }
}
