//! Flat-bottomed single well: zero loss on `[-a, a]`, quartic walls outside.
//!
//! On this landscape the Gibbs measure is (nearly) uniform over the flat
//! region, so relaxation toward it is governed by pure diffusion across the
//! bottom: the convergence rate scales like the diffusivity `γβ/(2M) = 1/η∞`,
//! in contrast to quadratic wells where the spectral gap is set by the
//! curvature alone. This makes it the right single-well fixture for
//! observing the rate-vs-η∞ scaling of the density evolution.
//!
//! The Hessian vanishes identically on the bottom, so there is no
//! critical-point catalog: every catalog entry must carry a non-degenerate
//! spectrum, and this family intentionally has none.

use super::{DomainBox, IsotropicLandscape, Landscape, LandscapeError};
use nalgebra::DMatrix;

/// `L(w) = k · max(0, |w| − a)⁴` — C³ everywhere, flat on `[-a, a]`.
#[derive(Debug, Clone)]
pub struct FlatBottomWell {
    half_width: f64,
    stiffness: f64,
    domain: DomainBox,
}

impl FlatBottomWell {
    fn excess(&self, x: f64) -> f64 {
        (x.abs() - self.half_width).max(0.0)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }
}

impl Landscape for FlatBottomWell {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, w: &[f64]) -> f64 {
        let s = self.excess(w[0]);
        self.stiffness * s * s * s * s
    }

    fn gradient_into(&self, w: &[f64], out: &mut [f64]) {
        let s = self.excess(w[0]);
        out[0] = 4.0 * self.stiffness * s * s * s * w[0].signum();
        if s == 0.0 {
            out[0] = 0.0;
        }
    }

    fn hessian(&self, w: &[f64]) -> DMatrix<f64> {
        let s = self.excess(w[0]);
        DMatrix::from_element(1, 1, 12.0 * self.stiffness * s * s)
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }
}

impl IsotropicLandscape for FlatBottomWell {
    fn beta(&self, _w: &[f64]) -> f64 {
        1.0
    }
}

/// Flat-bottomed well with the given flat half-width and wall stiffness.
/// Returns no catalog: the bottom Hessian is identically zero (degenerate).
pub fn make_flat_bottom_well(
    half_width: f64,
    stiffness: f64,
) -> Result<FlatBottomWell, LandscapeError> {
    if !(half_width > 0.0) {
        return Err(LandscapeError::Invalid(format!(
            "flat half-width {half_width} must be positive"
        )));
    }
    if !(stiffness > 0.0) {
        return Err(LandscapeError::Invalid(format!(
            "wall stiffness {stiffness} must be positive"
        )));
    }
    // Walls at η∞ = 2 (the softest case studied) add a Gibbs tail of width
    // (2/(stiffness·η))^(1/4) ≲ 0.4 for stiffness ≥ 50; ±2 of slack is ample.
    let domain = DomainBox::symmetric(1, half_width + 2.0);
    Ok(FlatBottomWell { half_width, stiffness, domain })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::numeric::{numeric_gradient, numeric_hessian};

    #[test]
    fn flat_inside_quartic_outside() {
        let l = make_flat_bottom_well(1.0, 100.0).unwrap();
        assert_eq!(l.value(&[0.0]), 0.0);
        assert_eq!(l.value(&[0.999]), 0.0);
        assert_eq!(l.value(&[-1.0]), 0.0);
        let v = l.value(&[1.5]);
        assert!((v - 100.0 * 0.5f64.powi(4)).abs() < 1e-12);
        assert_eq!(l.value(&[-1.5]), v);
    }

    #[test]
    fn gradient_and_hessian_match_finite_differences() {
        let l = make_flat_bottom_well(1.0, 100.0).unwrap();
        for x in [-1.8, -1.3, -1.05, -0.5, 0.0, 0.7, 1.01, 1.4, 2.0] {
            let g = numeric_gradient(&l, &[x], 1e-6).unwrap()[0];
            let ga = l.gradient(&[x])[0];
            assert!((g - ga).abs() <= 1e-5 * ga.abs().max(1.0), "at {x}: {g} vs {ga}");
            let h = numeric_hessian(&l, &[x], 1e-4).unwrap()[(0, 0)];
            let ha = l.hessian(&[x])[(0, 0)];
            assert!((h - ha).abs() <= 1e-3 * ha.abs().max(1.0), "at {x}: {h} vs {ha}");
        }
    }

    #[test]
    fn third_derivative_is_continuous_at_the_wall() {
        // C³ means the finite-difference Hessian stays accurate right at
        // the junction, where s = 0.
        let l = make_flat_bottom_well(1.0, 100.0).unwrap();
        let h = numeric_hessian(&l, &[1.0], 1e-4).unwrap()[(0, 0)];
        assert!(h.abs() < 1e-3, "Hessian at the wall should vanish, got {h}");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(make_flat_bottom_well(0.0, 100.0).is_err());
        assert!(make_flat_bottom_well(1.0, -5.0).is_err());
    }
}
