//! The canonical symmetric double well used for escape-time experiments.

use super::{
    Barrier, CriticalPointCatalog, DomainBox, IsotropicLandscape, Landscape, LandscapeError,
    Minimum, Saddle,
};
use nalgebra::DMatrix;

/// `L(w) = c (w² − 1)² / 4` with `c = 4·barrier_height`: minima at ±1 with
/// loss 0, saddle at 0 with loss equal to the barrier height.
#[derive(Debug, Clone)]
pub struct DoubleWell {
    c: f64,
    domain: DomainBox,
}

impl DoubleWell {
    /// Second derivative `c (3w² − 1)`.
    pub fn second_derivative(&self, w: f64) -> f64 {
        self.c * (3.0 * w * w - 1.0)
    }
}

impl Landscape for DoubleWell {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, w: &[f64]) -> f64 {
        let s = w[0] * w[0] - 1.0;
        0.25 * self.c * s * s
    }

    fn gradient_into(&self, w: &[f64], out: &mut [f64]) {
        out[0] = self.c * w[0] * (w[0] * w[0] - 1.0);
    }

    fn hessian(&self, w: &[f64]) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, self.second_derivative(w[0]))
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }
}

impl IsotropicLandscape for DoubleWell {
    fn beta(&self, _w: &[f64]) -> f64 {
        1.0
    }
}

/// Scaled quartic double well with the requested barrier height `H`.
///
/// Catalog: minima at ±1 (curvature `8H`), saddle at 0 (curvature `−4H`,
/// so `λ* = 4H`), and both directed barriers of height `H`.
pub fn make_double_well(
    barrier_height: f64,
) -> Result<(DoubleWell, CriticalPointCatalog), LandscapeError> {
    if !(barrier_height > 0.0) {
        return Err(LandscapeError::Invalid(format!(
            "barrier height {barrier_height} must be positive"
        )));
    }
    let c = 4.0 * barrier_height;
    let landscape = DoubleWell { c, domain: DomainBox::symmetric(1, 3.0) };
    let catalog = CriticalPointCatalog::new(
        vec![
            Minimum::new(vec![-1.0], 0.0, vec![2.0 * c]),
            Minimum::new(vec![1.0], 0.0, vec![2.0 * c]),
        ],
        vec![Saddle::new(vec![0.0], barrier_height, vec![-c])],
        vec![
            Barrier { from: 0, to: 1, saddle: 0, height: barrier_height },
            Barrier { from: 1, to: 0, saddle: 0, height: barrier_height },
        ],
    )?;
    Ok((landscape, catalog))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_quarter_barrier() {
        let (l, cat) = make_double_well(0.25).unwrap();
        // Minima at ±1 with zero loss and curvature 2.
        for id in 0..2 {
            assert_eq!(cat.minima[id].loss, 0.0);
            assert_eq!(cat.minima[id].eigenvalues, vec![2.0]);
        }
        assert_eq!(cat.minima[0].location, vec![-1.0]);
        assert_eq!(cat.minima[1].location, vec![1.0]);
        // Saddle at 0 with loss 0.25 and unit negative curvature.
        assert_eq!(cat.saddles[0].loss, 0.25);
        assert_eq!(cat.saddles[0].lambda_star, 1.0);
        assert_eq!(cat.barrier(0, 1).unwrap().height, 0.25);
        // Critical points really are critical.
        assert_eq!(l.gradient(&[1.0])[0], 0.0);
        assert_eq!(l.gradient(&[-1.0])[0], 0.0);
        assert_eq!(l.gradient(&[0.0])[0], 0.0);
        cat.verify(&l, 1e-3).unwrap();
    }

    #[test]
    fn curvatures_scale_linearly_with_barrier() {
        let (_, cat) = make_double_well(0.5).unwrap();
        assert_eq!(cat.minima[0].eigenvalues, vec![4.0]);
        assert_eq!(cat.saddles[0].lambda_star, 2.0);
        assert_eq!(cat.saddles[0].loss, 0.5);
    }

    #[test]
    fn rejects_nonpositive_barrier() {
        assert!(make_double_well(0.0).is_err());
        assert!(make_double_well(-1.0).is_err());
    }
}
