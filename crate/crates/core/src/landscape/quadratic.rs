//! Diagonal quadratic wells: the closed-form Gibbs reference family.

use super::{CriticalPointCatalog, DomainBox, IsotropicLandscape, Landscape, LandscapeError, Minimum};
use nalgebra::DMatrix;

/// `L(w) = offset + ½ Σ_j λ_j (w_j − c_j)²` with positive curvatures λ.
#[derive(Debug, Clone)]
pub struct Quadratic {
    center: Vec<f64>,
    curvatures: Vec<f64>,
    offset: f64,
    domain: DomainBox,
}

impl Quadratic {
    /// General form with explicit center and loss offset at the minimum.
    pub fn new(center: Vec<f64>, curvatures: Vec<f64>, offset: f64) -> Result<Self, LandscapeError> {
        assert_eq!(center.len(), curvatures.len());
        for (index, &value) in curvatures.iter().enumerate() {
            if !(value > 0.0) {
                return Err(LandscapeError::NonPositiveCurvature { index, value });
            }
        }
        // Wide enough that Gibbs densities down to η∞ = 2 fit with a 3-sigma
        // margin on every axis (stationary std is 1/sqrt(η λ)).
        let lo = center
            .iter()
            .zip(&curvatures)
            .map(|(c, l)| c - 8.0 / l.sqrt())
            .collect();
        let hi = center
            .iter()
            .zip(&curvatures)
            .map(|(c, l)| c + 8.0 / l.sqrt())
            .collect();
        Ok(Self { center, curvatures, offset, domain: DomainBox::new(lo, hi) })
    }

    pub fn curvatures(&self) -> &[f64] {
        &self.curvatures
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }
}

impl Landscape for Quadratic {
    fn dim(&self) -> usize {
        self.curvatures.len()
    }

    fn value(&self, w: &[f64]) -> f64 {
        let mut acc = self.offset;
        for i in 0..w.len() {
            let d = w[i] - self.center[i];
            acc += 0.5 * self.curvatures[i] * d * d;
        }
        acc
    }

    fn gradient_into(&self, w: &[f64], out: &mut [f64]) {
        for i in 0..w.len() {
            out[i] = self.curvatures[i] * (w[i] - self.center[i]);
        }
    }

    fn hessian(&self, _w: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.curvatures))
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }
}

impl IsotropicLandscape for Quadratic {
    fn beta(&self, _w: &[f64]) -> f64 {
        1.0
    }
}

/// Quadratic centered at the origin with zero offset, plus its one-minimum
/// catalog.
pub fn make_quadratic(curvatures: &[f64]) -> Result<(Quadratic, CriticalPointCatalog), LandscapeError> {
    let d = curvatures.len();
    let landscape = Quadratic::new(vec![0.0; d], curvatures.to_vec(), 0.0)?;
    let catalog = CriticalPointCatalog::new(
        vec![Minimum::new(vec![0.0; d], 0.0, curvatures.to_vec())],
        vec![],
        vec![],
    )?;
    Ok((landscape, catalog))
}
