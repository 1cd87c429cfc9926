//! Tensor grids and gridded densities for the 1D/2D density solver.

use super::FokkerPlanckError;
use crate::landscape::CriticalPointCatalog;
use serde::{Deserialize, Serialize};

/// Uniform cell-centered tensor grid on an axis-aligned box, dimension 1
/// or 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    lo: Vec<f64>,
    hi: Vec<f64>,
    cells: Vec<usize>,
}

/// Largest 2D grid the solver accepts (per axis).
pub const MAX_CELLS_2D: usize = 512;

impl GridSpec {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, cells: Vec<usize>) -> Result<Self, FokkerPlanckError> {
        let dim = lo.len();
        if dim == 0 || dim > 2 {
            return Err(FokkerPlanckError::Invalid(format!(
                "grids are 1D or 2D, got dimension {dim}"
            )));
        }
        if hi.len() != dim || cells.len() != dim {
            return Err(FokkerPlanckError::Invalid(
                "lo, hi, cells must have the same length".into(),
            ));
        }
        for a in 0..dim {
            if !(hi[a] > lo[a]) || !lo[a].is_finite() || !hi[a].is_finite() {
                return Err(FokkerPlanckError::Invalid(format!(
                    "axis {a} bounds [{}, {}] are not a proper interval",
                    lo[a], hi[a]
                )));
            }
            if cells[a] < 4 {
                return Err(FokkerPlanckError::Invalid(format!(
                    "axis {a} needs at least 4 cells, got {}",
                    cells[a]
                )));
            }
        }
        if dim == 2 && cells.iter().any(|&c| c > MAX_CELLS_2D) {
            return Err(FokkerPlanckError::Invalid(format!(
                "2D grids are capped at {MAX_CELLS_2D} cells per axis"
            )));
        }
        Ok(GridSpec { lo, hi, cells })
    }

    /// Builds a grid around the catalog's critical points with margin
    /// 2 × the required 3/√(η∞ λ_min) on every side. Doubling matters:
    /// the 3-sigma minimum leaves ~1e-4 of the Gibbs mass on the boundary
    /// layer, while the stationary-density tail check allows only 1e-6;
    /// six sigma puts the boundary values at e⁻¹⁸ of the peak.
    pub fn for_catalog(
        catalog: &CriticalPointCatalog,
        eta_inf: f64,
        cells_per_axis: usize,
    ) -> Result<Self, FokkerPlanckError> {
        if !(eta_inf > 0.0) {
            return Err(FokkerPlanckError::Invalid(format!(
                "eta_inf must be positive, got {eta_inf}"
            )));
        }
        let dim = catalog.minima[0].location.len();
        let margin = 2.0 * 3.0 / (eta_inf * catalog.min_curvature()).sqrt();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for m in &catalog.minima {
            for a in 0..dim {
                lo[a] = lo[a].min(m.location[a]);
                hi[a] = hi[a].max(m.location[a]);
            }
        }
        for s in &catalog.saddles {
            for a in 0..dim {
                lo[a] = lo[a].min(s.location[a]);
                hi[a] = hi[a].max(s.location[a]);
            }
        }
        for a in 0..dim {
            lo[a] -= margin;
            hi[a] += margin;
        }
        GridSpec::new(lo, hi, vec![cells_per_axis; dim])
    }

    /// Checks that every catalog minimum sits inside the bounds with the
    /// Gaussian-tail margin 3/√(η∞ λ_min) on every axis.
    pub fn validate_margin(
        &self,
        catalog: &CriticalPointCatalog,
        eta_inf: f64,
    ) -> Result<(), FokkerPlanckError> {
        for m in &catalog.minima {
            let lambda_min = m.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
            let margin = 3.0 / (eta_inf * lambda_min).sqrt();
            for a in 0..self.dim() {
                let space = (m.location[a] - self.lo[a]).min(self.hi[a] - m.location[a]);
                if space < margin {
                    return Err(FokkerPlanckError::MarginTooSmall {
                        axis: a,
                        needed: margin,
                        got: space,
                    });
                }
            }
        }
        Ok(())
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

    pub fn cells(&self, axis: usize) -> usize {
        self.cells[axis]
    }

    pub fn n_cells(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / self.cells[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    pub fn center(&self, axis: usize, i: usize) -> f64 {
        self.lo[axis] + (i as f64 + 0.5) * self.spacing(axis)
    }

    /// Row-major flat index; 1D grids ignore `iy`.
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        if self.dim() == 1 {
            ix
        } else {
            ix * self.cells[1] + iy
        }
    }

    /// Cell-center coordinates of the flat index.
    pub fn center_of(&self, flat: usize) -> Vec<f64> {
        if self.dim() == 1 {
            vec![self.center(0, flat)]
        } else {
            let ny = self.cells[1];
            vec![self.center(0, flat / ny), self.center(1, flat % ny)]
        }
    }

    pub fn contains(&self, w: &[f64]) -> bool {
        (0..self.dim()).all(|a| w[a] >= self.lo[a] && w[a] <= self.hi[a])
    }

    /// Whether the flat index lies on the outermost layer of cells.
    pub fn is_boundary(&self, flat: usize) -> bool {
        if self.dim() == 1 {
            flat == 0 || flat == self.cells[0] - 1
        } else {
            let ny = self.cells[1];
            let (ix, iy) = (flat / ny, flat % ny);
            ix == 0 || ix == self.cells[0] - 1 || iy == 0 || iy == ny - 1
        }
    }
}

/// Probability density sampled at cell centers.
#[derive(Debug, Clone)]
pub struct DensityField {
    grid: GridSpec,
    values: Vec<f64>,
    mass: f64,
}

impl DensityField {
    /// Wraps raw cell values, rejecting negatives and caching the mass.
    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self, FokkerPlanckError> {
        if values.len() != grid.n_cells() {
            return Err(FokkerPlanckError::Invalid(format!(
                "value count {} does not match the grid's {} cells",
                values.len(),
                grid.n_cells()
            )));
        }
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(FokkerPlanckError::NegativeCell { step: 0, cell: i, value: v });
        }
        let mass = values.iter().sum::<f64>() * grid.cell_volume();
        Ok(DensityField { grid, values, mass })
    }

    /// Rescales to unit mass.
    pub fn normalized(mut self) -> Result<Self, FokkerPlanckError> {
        if !(self.mass > 0.0) {
            return Err(FokkerPlanckError::Invalid(
                "cannot normalize a zero-mass density".into(),
            ));
        }
        let inv = 1.0 / self.mass;
        for v in &mut self.values {
            *v *= inv;
        }
        self.mass = self.values.iter().sum::<f64>() * self.grid.cell_volume();
        Ok(self)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Mass in the outermost layer of cells, as a fraction of the total.
    pub fn boundary_mass_fraction(&self) -> f64 {
        let tail: f64 = self
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.is_boundary(*i))
            .map(|(_, v)| v)
            .sum();
        tail * self.grid.cell_volume() / self.mass
    }

    /// First moment along one axis (midpoint rule).
    pub fn mean(&self, axis: usize) -> f64 {
        let mut acc = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            acc += v * self.grid.center_of(i)[axis];
        }
        acc * self.grid.cell_volume() / self.mass
    }

    /// Central second moment along one axis.
    pub fn variance(&self, axis: usize) -> f64 {
        let m = self.mean(axis);
        let mut acc = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            let d = self.grid.center_of(i)[axis] - m;
            acc += v * d * d;
        }
        acc * self.grid.cell_volume() / self.mass
    }

    /// Cell-center location of the largest value.
    pub fn argmax(&self) -> Vec<f64> {
        let (best, _) = self
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("density has at least one cell");
        self.grid.center_of(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::make_double_well;

    #[test]
    fn grid_geometry_round_trips() {
        let g = GridSpec::new(vec![-1.0, 0.0], vec![1.0, 4.0], vec![10, 8]).unwrap();
        assert_eq!(g.dim(), 2);
        assert_eq!(g.n_cells(), 80);
        assert!((g.spacing(0) - 0.2).abs() < 1e-15);
        assert!((g.spacing(1) - 0.5).abs() < 1e-15);
        assert!((g.cell_volume() - 0.1).abs() < 1e-15);
        assert!((g.center(0, 0) + 0.9).abs() < 1e-15);
        let flat = g.index(3, 5);
        assert_eq!(g.center_of(flat), vec![g.center(0, 3), g.center(1, 5)]);
        assert!(g.is_boundary(g.index(0, 4)));
        assert!(g.is_boundary(g.index(3, 7)));
        assert!(!g.is_boundary(g.index(3, 5)));
    }

    #[test]
    fn rejects_malformed_grids() {
        assert!(GridSpec::new(vec![0.0], vec![0.0], vec![10]).is_err());
        assert!(GridSpec::new(vec![0.0], vec![1.0], vec![2]).is_err());
        assert!(GridSpec::new(vec![0.0; 3], vec![1.0; 3], vec![8; 3]).is_err());
        assert!(GridSpec::new(vec![0.0; 2], vec![1.0; 2], vec![600, 8]).is_err());
    }

    #[test]
    fn margin_check_uses_the_gaussian_width() {
        let (_, cat) = make_double_well(0.25).unwrap();
        // Minima at ±1 with curvature 2; at η∞ = 4 the margin is
        // 3/√8 ≈ 1.06, so bounds ±2.1 pass and ±1.8 fail.
        let ok = GridSpec::new(vec![-2.1], vec![2.1], vec![64]).unwrap();
        assert!(ok.validate_margin(&cat, 4.0).is_ok());
        let tight = GridSpec::new(vec![-1.8], vec![1.8], vec![64]).unwrap();
        assert!(matches!(
            tight.validate_margin(&cat, 4.0),
            Err(FokkerPlanckError::MarginTooSmall { .. })
        ));
        let auto = GridSpec::for_catalog(&cat, 4.0, 64).unwrap();
        assert!(auto.validate_margin(&cat, 4.0).is_ok());
    }

    #[test]
    fn density_mass_and_moments() {
        let g = GridSpec::new(vec![0.0], vec![1.0], vec![100]).unwrap();
        let values = vec![2.0; 100];
        let d = DensityField::from_values(g, values).unwrap().normalized().unwrap();
        assert!((d.mass() - 1.0).abs() < 1e-12);
        assert!((d.mean(0) - 0.5).abs() < 1e-12);
        // Uniform variance on [0,1] is 1/12 up to the h²/12 midpoint bias
        // (which happens to vanish for the uniform density).
        assert!((d.variance(0) - (1.0 - 1e-4) / 12.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_values() {
        let g = GridSpec::new(vec![0.0], vec![1.0], vec![10]).unwrap();
        let mut values = vec![0.1; 10];
        values[3] = -1e-12;
        assert!(DensityField::from_values(g, values).is_err());
    }
}
