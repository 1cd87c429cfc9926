//! Critical-point catalogs: the exact minima/saddle/barrier data attached to
//! every analytic landscape factory.

use super::{numeric, Landscape, LandscapeError};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

/// Eigenvalues with magnitude below this are treated as degenerate and
/// rejected at catalog construction: the escape-time and stationary-mass
/// formulas divide by Hessian determinants.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// A local minimum with its exact Hessian spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Minimum {
    pub location: Vec<f64>,
    pub loss: f64,
    /// Hessian eigenvalues, ascending; all strictly positive.
    pub eigenvalues: Vec<f64>,
    /// Hessian determinant, the product of `eigenvalues`.
    pub determinant: f64,
}

/// A saddle with exactly one descent direction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Saddle {
    pub location: Vec<f64>,
    pub loss: f64,
    /// Magnitude of the unique negative Hessian eigenvalue.
    pub lambda_star: f64,
    /// Hessian eigenvalues, ascending; exactly one negative.
    pub eigenvalues: Vec<f64>,
    /// Absolute value of the Hessian determinant.
    pub determinant_abs: f64,
}

/// Directed barrier entry: leaving `from` toward `to` crosses `saddle`, and
/// the climb is `height = L(saddle) - L(from)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Barrier {
    pub from: usize,
    pub to: usize,
    pub saddle: usize,
    pub height: f64,
}

/// Exact critical-point metadata for a landscape: minima, saddles, and the
/// directed barrier map between neighboring minima.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriticalPointCatalog {
    pub minima: Vec<Minimum>,
    pub saddles: Vec<Saddle>,
    pub barriers: Vec<Barrier>,
}

impl Minimum {
    /// Builds a minimum from its eigenvalue list, sorting the spectrum and
    /// filling in the determinant.
    pub fn new(location: Vec<f64>, loss: f64, mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let determinant = eigenvalues.iter().product();
        Self { location, loss, eigenvalues, determinant }
    }
}

impl Saddle {
    /// Builds a saddle from its eigenvalue list (exactly one entry must be
    /// negative; validated by the catalog constructor).
    pub fn new(location: Vec<f64>, loss: f64, mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let lambda_star = -eigenvalues[0];
        let determinant_abs = eigenvalues.iter().map(|l| l.abs()).product();
        Self { location, loss, lambda_star, eigenvalues, determinant_abs }
    }
}

impl CriticalPointCatalog {
    /// Assembles and validates a catalog. Rejects degenerate spectra
    /// (|λ| < [`DEGENERACY_TOL`]), saddles without exactly one negative
    /// eigenvalue, and negative barrier heights.
    pub fn new(
        minima: Vec<Minimum>,
        saddles: Vec<Saddle>,
        barriers: Vec<Barrier>,
    ) -> Result<Self, LandscapeError> {
        for (i, m) in minima.iter().enumerate() {
            for &l in &m.eigenvalues {
                if l.abs() < DEGENERACY_TOL {
                    return Err(LandscapeError::DegenerateEigenvalue {
                        context: format!("minimum {i}"),
                        value: l,
                        tol: DEGENERACY_TOL,
                    });
                }
                if l <= 0.0 {
                    return Err(LandscapeError::NotPositiveDefinite { index: i, value: l });
                }
            }
        }
        for s in &saddles {
            let negatives = s.eigenvalues.iter().filter(|l| **l < 0.0).count();
            if negatives != 1 {
                return Err(LandscapeError::NotASaddle {
                    location: s.location.clone(),
                    count: negatives,
                });
            }
            for &l in &s.eigenvalues {
                if l.abs() < DEGENERACY_TOL {
                    return Err(LandscapeError::DegenerateEigenvalue {
                        context: format!("saddle at {:?}", s.location),
                        value: l,
                        tol: DEGENERACY_TOL,
                    });
                }
            }
        }
        for b in &barriers {
            if b.height < 0.0 {
                return Err(LandscapeError::NegativeBarrier {
                    from: b.from,
                    to: b.to,
                    height: b.height,
                });
            }
            if b.from >= minima.len() || b.to >= minima.len() || b.saddle >= saddles.len() {
                return Err(LandscapeError::Invalid(format!(
                    "barrier ({},{}) via saddle {} references a missing catalog entry",
                    b.from, b.to, b.saddle
                )));
            }
        }
        Ok(Self { minima, saddles, barriers })
    }

    /// The directed barrier entry for leaving `from` toward `to`.
    pub fn barrier(&self, from: usize, to: usize) -> Option<&Barrier> {
        self.barriers.iter().find(|b| b.from == from && b.to == to)
    }

    /// Index of the minimum with the lowest loss.
    pub fn global_minimum(&self) -> usize {
        self.minima
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.loss.partial_cmp(&b.loss).unwrap())
            .map(|(i, _)| i)
            .expect("catalog has no minima")
    }

    /// Largest Hessian eigenvalue over all cataloged critical points; used
    /// for time-step stability rules.
    pub fn max_curvature(&self) -> f64 {
        let mins = self
            .minima
            .iter()
            .flat_map(|m| m.eigenvalues.iter())
            .fold(0.0f64, |a, &l| a.max(l.abs()));
        let sads = self
            .saddles
            .iter()
            .flat_map(|s| s.eigenvalues.iter())
            .fold(0.0f64, |a, &l| a.max(l.abs()));
        mins.max(sads)
    }

    /// Smallest Hessian eigenvalue over the minima; sets the widest Gibbs
    /// peak and hence the grid margin needed to contain its tails.
    pub fn min_curvature(&self) -> f64 {
        self.minima
            .iter()
            .flat_map(|m| m.eigenvalues.iter())
            .fold(f64::INFINITY, |a, &l| a.min(l))
    }

    /// Cross-checks every stored entry against the landscape itself:
    /// gradient norm ≤ `1e-8` at each location and numeric Hessian
    /// eigenvalues within `rel_tol` of the stored spectrum.
    pub fn verify(&self, landscape: &dyn Landscape, rel_tol: f64) -> Result<(), LandscapeError> {
        // Small enough to resolve soft-min cols (curvature features a few
        // 1e-4 wide); round-off in the second difference stays ~1e-5
        // absolute for loss values of order ten.
        let step = 1e-5;
        let check = |location: &[f64], eigenvalues: &[f64], what: &str| {
            let g = landscape.gradient(location);
            if g.norm() > 1e-8 {
                return Err(LandscapeError::CatalogMismatch {
                    context: format!("{what} at {location:?}"),
                    detail: format!("gradient norm {:.3e} exceeds 1e-8", g.norm()),
                });
            }
            let h = numeric::numeric_hessian(landscape, location, step)?;
            let mut eig = h.symmetric_eigen().eigenvalues.as_slice().to_vec();
            eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (stored, found) in eigenvalues.iter().zip(&eig) {
                let scale = stored.abs().max(1.0);
                if (stored - found).abs() > rel_tol * scale {
                    return Err(LandscapeError::CatalogMismatch {
                        context: format!("{what} at {location:?}"),
                        detail: format!(
                            "stored eigenvalue {stored:.6} vs numeric {found:.6} (rel tol {rel_tol:.1e})"
                        ),
                    });
                }
            }
            Ok(())
        };
        for (i, m) in self.minima.iter().enumerate() {
            check(&m.location, &m.eigenvalues, &format!("minimum {i}"))?;
        }
        for (i, s) in self.saddles.iter().enumerate() {
            check(&s.location, &s.eigenvalues, &format!("saddle {i}"))?;
        }
        Ok(())
    }

    /// Locations as nalgebra vectors, handy for distance computations.
    pub fn minimum_location(&self, id: usize) -> DVector<f64> {
        DVector::from_column_slice(&self.minima[id].location)
    }

    pub fn saddle_location(&self, id: usize) -> DVector<f64> {
        DVector::from_column_slice(&self.saddles[id].location)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_sorts_and_fills_derived_fields() {
        let m = Minimum::new(vec![0.0, 0.0], 0.0, vec![5.0, 2.0]);
        assert_eq!(m.eigenvalues, vec![2.0, 5.0]);
        assert_eq!(m.determinant, 10.0);

        let s = Saddle::new(vec![1.0, 0.0], 0.5, vec![3.0, -2.0]);
        assert_eq!(s.eigenvalues, vec![-2.0, 3.0]);
        assert_eq!(s.lambda_star, 2.0);
        assert_eq!(s.determinant_abs, 6.0);
    }

    #[test]
    fn rejects_degenerate_and_malformed_entries() {
        let ok_min = Minimum::new(vec![0.0], 0.0, vec![1.0]);
        let bad_min = Minimum::new(vec![0.0], 0.0, vec![1e-12]);
        assert!(matches!(
            CriticalPointCatalog::new(vec![bad_min], vec![], vec![]),
            Err(LandscapeError::DegenerateEigenvalue { .. })
        ));

        let not_saddle = Saddle::new(vec![0.0, 0.0], 1.0, vec![1.0, 2.0]);
        assert!(matches!(
            CriticalPointCatalog::new(vec![ok_min.clone()], vec![not_saddle], vec![]),
            Err(LandscapeError::NotASaddle { count: 0, .. })
        ));

        let two_neg = Saddle::new(vec![0.0, 0.0], 1.0, vec![-1.0, -2.0]);
        assert!(matches!(
            CriticalPointCatalog::new(vec![ok_min.clone()], vec![two_neg], vec![]),
            Err(LandscapeError::NotASaddle { count: 2, .. })
        ));

        let saddle = Saddle::new(vec![0.5], 1.0, vec![-1.0]);
        let neg_barrier = Barrier { from: 0, to: 0, saddle: 0, height: -0.1 };
        assert!(matches!(
            CriticalPointCatalog::new(vec![ok_min], vec![saddle], vec![neg_barrier]),
            Err(LandscapeError::NegativeBarrier { .. })
        ));
    }

    #[test]
    fn lookups() {
        let minima = vec![
            Minimum::new(vec![-1.0], 0.3, vec![2.0]),
            Minimum::new(vec![1.0], 0.0, vec![4.0]),
        ];
        let saddles = vec![Saddle::new(vec![0.0], 1.0, vec![-1.0])];
        let barriers = vec![
            Barrier { from: 0, to: 1, saddle: 0, height: 0.7 },
            Barrier { from: 1, to: 0, saddle: 0, height: 1.0 },
        ];
        let cat = CriticalPointCatalog::new(minima, saddles, barriers).unwrap();
        assert_eq!(cat.global_minimum(), 1);
        assert_eq!(cat.barrier(0, 1).unwrap().height, 0.7);
        assert_eq!(cat.barrier(1, 0).unwrap().height, 1.0);
        assert!(cat.barrier(0, 0).is_none());
        assert_eq!(cat.max_curvature(), 4.0);
    }
}
