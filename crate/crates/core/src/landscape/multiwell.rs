//! Multi-well landscapes with exactly prescribed minima.
//!
//! Construction: each requested well contributes a local quadratic
//! `q_i = depth_i + ½(w−c_i)ᵀΛ_i(w−c_i)` (Λ_i diagonal: principal axes are
//! coordinate-aligned). A compactly supported plateau weight ψ_i — equal to
//! 1 on a core ball, falling to 0 with four vanishing derivatives — pins
//! `L ≡ q_i` near each center, so the cataloged locations, depths and
//! Hessians are exact rather than fitted. Between wells the landscape is a
//! log-sum-exp soft minimum of the same quadratics, which produces smooth
//! cols with exactly one descent direction; those are located by ridge
//! search and Newton-polished. A quartic tail outside the study box keeps
//! the potential confining.
//!
//! Derivatives come from the jet module: the formula is written once and
//! instantiated at orders 0/1/2, so value, gradient and Hessian cannot
//! drift apart.

use super::jet::{Jet1, Jet2, Scalar};
use super::saddle::{find_saddle_1d, find_saddle_2d};
use super::{
    Barrier, CriticalPointCatalog, DomainBox, IsotropicLandscape, Landscape, LandscapeError,
    Minimum, Saddle,
};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// One requested minimum: location, loss value there, and the (positive)
/// Hessian eigenvalues along the coordinate axes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WellSpec {
    pub location: Vec<f64>,
    pub depth: f64,
    pub eigenvalues: Vec<f64>,
}

/// Softmin sharpness: crossing cols sit about `ln(K)/SHARPNESS` below the
/// raw quadratic crossing value.
const SHARPNESS: f64 = 8.0;

#[derive(Debug, Clone)]
pub struct Multiwell {
    dim: usize,
    wells: Vec<WellSpec>,
    /// Plateau radius (squared): `L ≡ q_i` within `r0` of center i.
    r0sq: f64,
    /// Bump support radius (squared): background takes over beyond `r1`.
    r1sq: f64,
    tail_k: f64,
    domain: DomainBox,
}

/// Ninth-order smoothstep on [0,1] (first four derivatives vanish at both
/// ends), clamped outside.
fn smoothstep4<S: Scalar>(t: S) -> S {
    if t.val() <= 0.0 {
        S::cst(0.0)
    } else if t.val() >= 1.0 {
        S::cst(1.0)
    } else {
        let t2 = t.sq();
        let t5 = t2.sq().mul(t);
        let poly = t
            .scale(70.0)
            .add_c(-315.0)
            .mul(t)
            .add_c(540.0)
            .mul(t)
            .add_c(-420.0)
            .mul(t)
            .add_c(126.0);
        poly.mul(t5)
    }
}

impl Multiwell {
    fn eval<S: Scalar, const D: usize>(&self, w: &[S; D]) -> S {
        debug_assert_eq!(self.dim, D);
        let inv_span = 1.0 / (self.r1sq - self.r0sq);
        let mut acc = S::cst(0.0);
        let mut psi_sum = S::cst(0.0);
        let mut craters: Vec<S> = Vec::with_capacity(self.wells.len());
        for well in &self.wells {
            let mut q = S::cst(well.depth);
            let mut r2 = S::cst(0.0);
            for k in 0..D {
                let dk = w[k].add_c(-well.location[k]);
                let dk2 = dk.sq();
                q = q.add(dk2.scale(0.5 * well.eigenvalues[k]));
                r2 = r2.add(dk2);
            }
            // Bump supports never overlap (enforced at construction), so
            // Σψ ≤ 1 and the weights form a partition with the background.
            let psi = smoothstep4(S::cst(self.r1sq).sub(r2).scale(inv_span));
            acc = acc.add(psi.mul(q));
            psi_sum = psi_sum.add(psi);
            craters.push(q);
        }

        // Soft minimum of the well quadratics, shifted for a stable
        // log-sum-exp.
        let m = craters.iter().map(|g| g.val()).fold(f64::INFINITY, f64::min);
        let mut sum = S::cst(0.0);
        for g in &craters {
            sum = sum.add(g.add_c(-m).scale(-SHARPNESS).exp());
        }
        let background = sum.ln().scale(-1.0 / SHARPNESS).add_c(m);
        acc = acc.add(S::cst(1.0).sub(psi_sum).mul(background));

        // Quartic confinement outside the study box (zero inside it).
        for k in 0..D {
            let x = w[k].val();
            let (lo, hi) = (self.domain.lo()[k], self.domain.hi()[k]);
            if x > hi {
                acc = acc.add(w[k].add_c(-hi).pow4().scale(self.tail_k));
            } else if x < lo {
                acc = acc.add(w[k].add_c(-lo).pow4().scale(self.tail_k));
            }
        }
        acc
    }

    /// Plateau radius: within this distance of a cataloged minimum the
    /// landscape is exactly its local quadratic.
    pub fn plateau_radius(&self) -> f64 {
        self.r0sq.sqrt()
    }
}

impl Landscape for Multiwell {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, w: &[f64]) -> f64 {
        match self.dim {
            1 => self.eval::<f64, 1>(&[w[0]]),
            _ => self.eval::<f64, 2>(&[w[0], w[1]]),
        }
    }

    fn gradient_into(&self, w: &[f64], out: &mut [f64]) {
        match self.dim {
            1 => {
                let j = self.eval::<Jet1<1>, 1>(&[Jet1::var(0, w[0])]);
                out[0] = j.g[0];
            }
            _ => {
                let j = self.eval::<Jet1<2>, 2>(&[Jet1::var(0, w[0]), Jet1::var(1, w[1])]);
                out[0] = j.g[0];
                out[1] = j.g[1];
            }
        }
    }

    fn hessian(&self, w: &[f64]) -> DMatrix<f64> {
        match self.dim {
            1 => {
                let j = self.eval::<Jet2<1>, 1>(&[Jet2::var(0, w[0])]);
                DMatrix::from_element(1, 1, j.h[0][0])
            }
            _ => {
                let j = self.eval::<Jet2<2>, 2>(&[Jet2::var(0, w[0]), Jet2::var(1, w[1])]);
                DMatrix::from_fn(2, 2, |i, k| j.h[i][k])
            }
        }
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }
}

impl IsotropicLandscape for Multiwell {
    fn beta(&self, _w: &[f64]) -> f64 {
        1.0
    }
}

fn validate_wells(wells: &[WellSpec]) -> Result<usize, LandscapeError> {
    if wells.is_empty() {
        return Err(LandscapeError::Invalid("at least one well is required".into()));
    }
    let dim = wells[0].location.len();
    if dim == 0 || dim > 2 {
        return Err(LandscapeError::Invalid(format!(
            "multiwell landscapes support dimensions 1 and 2, got {dim}"
        )));
    }
    for (index, w) in wells.iter().enumerate() {
        if w.location.len() != dim || w.eigenvalues.len() != dim {
            return Err(LandscapeError::Invalid(format!(
                "well {index}: location/eigenvalue dimensions disagree with {dim}"
            )));
        }
        if !w.depth.is_finite() {
            return Err(LandscapeError::Invalid(format!(
                "well {index}: depth {} is not finite",
                w.depth
            )));
        }
        for &value in &w.eigenvalues {
            if !(value > 0.0) {
                return Err(LandscapeError::NotPositiveDefinite { index, value });
            }
        }
    }
    Ok(dim)
}

fn pair_distance(a: &WellSpec, b: &WellSpec) -> f64 {
    a.location
        .iter()
        .zip(&b.location)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Scan a sampled grid for local minima that do not belong to any
/// cataloged well; the blend must not invent structure.
fn spurious_minimum_sweep(l: &Multiwell) -> Result<(), LandscapeError> {
    let near_a_well = |w: &[f64]| {
        l.wells.iter().any(|well| {
            well.location
                .iter()
                .zip(w)
                .map(|(c, x)| (c - x) * (c - x))
                .sum::<f64>()
                < l.r0sq
        })
    };
    let (lo, hi) = (l.domain.lo().to_vec(), l.domain.hi().to_vec());
    if l.dim == 1 {
        let n = 4001;
        let xs: Vec<f64> = (0..n)
            .map(|i| lo[0] + (hi[0] - lo[0]) * i as f64 / (n - 1) as f64)
            .collect();
        let vs: Vec<f64> = xs.iter().map(|x| l.value(&[*x])).collect();
        for i in 1..n - 1 {
            if vs[i] < vs[i - 1] && vs[i] < vs[i + 1] && !near_a_well(&[xs[i]]) {
                return Err(LandscapeError::Invalid(format!(
                    "blend created a spurious local minimum near w = {:.4} (loss {:.4})",
                    xs[i], vs[i]
                )));
            }
        }
    } else {
        let n = 161;
        let coord = |k: usize, i: usize| lo[k] + (hi[k] - lo[k]) * i as f64 / (n - 1) as f64;
        let mut vs = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                vs[i * n + j] = l.value(&[coord(0, i), coord(1, j)]);
            }
        }
        for i in 1..n - 1 {
            for j in 1..n - 1 {
                let v = vs[i * n + j];
                if v < vs[(i - 1) * n + j]
                    && v < vs[(i + 1) * n + j]
                    && v < vs[i * n + j - 1]
                    && v < vs[i * n + j + 1]
                    && !near_a_well(&[coord(0, i), coord(1, j)])
                {
                    return Err(LandscapeError::Invalid(format!(
                        "blend created a spurious local minimum near ({:.4}, {:.4}) (loss {:.4})",
                        coord(0, i),
                        coord(1, j),
                        v
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Builds the landscape and locates every pairwise saddle.
///
/// Preconditions: 1 ≤ dim ≤ 2; every pair of centers at least 4× the widest
/// well width apart (width of a well = 1/√(smallest eigenvalue)).
pub fn make_multiwell(
    wells: &[WellSpec],
) -> Result<(Multiwell, CriticalPointCatalog), LandscapeError> {
    let dim = validate_wells(wells)?;
    let widest = wells
        .iter()
        .flat_map(|w| w.eigenvalues.iter())
        .fold(0.0f64, |acc, &l| acc.max(1.0 / l.sqrt()));
    let mut minsep = f64::INFINITY;
    for i in 0..wells.len() {
        for j in (i + 1)..wells.len() {
            let d = pair_distance(&wells[i], &wells[j]);
            let required = 4.0 * widest;
            if d < required {
                return Err(LandscapeError::OverlappingWells { a: i, b: j, separation: d, required });
            }
            minsep = minsep.min(d);
        }
    }
    let r1 = if minsep.is_finite() { 0.24 * minsep } else { 2.0 * widest };
    let r0 = 0.55 * r1;

    let pad = 6.0 * widest;
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for w in wells {
        for k in 0..dim {
            lo[k] = lo[k].min(w.location[k] - pad);
            hi[k] = hi[k].max(w.location[k] + pad);
        }
    }
    let landscape = Multiwell {
        dim,
        wells: wells.to_vec(),
        r0sq: r0 * r0,
        r1sq: r1 * r1,
        tail_k: 1.0,
        domain: DomainBox::new(lo, hi),
    };

    let minima: Vec<Minimum> = wells
        .iter()
        .map(|w| Minimum::new(w.location.clone(), w.depth, w.eigenvalues.clone()))
        .collect();

    let mut saddles: Vec<Saddle> = Vec::new();
    let mut barriers: Vec<Barrier> = Vec::new();
    if wells.len() >= 2 {
        if dim == 1 {
            // Saddles between positionally consecutive wells; barriers for
            // every pair use the highest col strictly between the two.
            let mut order: Vec<usize> = (0..wells.len()).collect();
            order.sort_by(|&a, &b| {
                wells[a].location[0].partial_cmp(&wells[b].location[0]).unwrap()
            });
            let mut col_of_gap = Vec::new();
            for g in 0..order.len() - 1 {
                let (x, loss, curv) = find_saddle_1d(
                    &landscape,
                    wells[order[g]].location[0],
                    wells[order[g + 1]].location[0],
                )
                .map_err(|e| LandscapeError::SaddleSearchFailed {
                    from: order[g],
                    to: order[g + 1],
                    reason: e.to_string(),
                })?;
                col_of_gap.push(saddles.len());
                saddles.push(Saddle::new(vec![x], loss, vec![curv]));
            }
            let pos_of: Vec<usize> = {
                let mut p = vec![0; wells.len()];
                for (pos, &id) in order.iter().enumerate() {
                    p[id] = pos;
                }
                p
            };
            for i in 0..wells.len() {
                for j in 0..wells.len() {
                    if i == j {
                        continue;
                    }
                    let (plo, phi) = (pos_of[i].min(pos_of[j]), pos_of[i].max(pos_of[j]));
                    let gap = (plo..phi)
                        .max_by(|&a, &b| {
                            saddles[col_of_gap[a]]
                                .loss
                                .partial_cmp(&saddles[col_of_gap[b]].loss)
                                .unwrap()
                        })
                        .unwrap();
                    let sid = col_of_gap[gap];
                    barriers.push(Barrier {
                        from: i,
                        to: j,
                        saddle: sid,
                        height: saddles[sid].loss - wells[i].depth,
                    });
                }
            }
        } else {
            for i in 0..wells.len() {
                for j in (i + 1)..wells.len() {
                    let loc = find_saddle_2d(&landscape, &wells[i].location, &wells[j].location)
                        .map_err(|e| LandscapeError::SaddleSearchFailed {
                            from: i,
                            to: j,
                            reason: e.to_string(),
                        })?;
                    // Two pairs may share a col; dedupe by location.
                    let sid = saddles
                        .iter()
                        .position(|s| {
                            s.location
                                .iter()
                                .zip(&loc)
                                .map(|(a, b)| (a - b) * (a - b))
                                .sum::<f64>()
                                .sqrt()
                                < 1e-6
                        })
                        .unwrap_or_else(|| {
                            let h = landscape.hessian(&loc);
                            let eig = h.symmetric_eigen().eigenvalues.as_slice().to_vec();
                            saddles.push(Saddle::new(loc.clone(), landscape.value(&loc), eig));
                            saddles.len() - 1
                        });
                    for (from, to) in [(i, j), (j, i)] {
                        barriers.push(Barrier {
                            from,
                            to,
                            saddle: sid,
                            height: saddles[sid].loss - wells[from].depth,
                        });
                    }
                }
            }
        }
    }

    let catalog = CriticalPointCatalog::new(minima, saddles, barriers)?;
    catalog.verify(&landscape, 1e-3)?;
    spurious_minimum_sweep(&landscape)?;
    Ok((landscape, catalog))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::numeric::{numeric_gradient, numeric_hessian};
    use crate::landscape::Quadratic;

    fn two_wells() -> Vec<WellSpec> {
        vec![
            WellSpec { location: vec![-1.0], depth: 0.0, eigenvalues: vec![4.5] },
            WellSpec { location: vec![1.0], depth: 0.0, eigenvalues: vec![12.5] },
        ]
    }

    #[test]
    fn two_well_catalog_has_one_saddle_between() {
        let (l, cat) = make_multiwell(&two_wells()).unwrap();
        assert_eq!(cat.minima.len(), 2);
        assert_eq!(cat.saddles.len(), 1);
        let s = cat.saddles[0].location[0];
        assert!(s > -1.0 && s < 1.0);
        assert!(cat.saddles[0].lambda_star > 0.0);
        assert!(cat.barrier(0, 1).is_some() && cat.barrier(1, 0).is_some());
        // Exactness at the cores.
        assert_eq!(l.value(&[-1.0]), 0.0);
        assert_eq!(l.value(&[1.0]), 0.0);
        assert_eq!(l.gradient(&[-1.0])[0], 0.0);
        assert_eq!(l.hessian(&[-1.0])[(0, 0)], 4.5);
        assert_eq!(l.hessian(&[1.0])[(0, 0)], 12.5);
    }

    #[test]
    fn equal_depths_are_exactly_equal() {
        let (l, cat) = make_multiwell(&two_wells()).unwrap();
        let d0 = l.value(&cat.minima[0].location);
        let d1 = l.value(&cat.minima[1].location);
        assert!((d0 - d1).abs() <= 1e-9);
    }

    #[test]
    fn single_well_reduces_to_a_shifted_quadratic() {
        let spec = WellSpec { location: vec![0.7, -0.3], depth: 0.25, eigenvalues: vec![2.0, 5.0] };
        let (l, cat) = make_multiwell(std::slice::from_ref(&spec)).unwrap();
        assert_eq!(cat.minima.len(), 1);
        assert!(cat.saddles.is_empty());
        let q = Quadratic::new(spec.location.clone(), spec.eigenvalues.clone(), spec.depth).unwrap();
        for w in [[0.7, -0.3], [1.2, 0.4], [-0.6, -1.1], [2.0, 1.5]] {
            assert!((l.value(&w) - q.value(&w)).abs() < 1e-12, "at {w:?}");
            assert!((l.gradient(&w) - q.gradient(&w)).norm() < 1e-12);
        }
    }

    #[test]
    fn separation_precondition_is_enforced() {
        let wells = vec![
            WellSpec { location: vec![0.0], depth: 0.0, eigenvalues: vec![1.0] },
            WellSpec { location: vec![2.0], depth: 0.0, eigenvalues: vec![1.0] },
        ];
        // widths 1.0 each → requires ≥ 4.0 separation.
        assert!(matches!(
            make_multiwell(&wells),
            Err(LandscapeError::OverlappingWells { .. })
        ));
    }

    #[test]
    fn rejects_non_positive_definite_hessians() {
        let wells = vec![WellSpec { location: vec![0.0], depth: 0.0, eigenvalues: vec![-1.0] }];
        assert!(matches!(
            make_multiwell(&wells),
            Err(LandscapeError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn three_well_2d_catalog() {
        let wells = vec![
            WellSpec { location: vec![0.0, 0.0], depth: 0.0, eigenvalues: vec![15.0, 20.0] },
            WellSpec { location: vec![2.5, 0.0], depth: 0.0, eigenvalues: vec![14.22, 42.66] },
            WellSpec { location: vec![1.25, 2.165], depth: 0.0, eigenvalues: vec![102.13, 25.53] },
        ];
        let (l, cat) = make_multiwell(&wells).unwrap();
        assert_eq!(cat.minima.len(), 3);
        assert!(!cat.saddles.is_empty());
        for s in &cat.saddles {
            let neg = s.eigenvalues.iter().filter(|e| **e < 0.0).count();
            assert_eq!(neg, 1);
        }
        // All six directed barriers reachable.
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(cat.barrier(i, j).is_some(), "missing barrier ({i},{j})");
                }
            }
        }
        // Requested Hessians are exact at the cores.
        let h = l.hessian(&[2.5, 0.0]);
        assert_eq!(h[(0, 0)], 14.22);
        assert_eq!(h[(1, 1)], 42.66);
        assert_eq!(h[(0, 1)], 0.0);
    }

    #[test]
    fn derivatives_match_finite_differences_at_mixed_points() {
        let (l, cat) = make_multiwell(&two_wells()).unwrap();
        // Points in the core, the blend ring, the background, near the col.
        let saddle_x = cat.saddles[0].location[0];
        for x in [-1.0, -0.9, -0.7, -0.4, saddle_x + 0.05, 0.3, 0.8, 1.0, 1.7] {
            let g = numeric_gradient(&l, &[x], 1e-6).unwrap()[0];
            let ga = l.gradient(&[x])[0];
            assert!(
                (g - ga).abs() <= 1e-5 * ga.abs().max(1.0),
                "gradient at {x}: fd {g} vs jet {ga}"
            );
            let h = numeric_hessian(&l, &[x], 1e-4).unwrap()[(0, 0)];
            let ha = l.hessian(&[x])[(0, 0)];
            assert!(
                (h - ha).abs() <= 1e-3 * ha.abs().max(1.0),
                "hessian at {x}: fd {h} vs jet {ha}"
            );
        }
    }

    #[test]
    fn three_well_1d_barriers_use_the_highest_intermediate_col() {
        let wells = vec![
            WellSpec { location: vec![-2.0], depth: 0.0, eigenvalues: vec![4.5] },
            WellSpec { location: vec![0.0], depth: 0.0, eigenvalues: vec![12.5] },
            WellSpec { location: vec![2.0], depth: 0.0, eigenvalues: vec![28.125] },
        ];
        let (_, cat) = make_multiwell(&wells).unwrap();
        assert_eq!(cat.saddles.len(), 2);
        let b02 = cat.barrier(0, 2).unwrap();
        let b01 = cat.barrier(0, 1).unwrap();
        let b12 = cat.barrier(1, 2).unwrap();
        assert!(b02.height >= b01.height.max(0.0));
        assert!((b02.height - b01.height.max(b12.height)).abs() < 1e-12);
    }
}
