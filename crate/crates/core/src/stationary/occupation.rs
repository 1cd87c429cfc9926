//! Empirical counterpart of the ball-probability ratio: the fraction of a
//! long trajectory's time spent within ε of each of two minima.

use serde::Serialize;

use super::StationaryError;
use crate::dynamics::{sde_drive, stable_dt, Schedule};
use crate::landscape::{CriticalPointCatalog, IsotropicLandscape};
use crate::metastability::kramers_time;

/// The post-burn-in window should cover this many multiples of the slowest
/// predicted escape time before the occupation ratio is trusted.
const MIXING_MULTIPLE: f64 = 10.0;

/// Time shares of two ε-balls along one long trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct OccupationRatio {
    /// occupancy.0 / occupancy.1, or `None` when either ball was never
    /// visited after burn-in (a ratio of 0 or ∞ carries no information).
    pub ratio: Option<f64>,
    /// Time spent within ε of each minimum after burn-in.
    pub occupancy: (f64, f64),
    pub eta_inf: f64,
    pub epsilon: f64,
    pub t_burn: f64,
    pub t_total: f64,
    /// Present when the window is too short against the predicted escape
    /// times — or when no prediction exists — so the ratio may still carry
    /// the starting well's imprint.
    pub mixing_warning: Option<String>,
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Runs one constant-schedule trajectory from the first minimum at the
/// learning rate that realizes `eta_inf` (M = 1, γ = 2/(η∞β)), and splits
/// its post-burn-in time between the two ε-balls.
#[allow(clippy::too_many_arguments)]
pub fn occupation_ratio_mc<L>(
    landscape: &L,
    catalog: &CriticalPointCatalog,
    id1: usize,
    id2: usize,
    eta_inf: f64,
    epsilon: f64,
    t_burn: f64,
    t_total: f64,
    dt: f64,
    seed: u64,
) -> Result<OccupationRatio, StationaryError>
where
    L: IsotropicLandscape + ?Sized,
{
    let n = catalog.minima.len();
    if id1 >= n || id2 >= n {
        return Err(StationaryError::Invalid(format!(
            "minimum indices ({id1}, {id2}) out of range, catalog has {n}"
        )));
    }
    if id1 == id2 {
        return Err(StationaryError::Invalid(
            "occupation ratio needs two distinct minima".into(),
        ));
    }
    if !(eta_inf > 0.0) || !eta_inf.is_finite() {
        return Err(StationaryError::Invalid(format!(
            "eta_inf must be positive and finite, got {eta_inf}"
        )));
    }
    if !(t_burn >= 0.0) || !(t_total > t_burn) {
        return Err(StationaryError::Invalid(format!(
            "need 0 ≤ t_burn < t_total, got t_burn = {t_burn}, t_total = {t_total}"
        )));
    }
    let bound = stable_dt(catalog);
    if !(dt > 0.0) || dt > bound {
        return Err(StationaryError::Invalid(format!(
            "dt = {dt} outside (0, {bound}], the stability bound"
        )));
    }
    let (m1, m2) = (&catalog.minima[id1], &catalog.minima[id2]);
    let separation = euclidean(&m1.location, &m2.location);
    if !(epsilon > 0.0) || epsilon >= 0.5 * separation {
        return Err(StationaryError::Invalid(format!(
            "epsilon = {epsilon} must sit in (0, {}), half the distance \
             between the minima, so the balls stay disjoint",
            0.5 * separation
        )));
    }

    let beta = landscape.beta(&m1.location);
    let gamma = 2.0 / (eta_inf * beta);
    let schedule = Schedule::constant(gamma, 1)?;

    let window = t_total - t_burn;
    let forward = kramers_time(catalog, id1, id2, gamma, 1.0, beta).ok();
    let backward = kramers_time(catalog, id2, id1, gamma, 1.0, beta).ok();
    let mixing_warning = match (forward, backward) {
        (Some(f), Some(b)) => {
            let slowest = f.expected_time.max(b.expected_time);
            (window < MIXING_MULTIPLE * slowest).then(|| {
                format!(
                    "window {window:.1} is shorter than {MIXING_MULTIPLE}× the slowest \
                     predicted escape time {slowest:.1}; the trajectory may not have mixed"
                )
            })
        }
        _ => Some(format!(
            "no barrier entry between minima {id1} and {id2}; mixing time unchecked"
        )),
    };

    let mut occ1 = 0.0;
    let mut occ2 = 0.0;
    sde_drive(landscape, &schedule, &m1.location, t_total, dt, seed, 0, |_, t, w| {
        if t >= t_burn {
            if euclidean(w, &m1.location) <= epsilon {
                occ1 += dt;
            } else if euclidean(w, &m2.location) <= epsilon {
                occ2 += dt;
            }
        }
        true
    })?;

    let ratio = (occ1 > 0.0 && occ2 > 0.0).then(|| occ1 / occ2);
    Ok(OccupationRatio {
        ratio,
        occupancy: (occ1, occ2),
        eta_inf,
        epsilon,
        t_burn,
        t_total,
        mixing_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{make_asymmetric_double_well, make_double_well};
    use statrs::function::erf::erf;

    #[test]
    fn symmetric_double_well_splits_time_evenly() {
        let (landscape, catalog) = make_double_well(0.25).unwrap();
        // η∞ = 6 ⇒ escape time ≈ 14; the window covers ≈ 420 alternations.
        let r = occupation_ratio_mc(&landscape, &catalog, 0, 1, 6.0, 0.3, 50.0, 6000.0, 0.02, 41)
            .unwrap();
        assert!(r.mixing_warning.is_none(), "warning: {:?}", r.mixing_warning);
        let ratio = r.ratio.unwrap();
        assert!(
            (0.7..1.4).contains(&ratio),
            "symmetric occupation ratio {ratio}, occupancy {:?}",
            r.occupancy
        );
    }

    /// Finite-ε prediction for a 1D equal-depth pair: √(det₂/det₁) modulated
    /// by the exact Gaussian ball fractions.
    fn expected_ratio(l1: f64, l2: f64, eta: f64, eps: f64) -> f64 {
        (l2 / l1).sqrt() * erf(eps * (eta * l1 / 2.0).sqrt()) / erf(eps * (eta * l2 / 2.0).sqrt())
    }

    #[test]
    fn flat_well_collects_more_time_by_the_ratio_law() {
        let (landscape, catalog) = make_asymmetric_double_well(4.5, 12.5, 0.45).unwrap();
        let eta = 4.0;
        let dt = 0.9 * stable_dt(&catalog);
        let tau = kramers_time(&catalog, 0, 1, 2.0 / eta, 1.0, 1.0)
            .unwrap()
            .expected_time
            .max(kramers_time(&catalog, 1, 0, 2.0 / eta, 1.0, 1.0).unwrap().expected_time);
        // A few hundred alternations, bounded in case the barrier estimate
        // runs high.
        let t_total = (300.0 * tau).clamp(1500.0, 40_000.0);
        let r = occupation_ratio_mc(
            &landscape, &catalog, 0, 1, eta, 0.4, 20.0, t_total, dt, 2025,
        )
        .unwrap();
        assert!(r.mixing_warning.is_none(), "warning: {:?}", r.mixing_warning);
        let ratio = r.ratio.unwrap();
        let expected = expected_ratio(4.5, 12.5, eta, 0.4);
        assert!(ratio > 1.15, "flat well should dominate, got {ratio}");
        assert!(
            (ratio / expected - 1.0).abs() < 0.3,
            "ratio {ratio} vs finite-ε law {expected}"
        );
    }

    #[test]
    fn ratio_is_insensitive_to_eta() {
        let (landscape, catalog) = make_asymmetric_double_well(4.5, 12.5, 0.45).unwrap();
        let dt = 0.9 * stable_dt(&catalog);
        let mut ratios = Vec::new();
        for (eta, seed) in [(4.0, 7_u64), (6.0, 8), (8.0, 9)] {
            let tau = kramers_time(&catalog, 0, 1, 2.0 / eta, 1.0, 1.0)
                .unwrap()
                .expected_time
                .max(kramers_time(&catalog, 1, 0, 2.0 / eta, 1.0, 1.0).unwrap().expected_time);
            let t_total = (80.0 * tau).clamp(1500.0, 40_000.0);
            let r = occupation_ratio_mc(
                &landscape, &catalog, 0, 1, eta, 0.4, 20.0, t_total, dt, seed,
            )
            .unwrap();
            ratios.push(r.ratio.unwrap());
        }
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(
            max / min < 1.5,
            "ratios should agree across η∞ up to MC noise: {ratios:?}"
        );
        assert!(ratios.iter().all(|&r| r > 1.1), "flat-well dominance lost: {ratios:?}");
    }

    #[test]
    fn unvisited_ball_yields_no_ratio_and_a_warning() {
        let (landscape, catalog) = make_double_well(0.25).unwrap();
        // η∞ = 20 ⇒ escape time ≈ 660 ≫ the 40-unit window: the walker stays
        // in the left well.
        let r = occupation_ratio_mc(&landscape, &catalog, 0, 1, 20.0, 0.25, 5.0, 40.0, 0.02, 3)
            .unwrap();
        assert!(r.ratio.is_none());
        assert!(r.occupancy.0 > 0.0);
        assert_eq!(r.occupancy.1, 0.0);
        assert!(r.mixing_warning.is_some());
    }

    #[test]
    fn rejects_bad_setups() {
        let (landscape, catalog) = make_double_well(0.25).unwrap();
        // Balls must stay disjoint: minima sit 2 apart.
        let err =
            occupation_ratio_mc(&landscape, &catalog, 0, 1, 6.0, 1.1, 0.0, 100.0, 0.02, 0)
                .unwrap_err();
        assert!(err.to_string().contains("disjoint"));
        let err =
            occupation_ratio_mc(&landscape, &catalog, 0, 0, 6.0, 0.3, 0.0, 100.0, 0.02, 0)
                .unwrap_err();
        assert!(err.to_string().contains("distinct"));
        let err =
            occupation_ratio_mc(&landscape, &catalog, 0, 1, 6.0, 0.3, 100.0, 100.0, 0.02, 0)
                .unwrap_err();
        assert!(err.to_string().contains("t_burn"));
        // Double-well curvature is 2, so the stability bound is 0.05.
        let err =
            occupation_ratio_mc(&landscape, &catalog, 0, 1, 6.0, 0.3, 0.0, 100.0, 0.06, 0)
                .unwrap_err();
        assert!(err.to_string().contains("stability bound"));
    }
}
