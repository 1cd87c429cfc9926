//! Ball mass near a minimizer under the stationary density, two ways.
//!
//! The closed form treats the density inside the ε-ball as the Gaussian of
//! the local Hessian, integrates it axis by axis, and replaces each Gaussian
//! integral with Pólya's approximation `erf(z) ≈ √(1 − e^{−4z²/π})`. The
//! oracle integrates κe^{−η∞L} over the actual ball by midpoint quadrature
//! and owes nothing to the expansion, so the gap between the two is a real
//! measurement of the closed form's finite-ε error.
//!
//! The depth weight of a minimum at loss L(w̌) enters the closed form as
//! e^{−η∞L(w̌)} — the weight the density itself produces — but a variant
//! with the squared weight e^{−2η∞L(w̌)} is carried alongside, and
//! [`MinimizerProbability::favored`] records which one the oracle supports.
//! The two coincide on equal-depth catalogs, where every depth weight is 1.

use serde::Serialize;
use std::f64::consts::{PI, TAU};

use super::StationaryError;
use crate::fokker_planck::{stationary_density, GridSpec};
use crate::landscape::{CriticalPointCatalog, Landscape, DEGENERACY_TOL};

/// Normalization grid resolution per axis, by dimension (index `dim − 1`).
const KAPPA_CELLS: [usize; 2] = [2048, 384];

/// Ball-quadrature resolution per axis, by dimension. The coarse pass for
/// the refinement check halves these. 512² stays under the 10⁶-point cap.
const ORACLE_CELLS: [usize; 2] = [4096, 512];

/// Two minima count as equally deep below this loss difference.
const EQUAL_DEPTH_TOL: f64 = 1e-9;

/// Which depth-weight exponent the quadrature oracle lands closer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DepthConvention {
    /// Weight e^{−η∞L(w̌)}, consistent with the stationary density.
    Single,
    /// Weight e^{−2η∞L(w̌)}.
    Double,
}

/// Closed-form and quadrature estimates of P(‖w − w̌‖ ≤ ε) under κe^{−η∞L},
/// with the closed form's factors broken out. The factors multiply to
/// `closed_form` exactly (to rounding); swapping `depth_weight` for
/// `depth_weight_double` yields `closed_form_double`.
#[derive(Debug, Clone, Serialize)]
pub struct MinimizerProbability {
    pub minimum: usize,
    pub eta_inf: f64,
    pub epsilon: f64,
    /// κ · e^{−η∞L(w̌)} · (2π/η∞)^{d/2}/√det · e^{η∞ε²} · Π_j√(1−e^{−2ε²η∞λ_j/π}).
    pub closed_form: f64,
    /// Same assembly with the squared depth weight.
    pub closed_form_double: f64,
    /// Midpoint quadrature of κe^{−η∞L} over the ball.
    pub quadrature: f64,
    /// |closed_form − quadrature| / quadrature.
    pub gap: f64,
    pub gap_double: f64,
    /// Convention with the smaller gap; ties go to [`DepthConvention::Single`].
    pub favored: DepthConvention,
    /// Relative change of the oracle when the quadrature grid is halved —
    /// a convergence check on the oracle itself, not on the closed form.
    pub oracle_refinement_gap: f64,
    /// Normalization constant of the stationary density on the grid.
    pub kappa: f64,
    pub depth_weight: f64,
    pub depth_weight_double: f64,
    /// (2π/η∞)^{d/2} / √det ∇²L(w̌).
    pub determinant_factor: f64,
    /// Π_j √(1 − e^{−2ε²η∞λ_j/π}): Pólya's value for the fraction of each
    /// axis Gaussian inside ±ε.
    pub product_term: f64,
    /// e^{η∞ε²}.
    pub inflation: f64,
}

/// Fraction of a one-axis Gaussian with precision η∞λ inside ±ε, in Pólya's
/// approximation.
fn polya_axis_fraction(epsilon: f64, eta_inf: f64, lambda: f64) -> f64 {
    (1.0 - (-2.0 * epsilon * epsilon * eta_inf * lambda / PI).exp()).sqrt()
}

/// Midpoint quadrature of κe^{−η∞L} over the ball ‖w − center‖ ≤ ε with
/// `cells` midpoints per axis. In 1D the ball is an interval and every
/// midpoint lies inside; in 2D the indicator trims the bounding box.
fn ball_quadrature<L>(
    landscape: &L,
    kappa: f64,
    eta_inf: f64,
    center: &[f64],
    epsilon: f64,
    cells: usize,
) -> f64
where
    L: Landscape + ?Sized,
{
    let h = 2.0 * epsilon / cells as f64;
    let mut sum = 0.0;
    match center.len() {
        1 => {
            for i in 0..cells {
                let x = center[0] - epsilon + (i as f64 + 0.5) * h;
                sum += (-eta_inf * landscape.value(&[x])).exp();
            }
            kappa * sum * h
        }
        _ => {
            let r2 = epsilon * epsilon;
            let mut point = [0.0; 2];
            for ix in 0..cells {
                point[0] = center[0] - epsilon + (ix as f64 + 0.5) * h;
                let dx2 = (point[0] - center[0]) * (point[0] - center[0]);
                for iy in 0..cells {
                    point[1] = center[1] - epsilon + (iy as f64 + 0.5) * h;
                    let dy = point[1] - center[1];
                    if dx2 + dy * dy <= r2 {
                        sum += (-eta_inf * landscape.value(&point)).exp();
                    }
                }
            }
            kappa * sum * h * h
        }
    }
}

/// Evaluates the closed-form ball probability for `catalog.minima[minimum]`
/// and the quadrature oracle for the same ball, on the catalog's standard
/// grid (normalization tail check included).
pub fn minimizer_probability<L>(
    landscape: &L,
    catalog: &CriticalPointCatalog,
    minimum: usize,
    eta_inf: f64,
    epsilon: f64,
) -> Result<MinimizerProbability, StationaryError>
where
    L: Landscape + ?Sized,
{
    if minimum >= catalog.minima.len() {
        return Err(StationaryError::Invalid(format!(
            "minimum index {minimum} out of range, catalog has {}",
            catalog.minima.len()
        )));
    }
    if !(eta_inf > 0.0) || !eta_inf.is_finite() {
        return Err(StationaryError::Invalid(format!(
            "eta_inf must be positive and finite, got {eta_inf}"
        )));
    }
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(StationaryError::Invalid(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    let entry = &catalog.minima[minimum];
    let dim = entry.location.len();
    if landscape.dim() != dim {
        return Err(StationaryError::Invalid(format!(
            "landscape dimension {} does not match catalog dimension {dim}",
            landscape.dim()
        )));
    }
    if entry.determinant < DEGENERACY_TOL {
        return Err(StationaryError::Invalid(format!(
            "minimum {minimum} has degenerate Hessian determinant {}",
            entry.determinant
        )));
    }

    let grid = GridSpec::for_catalog(catalog, eta_inf, KAPPA_CELLS[dim - 1])?;
    let (_, kappa) = stationary_density(landscape, eta_inf, &grid)?;
    for a in 0..dim {
        if entry.location[a] - epsilon < grid.lo()[a] || entry.location[a] + epsilon > grid.hi()[a]
        {
            return Err(StationaryError::BallOutsideGrid { minimum, epsilon });
        }
    }

    let fine = ORACLE_CELLS[dim - 1];
    let quadrature =
        ball_quadrature(landscape, kappa, eta_inf, &entry.location, epsilon, fine);
    let coarse =
        ball_quadrature(landscape, kappa, eta_inf, &entry.location, epsilon, fine / 2);
    let oracle_refinement_gap = ((quadrature - coarse) / quadrature).abs();

    let depth_weight = (-eta_inf * entry.loss).exp();
    let depth_weight_double = (-2.0 * eta_inf * entry.loss).exp();
    let determinant_factor = (TAU / eta_inf).powi(dim as i32).sqrt() / entry.determinant.sqrt();
    let product_term: f64 = entry
        .eigenvalues
        .iter()
        .map(|&l| polya_axis_fraction(epsilon, eta_inf, l))
        .product();
    let inflation = (eta_inf * epsilon * epsilon).exp();

    let shape = kappa * determinant_factor * product_term * inflation;
    let closed_form = shape * depth_weight;
    let closed_form_double = shape * depth_weight_double;
    let gap = ((closed_form - quadrature) / quadrature).abs();
    let gap_double = ((closed_form_double - quadrature) / quadrature).abs();
    let favored = if gap_double < gap { DepthConvention::Double } else { DepthConvention::Single };

    Ok(MinimizerProbability {
        minimum,
        eta_inf,
        epsilon,
        closed_form,
        closed_form_double,
        quadrature,
        gap,
        gap_double,
        favored,
        oracle_refinement_gap,
        kappa,
        depth_weight,
        depth_weight_double,
        determinant_factor,
        product_term,
        inflation,
    })
}

/// Which branch of [`probability_ratio`] produced the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RatioRegime {
    /// Equal-depth minima: the ratio collapses to √(det₂/det₁) and is exactly
    /// independent of η∞, ε, γ, M and β.
    EqualDepth,
    /// Unequal depths: finite-ε ratio of the closed forms (single depth
    /// weight; κ, the (2π/η∞)^{d/2} factor and e^{η∞ε²} cancel).
    General,
}

/// P(ball around minimum 1) / P(ball around minimum 2).
#[derive(Debug, Clone, Serialize)]
pub struct ProbabilityRatio {
    pub value: f64,
    pub regime: RatioRegime,
    pub eta_inf: f64,
    pub epsilon: f64,
}

pub fn probability_ratio(
    catalog: &CriticalPointCatalog,
    id1: usize,
    id2: usize,
    eta_inf: f64,
    epsilon: f64,
) -> Result<ProbabilityRatio, StationaryError> {
    let n = catalog.minima.len();
    if id1 >= n || id2 >= n {
        return Err(StationaryError::Invalid(format!(
            "minimum indices ({id1}, {id2}) out of range, catalog has {n}"
        )));
    }
    if !(eta_inf > 0.0) || !(epsilon > 0.0) {
        return Err(StationaryError::Invalid(format!(
            "need eta_inf > 0 and epsilon > 0, got {eta_inf} and {epsilon}"
        )));
    }
    let (m1, m2) = (&catalog.minima[id1], &catalog.minima[id2]);
    for (id, m) in [(id1, m1), (id2, m2)] {
        if m.determinant < DEGENERACY_TOL {
            return Err(StationaryError::Invalid(format!(
                "minimum {id} has degenerate Hessian determinant {}",
                m.determinant
            )));
        }
    }
    if id1 == id2 {
        return Ok(ProbabilityRatio {
            value: 1.0,
            regime: RatioRegime::EqualDepth,
            eta_inf,
            epsilon,
        });
    }
    let det_ratio = (m2.determinant / m1.determinant).sqrt();
    if (m1.loss - m2.loss).abs() <= EQUAL_DEPTH_TOL {
        return Ok(ProbabilityRatio {
            value: det_ratio,
            regime: RatioRegime::EqualDepth,
            eta_inf,
            epsilon,
        });
    }
    let depth = (-eta_inf * (m1.loss - m2.loss)).exp();
    let product: f64 = m1
        .eigenvalues
        .iter()
        .zip(&m2.eigenvalues)
        .map(|(&l1, &l2)| {
            polya_axis_fraction(epsilon, eta_inf, l1) / polya_axis_fraction(epsilon, eta_inf, l2)
        })
        .product();
    Ok(ProbabilityRatio {
        value: depth * det_ratio * product,
        regime: RatioRegime::General,
        eta_inf,
        epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{make_quadratic, Minimum, Quadratic};
    use statrs::function::erf::erf;

    #[test]
    fn factors_multiply_to_the_closed_form() {
        let (landscape, catalog) = make_quadratic(&[4.5]).unwrap();
        let p = minimizer_probability(&landscape, &catalog, 0, 4.0, 0.1).unwrap();
        let manual =
            p.kappa * p.depth_weight * p.determinant_factor * p.product_term * p.inflation;
        assert!((manual - p.closed_form).abs() <= 1e-12 * p.closed_form);
        // Reassemble the factors from scratch.
        assert!((p.depth_weight - 1.0).abs() < 1e-15);
        let det = (TAU / 4.0_f64).sqrt() / 4.5_f64.sqrt();
        assert!((p.determinant_factor - det).abs() < 1e-12 * det);
        let prod = (1.0 - (-2.0 * 0.01 * 4.0 * 4.5 / PI).exp()).sqrt();
        assert!((p.product_term - prod).abs() < 1e-12 * prod);
        let infl = (4.0 * 0.01_f64).exp();
        assert!((p.inflation - infl).abs() < 1e-12 * infl);
    }

    #[test]
    fn quadratic_ball_mass_matches_the_error_function() {
        let (landscape, catalog) = make_quadratic(&[4.5]).unwrap();
        let p = minimizer_probability(&landscape, &catalog, 0, 4.0, 0.1).unwrap();
        // ∫_{−0.1}^{0.1} κe^{−4·4.5w²/2} dw = erf(0.1·√(4·4.5/2)) = erf(0.3),
        // up to the quadrature's O(h²) and the e^{−18} boundary truncation.
        let reference = erf(0.3);
        assert!(
            (p.quadrature - reference).abs() < 1e-5,
            "quadrature {} vs erf reference {reference}",
            p.quadrature
        );
        assert!(p.gap < 0.10, "closed form off by {}", p.gap);
        // Depth 0 makes both conventions identical; ties go to Single.
        assert_eq!(p.favored, DepthConvention::Single);
        assert_eq!(p.gap, p.gap_double);
        assert!(p.oracle_refinement_gap < 1e-6);
    }

    #[test]
    fn closed_form_gap_shrinks_as_epsilon_halves() {
        let (landscape, catalog) = make_quadratic(&[4.5]).unwrap();
        let gaps: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&eps| {
                minimizer_probability(&landscape, &catalog, 0, 4.0, eps).unwrap().gap
            })
            .collect();
        assert!(
            gaps[0] > gaps[1] && gaps[1] > gaps[2],
            "gaps not shrinking: {gaps:?}"
        );
    }

    #[test]
    fn large_ball_captures_all_mass() {
        let (landscape, catalog) = make_quadratic(&[1.0]).unwrap();
        // Grid spans ±3 at η∞ = 4; a ball of radius 2.9 holds the Gaussian
        // up to mass 2Φ(−5.8) ≈ 7e−9.
        let p = minimizer_probability(&landscape, &catalog, 0, 4.0, 2.9).unwrap();
        assert!((p.quadrature - 1.0).abs() < 1e-4);
        assert!(p.quadrature < 1.0 + 1e-4);
        // The closed form is a small-ε expansion: e^{η∞ε²} ruins it here.
        assert!(p.closed_form > 1.0);
    }

    #[test]
    fn ball_must_stay_inside_the_grid() {
        let (landscape, catalog) = make_quadratic(&[1.0]).unwrap();
        let err = minimizer_probability(&landscape, &catalog, 0, 4.0, 3.5).unwrap_err();
        assert!(matches!(
            err,
            StationaryError::BallOutsideGrid { minimum: 0, epsilon } if epsilon == 3.5
        ));
    }

    #[test]
    fn oracle_rules_between_depth_conventions() {
        // A minimum at loss 0.3: the single weight e^{−η∞·0.3} cancels against
        // κ, the double weight e^{−2η∞·0.3} undershoots by e^{−0.9}.
        let landscape = Quadratic::new(vec![0.0], vec![2.0], 0.3).unwrap();
        let catalog = CriticalPointCatalog::new(
            vec![Minimum::new(vec![0.0], 0.3, vec![2.0])],
            vec![],
            vec![],
        )
        .unwrap();
        let p = minimizer_probability(&landscape, &catalog, 0, 3.0, 0.1).unwrap();
        assert_eq!(p.favored, DepthConvention::Single);
        assert!(p.gap < 0.05, "single-weight gap {}", p.gap);
        assert!(p.gap_double > 0.3, "double-weight gap {}", p.gap_double);
    }

    #[test]
    fn two_dimensional_closed_form_overshoots_the_ball() {
        // Per-axis factors integrate the bounding box, not the ball; in 2D
        // that over-counts by up to 4/π ≈ 1.27 (times e^{η∞ε²}). The oracle
        // keeps the honest value; the closed form's excess stays bounded.
        let (landscape, catalog) = make_quadratic(&[2.0, 3.0]).unwrap();
        let p = minimizer_probability(&landscape, &catalog, 0, 4.0, 0.15).unwrap();
        let excess = p.closed_form / p.quadrature;
        assert!(
            excess > 1.05 && excess < 1.6,
            "box-over-ball excess {excess} out of range"
        );
        assert!(p.oracle_refinement_gap < 0.02);
    }

    fn equal_depth_catalog() -> CriticalPointCatalog {
        CriticalPointCatalog::new(
            vec![
                Minimum::new(vec![-2.0], 0.0, vec![4.5]),
                Minimum::new(vec![0.0], 0.0, vec![12.5]),
                Minimum::new(vec![2.0], 0.0, vec![28.125]),
            ],
            vec![],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn equal_depth_ratio_is_the_determinant_root() {
        let catalog = equal_depth_catalog();
        let r = probability_ratio(&catalog, 0, 1, 4.0, 0.1).unwrap();
        assert_eq!(r.regime, RatioRegime::EqualDepth);
        assert!((r.value - (12.5_f64 / 4.5).sqrt()).abs() < 1e-15);
        assert!((r.value - 1.6667).abs() < 1e-4);
        // 28.125/4.5 = 6.25 and √6.25 = 2.5, all exact in binary.
        let r = probability_ratio(&catalog, 0, 2, 4.0, 0.1).unwrap();
        assert_eq!(r.value, 2.5);
        let same = probability_ratio(&catalog, 1, 1, 4.0, 0.1).unwrap();
        assert_eq!(same.value, 1.0);
    }

    #[test]
    fn equal_depth_ratio_ignores_eta_and_epsilon() {
        let catalog = equal_depth_catalog();
        let a = probability_ratio(&catalog, 0, 1, 4.0, 0.1).unwrap();
        let b = probability_ratio(&catalog, 0, 1, 9.0, 0.3).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn scaling_all_eigenvalues_scales_the_ratio() {
        let base = CriticalPointCatalog::new(
            vec![
                Minimum::new(vec![0.0, 0.0], 0.0, vec![2.0, 3.0]),
                Minimum::new(vec![4.0, 0.0], 0.0, vec![4.0, 6.0]),
            ],
            vec![],
            vec![],
        )
        .unwrap();
        let scaled = CriticalPointCatalog::new(
            vec![
                Minimum::new(vec![0.0, 0.0], 0.0, vec![2.0, 3.0]),
                Minimum::new(vec![4.0, 0.0], 0.0, vec![20.0, 30.0]),
            ],
            vec![],
            vec![],
        )
        .unwrap();
        let r1 = probability_ratio(&base, 0, 1, 4.0, 0.1).unwrap();
        let r2 = probability_ratio(&scaled, 0, 1, 4.0, 0.1).unwrap();
        // Eigenvalues of minimum 2 scaled by c = 5 in d = 2: ratio gains c^{d/2}.
        assert_eq!(r1.value, 2.0);
        assert_eq!(r2.value, 10.0);
        assert_eq!(r2.value, r1.value * 5.0);
    }

    #[test]
    fn unequal_depths_use_the_general_branch() {
        let catalog = CriticalPointCatalog::new(
            vec![
                Minimum::new(vec![-2.0], 0.0, vec![4.5]),
                Minimum::new(vec![2.0], 0.05, vec![12.5]),
            ],
            vec![],
            vec![],
        )
        .unwrap();
        let r = probability_ratio(&catalog, 0, 1, 6.0, 0.1).unwrap();
        assert_eq!(r.regime, RatioRegime::General);
        // By hand: e^{−η∞(L₁−L₂)} · √(det₂/det₁) · per-axis Pólya fractions.
        let polya = |l: f64, eta: f64| (1.0 - (-2.0 * 0.01 * eta * l / PI).exp()).sqrt();
        let manual = (6.0_f64 * 0.05).exp() * (12.5_f64 / 4.5).sqrt() * polya(4.5, 6.0)
            / polya(12.5, 6.0);
        assert!((r.value - manual).abs() <= 1e-12 * manual);
        // Lower temperature (larger η∞) weights the depth advantage of the
        // first minimum more heavily.
        let colder = probability_ratio(&catalog, 0, 1, 8.0, 0.1).unwrap();
        assert!(colder.value > r.value);
    }

    #[test]
    fn degenerate_determinants_are_rejected() {
        let flat = Minimum { location: vec![0.0], loss: 0.0, eigenvalues: vec![1e-14], determinant: 1e-14 };
        let catalog = CriticalPointCatalog {
            minima: vec![Minimum::new(vec![-1.0], 0.0, vec![2.0]), flat],
            saddles: vec![],
            barriers: vec![],
        };
        let err = probability_ratio(&catalog, 0, 1, 4.0, 0.1).unwrap_err();
        assert!(err.to_string().contains("degenerate"));
    }
}
