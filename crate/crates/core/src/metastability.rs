//! Escape from a minimum across a saddle: the closed-form expected
//! first-passage time and its Monte Carlo validation.
//!
//! The closed form for leaving minimum w̌ across saddle w* with climb `H`
//! at inverse temperature `η = 2M/(γβ)` is
//!
//! ```text
//! E[τ] = (2π/λ*) · √(|det ∇²L(w*)| / det ∇²L(w̌)) · e^{H·η}
//! ```
//!
//! The Monte Carlo oracle starts paths at w̌ and times the first entry
//! into a small ball around the destination minimum. Paths still outside
//! at `t_max` are counted as censored and excluded from the mean, which
//! turns truncation bias into a visible flag instead of a silent skew.

use crate::dynamics::{sde_drive, stable_dt, DynamicsError, Schedule};
use crate::landscape::{CriticalPointCatalog, IsotropicLandscape, DEGENERACY_TOL};
use crate::stats::{bootstrap_ci, least_squares_line, StatsError};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetastabilityError {
    #[error("invalid escape setup: {0}")]
    Invalid(String),
    #[error("catalog has no barrier entry from minimum {from} to minimum {to}")]
    MissingBarrier { from: usize, to: usize },
    #[error("degenerate curvature data: {0}")]
    DegenerateHessian(String),
    #[error(
        "all {n_paths} trajectories were still in the starting well at \
         t_max = {t_max}; increase t_max or γ/M"
    )]
    AllCensored { n_paths: usize, t_max: f64 },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Closed-form escape-time prediction with the pieces that built it.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KramersPrediction {
    /// The full expectation, `prefactor · e^exponent`.
    pub expected_time: f64,
    /// Barrier height times inverse temperature, `H · 2M/(γβ)`.
    pub exponent: f64,
    /// Temperature-independent factor `(2π/λ*)·√(|det w*| / det w̌)`.
    pub prefactor: f64,
}

/// Expected escape time from minimum `from` toward minimum `to`.
///
/// The exponent is exactly invariant under the joint rescaling
/// `(γ, M) → (cγ, cM)`: only the ratio γ/M enters.
pub fn kramers_time(
    catalog: &CriticalPointCatalog,
    from: usize,
    to: usize,
    gamma: f64,
    batch: f64,
    beta: f64,
) -> Result<KramersPrediction, MetastabilityError> {
    if !(gamma > 0.0) || !(batch >= 1.0) || !(beta > 0.0) {
        return Err(MetastabilityError::Invalid(format!(
            "need γ > 0, M ≥ 1, β > 0; got γ = {gamma}, M = {batch}, β = {beta}"
        )));
    }
    let barrier = catalog
        .barrier(from, to)
        .ok_or(MetastabilityError::MissingBarrier { from, to })?;
    let minimum = &catalog.minima[from];
    let saddle = &catalog.saddles[barrier.saddle];
    if saddle.lambda_star < DEGENERACY_TOL {
        return Err(MetastabilityError::DegenerateHessian(format!(
            "saddle {} has unstable curvature {}",
            barrier.saddle, saddle.lambda_star
        )));
    }
    if minimum.determinant < DEGENERACY_TOL || saddle.determinant_abs < DEGENERACY_TOL {
        return Err(MetastabilityError::DegenerateHessian(format!(
            "Hessian determinants {} (minimum) and {} (saddle) must be nonzero",
            minimum.determinant, saddle.determinant_abs
        )));
    }
    let eta = 2.0 * batch / (gamma * beta);
    let exponent = barrier.height * eta;
    let prefactor =
        2.0 * PI / saddle.lambda_star * (saddle.determinant_abs / minimum.determinant).sqrt();
    Ok(KramersPrediction { expected_time: prefactor * exponent.exp(), exponent, prefactor })
}

/// First-passage experiment: which transition, when a path counts as
/// arrived, and how much simulated time each path gets.
#[derive(Debug, Clone, Serialize)]
pub struct EscapeSpec {
    pub from: usize,
    pub to: usize,
    /// Arrival-ball radius around the destination minimum. `None` picks
    /// 0.1× its distance to the saddle; either way the ball must stay in
    /// the destination half (radius < half that distance).
    pub radius: Option<f64>,
    /// Per-path time budget. `None` picks 20× the closed-form prediction;
    /// an explicit value overrides that guard.
    pub t_max: Option<f64>,
    pub n_paths: usize,
}

impl EscapeSpec {
    pub fn new(from: usize, to: usize, n_paths: usize) -> Self {
        EscapeSpec { from, to, radius: None, t_max: None, n_paths }
    }
}

/// Monte Carlo escape-time estimate next to its closed-form prediction.
#[derive(Debug, Clone, Serialize)]
pub struct EscapeReport {
    pub prediction: KramersPrediction,
    /// Mean first-passage time over uncensored paths.
    pub mc_mean: f64,
    /// 95% percentile-bootstrap interval for the mean.
    pub ci95: (f64, f64),
    /// `mc_mean / prediction.expected_time`.
    pub ratio: f64,
    pub n_paths: usize,
    pub censored: usize,
    /// Set when more than 5% of paths were censored: `mc_mean` then only
    /// bounds the true expectation from below.
    pub lower_bound: bool,
    pub gamma: f64,
    pub batch: f64,
    pub beta: f64,
    pub eta: f64,
    pub radius: f64,
    pub t_max: f64,
    /// First-passage times of the uncensored paths, in path order.
    pub samples: Vec<f64>,
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Samples first-passage times from `spec.from` into the arrival ball
/// around `spec.to` and compares their mean with [`kramers_time`].
///
/// Paths run in parallel, one RNG stream per path index, and the report
/// is a deterministic function of `(spec, seed)` regardless of worker
/// count. The schedule must be constant: the closed form is stated at
/// fixed γ and M.
pub fn mc_escape_time<L>(
    landscape: &L,
    catalog: &CriticalPointCatalog,
    spec: &EscapeSpec,
    schedule: &Schedule,
    dt: f64,
    seed: u64,
) -> Result<EscapeReport, MetastabilityError>
where
    L: IsotropicLandscape + Sync + ?Sized,
{
    if !schedule.is_constant() {
        return Err(MetastabilityError::Invalid(
            "escape-time sampling needs a constant schedule".into(),
        ));
    }
    if spec.n_paths == 0 {
        return Err(MetastabilityError::Invalid("need at least one trajectory".into()));
    }
    let max_dt = stable_dt(catalog);
    if !(dt > 0.0) || !dt.is_finite() || dt > max_dt {
        return Err(MetastabilityError::Invalid(format!(
            "dt = {dt} outside (0, {max_dt}], the stability bound for this landscape"
        )));
    }

    let gamma = schedule.gamma_at(0.0);
    let batch = schedule.batch_at(0.0) as f64;
    let start = &catalog.minima[spec.from];
    let beta = landscape.beta(&start.location);
    let prediction = kramers_time(catalog, spec.from, spec.to, gamma, batch, beta)?;
    let eta = 2.0 * batch / (gamma * beta);

    let barrier = catalog.barrier(spec.from, spec.to).expect("checked by kramers_time");
    let target = &catalog.minima[spec.to];
    let to_saddle = euclidean(&target.location, &catalog.saddles[barrier.saddle].location);
    let radius = spec.radius.unwrap_or(0.1 * to_saddle);
    if !(radius > 0.0) || radius >= 0.5 * to_saddle {
        return Err(MetastabilityError::Invalid(format!(
            "arrival radius {radius} must lie in (0, {}), half the distance \
             from the destination minimum to the saddle",
            0.5 * to_saddle
        )));
    }
    let t_max = spec.t_max.unwrap_or(20.0 * prediction.expected_time);
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(MetastabilityError::Invalid(format!("t_max = {t_max} must be positive")));
    }

    let first_passages: Vec<Option<f64>> = (0..spec.n_paths)
        .into_par_iter()
        .map(|path| {
            let mut hit = None;
            sde_drive(
                landscape,
                schedule,
                &start.location,
                t_max,
                dt,
                seed,
                path as u64,
                |_, t, w| {
                    if euclidean(w, &target.location) <= radius {
                        hit = Some(t);
                        return false;
                    }
                    true
                },
            )
            .map(|()| hit)
        })
        .collect::<Result<_, DynamicsError>>()?;

    let samples: Vec<f64> = first_passages.iter().filter_map(|h| *h).collect();
    let censored = spec.n_paths - samples.len();
    if samples.is_empty() {
        return Err(MetastabilityError::AllCensored { n_paths: spec.n_paths, t_max });
    }
    let mc_mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let ci95 = if samples.len() >= 2 {
        let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
        bootstrap_ci(&samples, mean, 10_000, 0.95, seed ^ 0x9E37_79B9_7F4A_7C15)?
    } else {
        (mc_mean, mc_mean)
    };

    Ok(EscapeReport {
        prediction,
        mc_mean,
        ci95,
        ratio: mc_mean / prediction.expected_time,
        n_paths: spec.n_paths,
        censored,
        lower_bound: censored as f64 > 0.05 * spec.n_paths as f64,
        gamma,
        batch,
        beta,
        eta,
        radius,
        t_max,
        samples,
    })
}

/// One temperature setting of an escape sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub eta: f64,
    pub kramers: f64,
    pub mc_mean: f64,
    pub ratio: f64,
    pub censored: usize,
}

/// Escape times across temperatures, with the fitted exponent.
#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Slope of ln E[τ] against η; should recover the barrier height.
    pub log_slope: Option<f64>,
    pub barrier_height: f64,
}

/// Runs [`mc_escape_time`] once per requested η at batch size 1 (so
/// γ = 2/(ηβ)) and fits the log-time growth against η.
///
/// All rows share the master seed, so path `i` sees the same Brownian
/// increments at every temperature — common random numbers steady the
/// fitted slope without biasing it.
pub fn escape_sweep<L>(
    landscape: &L,
    catalog: &CriticalPointCatalog,
    spec: &EscapeSpec,
    eta_values: &[f64],
    dt: f64,
    seed: u64,
) -> Result<SweepTable, MetastabilityError>
where
    L: IsotropicLandscape + Sync + ?Sized,
{
    let barrier = catalog
        .barrier(spec.from, spec.to)
        .ok_or(MetastabilityError::MissingBarrier { from: spec.from, to: spec.to })?;
    let height = barrier.height;
    if spec.n_paths == 0 {
        return Ok(SweepTable { rows: Vec::new(), log_slope: None, barrier_height: height });
    }
    let beta = landscape.beta(&catalog.minima[spec.from].location);
    let mut rows = Vec::with_capacity(eta_values.len());
    for &eta in eta_values {
        if !(eta > 0.0) {
            return Err(MetastabilityError::Invalid(format!(
                "inverse temperature {eta} must be positive"
            )));
        }
        let schedule = Schedule::constant(2.0 / (eta * beta), 1)?;
        let report = mc_escape_time(landscape, catalog, spec, &schedule, dt, seed)?;
        rows.push(SweepRow {
            eta,
            kramers: report.prediction.expected_time,
            mc_mean: report.mc_mean,
            ratio: report.ratio,
            censored: report.censored,
        });
    }
    let log_slope = if rows.len() >= 2 {
        let etas: Vec<f64> = rows.iter().map(|r| r.eta).collect();
        let logs: Vec<f64> = rows.iter().map(|r| r.mc_mean.ln()).collect();
        Some(least_squares_line(&etas, &logs)?.0)
    } else {
        None
    };
    Ok(SweepTable { rows, log_slope, barrier_height: height })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{
        make_asymmetric_double_well, make_double_well, Barrier, CriticalPointCatalog, Minimum,
        Saddle,
    };
    use crate::stats::lilliefors_exponential;

    #[test]
    fn canonical_double_well_prediction() {
        let (_, catalog) = make_double_well(0.25).unwrap();
        // λ* = 1, determinants 1 (saddle) and 2 (minimum), H·η = 5.
        let p = kramers_time(&catalog, 0, 1, 0.1, 1.0, 1.0).unwrap();
        assert_eq!(p.exponent, 5.0);
        let hand = 2.0 * PI * 0.5f64.sqrt() * 5.0f64.exp();
        assert!((p.expected_time - hand).abs() < 1e-12 * hand);
        assert!((hand - 659.4).abs() < 0.1);
    }

    #[test]
    fn zero_barrier_leaves_only_the_prefactor() {
        let catalog = CriticalPointCatalog::new(
            vec![
                Minimum::new(vec![0.0], 0.0, vec![2.0]),
                Minimum::new(vec![2.0], 0.0, vec![2.0]),
            ],
            vec![Saddle::new(vec![1.0], 0.0, vec![-1.0])],
            vec![Barrier { from: 0, to: 1, saddle: 0, height: 0.0 }],
        )
        .unwrap();
        let p = kramers_time(&catalog, 0, 1, 0.05, 4.0, 1.0).unwrap();
        assert_eq!(p.exponent, 0.0);
        assert_eq!(p.expected_time, p.prefactor);
    }

    #[test]
    fn doubling_the_batch_squares_the_exponential_factor() {
        let (_, catalog) = make_double_well(0.25).unwrap();
        let base = kramers_time(&catalog, 0, 1, 0.1, 1.0, 1.0).unwrap();
        let doubled = kramers_time(&catalog, 0, 1, 0.1, 2.0, 1.0).unwrap();
        let want = base.expected_time * base.exponent.exp();
        assert!((doubled.expected_time - want).abs() < 1e-12 * want);
    }

    #[test]
    fn joint_gamma_batch_scaling_is_bit_identical() {
        let (_, catalog) = make_double_well(0.3).unwrap();
        let a = kramers_time(&catalog, 1, 0, 0.07, 3.0, 1.3).unwrap();
        let b = kramers_time(&catalog, 1, 0, 2.0 * 0.07, 2.0 * 3.0, 1.3).unwrap();
        assert_eq!(a.expected_time.to_bits(), b.expected_time.to_bits());
        assert_eq!(a.exponent.to_bits(), b.exponent.to_bits());
        // Non-dyadic factors are only invariant up to round-off.
        let c = kramers_time(&catalog, 1, 0, 3.0 * 0.07, 9.0, 1.3).unwrap();
        assert!((a.expected_time - c.expected_time).abs() < 1e-12 * a.expected_time);
    }

    #[test]
    fn missing_and_degenerate_catalog_entries_are_rejected() {
        let (_, catalog) = make_double_well(0.25).unwrap();
        assert!(matches!(
            kramers_time(&catalog, 0, 0, 0.1, 1.0, 1.0),
            Err(MetastabilityError::MissingBarrier { from: 0, to: 0 })
        ));
        // The constructor refuses degenerate spectra, so assemble the
        // catalog literally to exercise the guard in kramers_time.
        let degenerate = CriticalPointCatalog {
            minima: vec![
                Minimum {
                    location: vec![0.0],
                    loss: 0.0,
                    eigenvalues: vec![1e-14],
                    determinant: 1e-14,
                },
                Minimum::new(vec![2.0], 0.0, vec![1.0]),
            ],
            saddles: vec![Saddle::new(vec![1.0], 0.5, vec![-1.0])],
            barriers: vec![Barrier { from: 0, to: 1, saddle: 0, height: 0.5 }],
        };
        assert!(matches!(
            kramers_time(&degenerate, 0, 1, 0.1, 1.0, 1.0),
            Err(MetastabilityError::DegenerateHessian(_))
        ));
    }

    #[test]
    fn mc_mean_tracks_the_prediction_at_moderate_eta() {
        let (well, catalog) = make_double_well(0.25).unwrap();
        let schedule = Schedule::constant(0.2, 1).unwrap(); // η = 10
        let spec = EscapeSpec::new(0, 1, 400);
        let report =
            mc_escape_time(&well, &catalog, &spec, &schedule, 0.01, 2024).unwrap();
        assert!(
            report.ratio > 0.5 && report.ratio < 2.0,
            "MC/prediction ratio {} out of band",
            report.ratio
        );
        assert!(report.ci95.0 <= report.mc_mean && report.mc_mean <= report.ci95.1);
        assert!(!report.lower_bound, "censored {} of {}", report.censored, report.n_paths);
        assert_eq!(report.samples.len() + report.censored, report.n_paths);
        assert!((report.eta - 10.0).abs() < 1e-12);
    }

    #[test]
    fn log_mean_gap_between_temperatures_is_the_barrier_times_delta_eta() {
        let (well, catalog) = make_double_well(0.25).unwrap();
        let spec = EscapeSpec::new(0, 1, 300);
        let cold = Schedule::constant(0.1, 1).unwrap(); // η = 20
        let warm = Schedule::constant(0.2, 1).unwrap(); // η = 10
        let t_cold = mc_escape_time(&well, &catalog, &spec, &cold, 0.01, 7).unwrap();
        let t_warm = mc_escape_time(&well, &catalog, &spec, &warm, 0.01, 7).unwrap();
        let gap = t_cold.mc_mean.ln() - t_warm.mc_mean.ln();
        assert!((gap - 2.5).abs() < 0.5, "log escape-time gap {gap}, expected ≈ 2.5");
    }

    #[test]
    fn escape_times_are_roughly_exponential_in_the_cold_regime() {
        let (well, catalog) = make_double_well(0.25).unwrap();
        let schedule = Schedule::constant(0.1, 1).unwrap(); // η = 20
        let spec = EscapeSpec::new(0, 1, 150);
        let report =
            mc_escape_time(&well, &catalog, &spec, &schedule, 0.01, 31).unwrap();
        let (_, _, passes) = lilliefors_exponential(&report.samples).unwrap();
        assert!(passes, "exponentiality rejected at the 1% level");
    }

    #[test]
    fn prefactor_ratio_between_sharp_and_flat_wells() {
        // Equal-depth wells with curvatures 2 (flat, id 0) and 8 (sharp,
        // id 1) share the saddle and hence the barrier, so predicted and
        // sampled escape times differ by the determinant ratio
        // √(2/8) = 1/2 alone.
        let (well, catalog) = make_asymmetric_double_well(2.0, 8.0, 1.0).unwrap();
        let h01 = catalog.barrier(0, 1).unwrap().height;
        let h10 = catalog.barrier(1, 0).unwrap().height;
        assert!((h01 - h10).abs() < 1e-12);
        let eta = 3.0 / h01; // exponent η·H = 3 in both directions
        let schedule = Schedule::constant(2.0 / eta, 1).unwrap();
        // The quintic bridge is much sharper than either well, so the
        // stability rule asks for a finer step than the canonical 0.01.
        let spec_ff = EscapeSpec::new(0, 1, 300);
        let spec_sf = EscapeSpec::new(1, 0, 300);
        let from_flat =
            mc_escape_time(&well, &catalog, &spec_ff, &schedule, 0.004, 99).unwrap();
        let from_sharp =
            mc_escape_time(&well, &catalog, &spec_sf, &schedule, 0.004, 100).unwrap();
        let predicted = from_sharp.prediction.expected_time / from_flat.prediction.expected_time;
        assert!((predicted - 0.5).abs() < 1e-12);
        let sampled = from_sharp.mc_mean / from_flat.mc_mean;
        assert!(
            (sampled - predicted).abs() < 0.15,
            "sampled sharp/flat ratio {sampled} vs predicted {predicted}"
        );
    }

    #[test]
    fn censoring_is_counted_flagged_and_fatal_only_at_100_percent() {
        let (well, catalog) = make_double_well(0.25).unwrap();
        let schedule = Schedule::constant(2.0 / 12.0, 1).unwrap(); // η = 12
        // Mean escape ≈ 89; a budget of 30 censors most paths.
        let mut spec = EscapeSpec::new(0, 1, 60);
        spec.t_max = Some(30.0);
        let report =
            mc_escape_time(&well, &catalog, &spec, &schedule, 0.01, 5).unwrap();
        assert!(report.censored > 0 && report.censored < report.n_paths);
        assert!(report.lower_bound);
        assert!(report.mc_mean < report.prediction.expected_time);

        spec.t_max = Some(0.05); // no path crosses in five steps
        assert!(matches!(
            mc_escape_time(&well, &catalog, &spec, &schedule, 0.01, 5),
            Err(MetastabilityError::AllCensored { n_paths: 60, .. })
        ));
    }

    #[test]
    fn reports_are_deterministic_in_the_seed() {
        let (well, catalog) = make_double_well(0.25).unwrap();
        let schedule = Schedule::constant(0.25, 1).unwrap(); // η = 8
        let spec = EscapeSpec::new(0, 1, 64);
        let a = mc_escape_time(&well, &catalog, &spec, &schedule, 0.01, 11).unwrap();
        let b = mc_escape_time(&well, &catalog, &spec, &schedule, 0.01, 11).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.ci95, b.ci95);
        let c = mc_escape_time(&well, &catalog, &spec, &schedule, 0.01, 12).unwrap();
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn sweep_fits_the_barrier_and_tolerates_an_empty_request() {
        let (well, catalog) = make_double_well(0.25).unwrap();
        let spec = EscapeSpec::new(0, 1, 200);
        let table =
            escape_sweep(&well, &catalog, &spec, &[8.0, 10.0, 12.0], 0.01, 17).unwrap();
        assert_eq!(table.rows.len(), 3);
        for row in &table.rows {
            assert!(row.ratio > 0.4 && row.ratio < 2.5, "η = {}: ratio {}", row.eta, row.ratio);
        }
        let slope = table.log_slope.unwrap();
        assert!(
            (slope - table.barrier_height).abs() < 0.08,
            "fitted exponent slope {slope} vs barrier {}",
            table.barrier_height
        );

        let empty = escape_sweep(
            &well,
            &catalog,
            &EscapeSpec::new(0, 1, 0),
            &[8.0],
            0.01,
            17,
        )
        .unwrap();
        assert!(empty.rows.is_empty());
        assert!(empty.log_slope.is_none());
    }

    #[test]
    fn schedule_and_step_preconditions_are_enforced() {
        let (well, catalog) = make_double_well(0.25).unwrap();
        let spec = EscapeSpec::new(0, 1, 4);
        let varying = Schedule::new(
            crate::dynamics::Profile::PiecewiseConstant {
                times: vec![0.0, 1.0],
                values: vec![0.1, 0.2],
            },
            crate::dynamics::Profile::Constant { value: 1.0 },
        )
        .unwrap();
        assert!(matches!(
            mc_escape_time(&well, &catalog, &spec, &varying, 0.01, 1),
            Err(MetastabilityError::Invalid(_))
        ));
        let constant = Schedule::constant(0.2, 1).unwrap();
        // stable_dt for curvature 2 is 0.05; a coarser step must be refused.
        assert!(matches!(
            mc_escape_time(&well, &catalog, &spec, &constant, 0.06, 1),
            Err(MetastabilityError::Invalid(_))
        ));
        let mut bad_radius = EscapeSpec::new(0, 1, 4);
        bad_radius.radius = Some(0.6); // saddle sits 1.0 away from the target
        assert!(matches!(
            mc_escape_time(&well, &catalog, &bad_radius, &constant, 0.01, 1),
            Err(MetastabilityError::Invalid(_))
        ));
    }
}
