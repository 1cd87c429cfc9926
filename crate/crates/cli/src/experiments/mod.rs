//! Experiment execution: one runner per kind, all writing into a prepared
//! run directory through the core CSV/JSON writers.
//!
//! Concurrency lives inside each runner (independent paths or parameter
//! cells fan out over the worker pool); files are always written
//! sequentially afterwards, in a fixed order, so a rerun with the same
//! config and seed reproduces every output byte.

use std::path::Path;

use crate::plan::Plan;

mod density;
mod empirical;
mod escape;
mod simulate;
mod stationary;

/// Runs a validated plan. Returns the warnings to record in the manifest;
/// an error means the run failed mid-way (exit code 3) with whatever files
/// were already written left in place.
pub fn execute(plan: Plan, seed: u64, dir: &Path) -> Result<Vec<String>, String> {
    match plan {
        Plan::SimulateSde { landscape, schedule, w0, t_end, dt, n_paths, record_stride } => {
            simulate::sde(dir, seed, &*landscape, &schedule, &w0, t_end, dt, n_paths, record_stride)
        }
        Plan::SimulateSgd { landscape, schedule, w0, n_steps, n_paths, record_stride } => {
            simulate::sgd(dir, seed, &landscape, &schedule, &w0, n_steps, n_paths, record_stride)
        }
        Plan::FokkerPlanck { landscape, schedule, grid, w0, t_end, dt, eta_ref, fit_window } => {
            density::fokker_planck(
                dir, &*landscape, &schedule, &grid, &w0, t_end, dt, eta_ref, fit_window,
            )
        }
        Plan::EscapeTime { landscape, catalog, schedule, spec, dt } => {
            escape::escape_time(dir, seed, &*landscape, &catalog, &spec, &schedule, dt)
        }
        Plan::EscapeSweep { landscape, catalog, spec, eta_values, dt } => {
            escape::escape_sweep(dir, seed, &*landscape, &catalog, &spec, &eta_values, dt)
        }
        Plan::StationaryProb { landscape, catalog, eta_inf, epsilon, minimum } => {
            stationary::probabilities(dir, &*landscape, &catalog, eta_inf, epsilon, minimum)
        }
        Plan::OccupationRatio {
            landscape,
            catalog,
            from,
            to,
            eta_inf,
            epsilon,
            t_burn,
            t_total,
            dt,
        } => stationary::occupation(
            dir, seed, &*landscape, &catalog, from, to, eta_inf, epsilon, t_burn, t_total, dt,
        ),
        Plan::AppendixH { example, m_over_gamma } => {
            stationary::appendix_h(dir, example, &m_over_gamma)
        }
        Plan::VerifyNoise { landscape, w0, batch, n_draws } => {
            empirical::verify_noise(dir, seed, &landscape, &w0, batch, n_draws)
        }
        Plan::CheckAssumptions { landscape, shells, grid_resolution } => {
            empirical::check_assumptions(dir, &landscape, &shells, grid_resolution)
        }
        Plan::SharpnessToy { landscape, w0, pairs, n_seeds, n_epochs } => {
            empirical::sharpness_toy(dir, seed, &landscape, &w0, &pairs, n_seeds, n_epochs)
        }
    }
}
