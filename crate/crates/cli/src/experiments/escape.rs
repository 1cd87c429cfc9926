//! Escape-time experiments: Monte-Carlo first-passage sampling against the
//! closed-form prediction, at one temperature or swept across several.

use std::path::Path;

use sgdlab_core::export::{float_cell, write_csv};
use sgdlab_core::landscape::{CriticalPointCatalog, IsotropicLandscape};
use sgdlab_core::metastability::{escape_sweep as sweep_core, mc_escape_time};
use sgdlab_core::{EscapeSpec, Schedule};

pub fn escape_time(
    dir: &Path,
    seed: u64,
    landscape: &(dyn IsotropicLandscape + Send + Sync),
    catalog: &CriticalPointCatalog,
    spec: &EscapeSpec,
    schedule: &Schedule,
    dt: f64,
) -> Result<Vec<String>, String> {
    let report = mc_escape_time(landscape, catalog, spec, schedule, dt, seed)
        .map_err(|e| e.to_string())?;

    let sample_rows: Vec<Vec<String>> = report
        .samples
        .iter()
        .enumerate()
        .map(|(i, t)| vec![i.to_string(), float_cell(*t)])
        .collect();
    write_csv(&dir.join("samples.csv"), &["sample", "time"], &sample_rows)
        .map_err(|e| e.to_string())?;

    let summary_row = vec![vec![
        spec.from.to_string(),
        spec.to.to_string(),
        float_cell(report.gamma),
        float_cell(report.batch),
        float_cell(report.beta),
        float_cell(report.eta),
        float_cell(report.prediction.expected_time),
        float_cell(report.prediction.exponent),
        float_cell(report.prediction.prefactor),
        float_cell(report.mc_mean),
        float_cell(report.ci95.0),
        float_cell(report.ci95.1),
        float_cell(report.ratio),
        report.n_paths.to_string(),
        report.censored.to_string(),
        report.lower_bound.to_string(),
        float_cell(report.radius),
        float_cell(report.t_max),
    ]];
    write_csv(
        &dir.join("summary.csv"),
        &[
            "from",
            "to",
            "gamma",
            "batch",
            "beta",
            "eta",
            "predicted_time",
            "exponent",
            "prefactor",
            "mc_mean",
            "ci_lo",
            "ci_hi",
            "ratio",
            "n_paths",
            "censored",
            "lower_bound",
            "radius",
            "t_max",
        ],
        &summary_row,
    )
    .map_err(|e| e.to_string())?;

    let mut warnings = Vec::new();
    if report.lower_bound {
        warnings.push(format!(
            "{} of {} paths were censored at t_max = {}; the Monte-Carlo mean only bounds \
             the expectation from below",
            report.censored, report.n_paths, report.t_max
        ));
    } else if report.censored > 0 {
        warnings.push(format!(
            "{} of {} paths were censored at t_max = {}",
            report.censored, report.n_paths, report.t_max
        ));
    }
    Ok(warnings)
}

pub fn escape_sweep(
    dir: &Path,
    seed: u64,
    landscape: &(dyn IsotropicLandscape + Send + Sync),
    catalog: &CriticalPointCatalog,
    spec: &EscapeSpec,
    eta_values: &[f64],
    dt: f64,
) -> Result<Vec<String>, String> {
    let table = sweep_core(landscape, catalog, spec, eta_values, dt, seed)
        .map_err(|e| e.to_string())?;

    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            vec![
                float_cell(r.eta),
                float_cell(r.kramers),
                float_cell(r.mc_mean),
                float_cell(r.ratio),
                r.censored.to_string(),
            ]
        })
        .collect();
    write_csv(&dir.join("sweep.csv"), &["eta", "kramers", "mc_mean", "ratio", "censored"], &rows)
        .map_err(|e| e.to_string())?;

    let summary_row = vec![vec![
        float_cell(table.barrier_height),
        table.log_slope.map(float_cell).unwrap_or_default(),
        spec.from.to_string(),
        spec.to.to_string(),
        spec.n_paths.to_string(),
        float_cell(dt),
    ]];
    write_csv(
        &dir.join("summary.csv"),
        &["barrier_height", "log_slope", "from", "to", "n_paths", "dt"],
        &summary_row,
    )
    .map_err(|e| e.to_string())?;

    let mut warnings = Vec::new();
    if table.log_slope.is_none() {
        warnings.push("fewer than two usable rows; no log-time slope was fitted".into());
    }
    let censored_total: usize = table.rows.iter().map(|r| r.censored).sum();
    if censored_total > 0 {
        warnings.push(format!(
            "{censored_total} paths were censored across the sweep; high-η means are \
             biased low"
        ));
    }
    Ok(warnings)
}
