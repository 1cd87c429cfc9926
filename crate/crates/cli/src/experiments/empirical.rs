//! Dataset-backed experiments: gradient-noise verification, regularity
//! checks, and the sharpness-vs-noise toy study.

use std::path::Path;

use rayon::prelude::*;
use sgdlab_core::config::BuiltLandscape;
use sgdlab_core::dynamics::{noise_stats, sgd_run};
use sgdlab_core::export::{float_cell, write_csv, write_json};
use sgdlab_core::landscape::{
    check_assumptions as check_core, AssumptionVerdict, EmpiricalLandscape, Landscape,
};
use sgdlab_core::Schedule;

pub fn verify_noise(
    dir: &Path,
    seed: u64,
    landscape: &EmpiricalLandscape,
    w0: &[f64],
    batch: usize,
    n_draws: usize,
) -> Result<Vec<String>, String> {
    let report =
        noise_stats(landscape, w0, batch, n_draws, seed).map_err(|e| e.to_string())?;
    write_json(&dir.join("noise.json"), &report).map_err(|e| e.to_string())?;

    let row = vec![vec![
        batch.to_string(),
        n_draws.to_string(),
        landscape.n_samples().to_string(),
        landscape.dim().to_string(),
        float_cell(report.mean_error_se_units),
        float_cell(report.covariance_relative_error),
    ]];
    write_csv(
        &dir.join("noise.csv"),
        &["batch", "n_draws", "n_samples", "dim", "mean_error_se_units", "covariance_relative_error"],
        &row,
    )
    .map_err(|e| e.to_string())?;

    let mut warnings = Vec::new();
    if report.mean_error_se_units > 4.0 {
        warnings.push(format!(
            "the batch-gradient mean sits {} standard errors from the exact gradient; \
             that is too far for an unbiased estimator",
            report.mean_error_se_units
        ));
    }
    if let Some(note) = landscape.confinement_warning() {
        warnings.push(note.to_string());
    }
    Ok(warnings)
}

fn verdict_name(v: AssumptionVerdict) -> &'static str {
    match v {
        AssumptionVerdict::Pass => "pass",
        AssumptionVerdict::Fail => "fail",
        AssumptionVerdict::Inconclusive => "inconclusive",
    }
}

pub fn check_assumptions(
    dir: &Path,
    landscape: &BuiltLandscape,
    shells: &[f64],
    grid_resolution: usize,
) -> Result<Vec<String>, String> {
    let report = match landscape {
        BuiltLandscape::Isotropic { landscape, .. } => {
            check_core(landscape.as_ref(), shells, grid_resolution)
        }
        BuiltLandscape::Empirical(l) => check_core(l, shells, grid_resolution),
    };
    write_json(&dir.join("assumptions.json"), &report).map_err(|e| e.to_string())?;

    let rows: Vec<Vec<String>> = (0..report.shells.len())
        .map(|i| {
            vec![
                float_cell(report.shells[i]),
                float_cell(report.shell_min_loss[i]),
                float_cell(report.a2_growth[i]),
                float_cell(report.a2_ratio[i]),
            ]
        })
        .collect();
    write_csv(
        &dir.join("assumptions.csv"),
        &["shell", "min_loss", "a2_growth", "a2_ratio"],
        &rows,
    )
    .map_err(|e| e.to_string())?;

    let mut warnings = Vec::new();
    for (name, verdict) in [
        ("confinement", report.verdict_confinement),
        ("growth", report.verdict_growth),
        ("integrability", report.verdict_integrability),
    ] {
        if verdict != AssumptionVerdict::Pass {
            warnings.push(format!("{name} check did not pass: {}", verdict_name(verdict)));
        }
    }
    Ok(warnings)
}

/// Runs SGD at each (γ, M) pair for several independent replicates and
/// records the exact Hessian Frobenius norm along the way. One epoch is
/// ⌊N/M⌋ steps (at least one); rows land every epoch, including epoch 0.
pub fn sharpness_toy(
    dir: &Path,
    seed: u64,
    landscape: &EmpiricalLandscape,
    w0: &[f64],
    pairs: &[(f64, u64)],
    n_seeds: usize,
    n_epochs: usize,
) -> Result<Vec<String>, String> {
    struct Cell {
        gamma: f64,
        batch: u64,
        replicate: usize,
        /// (epoch, step, time, loss, frobenius) per recorded row.
        rows: Vec<(usize, u64, f64, f64, f64)>,
    }

    let n = landscape.n_samples();
    let cells: Vec<(usize, usize)> = (0..pairs.len())
        .flat_map(|pi| (0..n_seeds).map(move |si| (pi, si)))
        .collect();

    let results: Vec<Cell> = cells
        .par_iter()
        .map(|&(pi, si)| -> Result<Cell, String> {
            let (gamma, batch) = pairs[pi];
            let steps_per_epoch = (n / batch as usize).max(1);
            let n_steps = n_epochs * steps_per_epoch;
            let schedule = Schedule::constant(gamma, batch).map_err(|e| e.to_string())?;
            let stream = (pi * n_seeds + si) as u64;
            let trajectory =
                sgd_run(landscape, &schedule, w0, n_steps, seed, stream, steps_per_epoch)
                    .map_err(|e| e.to_string())?;
            let mut rows = Vec::with_capacity(trajectory.len());
            for (k, (t, state)) in trajectory.iter().enumerate() {
                let step = trajectory.steps()[k];
                let epoch = (step as usize) / steps_per_epoch;
                let loss = landscape.value(state);
                let frobenius = landscape.hessian(state).norm();
                rows.push((epoch, step, t, loss, frobenius));
            }
            Ok(Cell { gamma, batch, replicate: si, rows })
        })
        .collect::<Result<_, _>>()?;

    let mut csv_rows = Vec::new();
    for cell in &results {
        for &(epoch, step, t, loss, frobenius) in &cell.rows {
            csv_rows.push(vec![
                float_cell(cell.gamma),
                cell.batch.to_string(),
                cell.replicate.to_string(),
                epoch.to_string(),
                step.to_string(),
                float_cell(t),
                float_cell(loss),
                float_cell(frobenius),
            ]);
        }
    }
    write_csv(
        &dir.join("sharpness.csv"),
        &["gamma", "batch", "replicate", "epoch", "step", "time", "train_loss", "hessian_frobenius"],
        &csv_rows,
    )
    .map_err(|e| e.to_string())?;

    let mut warnings = Vec::new();
    if let Some(note) = landscape.confinement_warning() {
        warnings.push(note.to_string());
    }
    for cell in &results {
        if cell.rows.iter().any(|(_, _, _, loss, _)| !loss.is_finite()) {
            warnings.push(format!(
                "γ = {}, M = {}, replicate {} diverged",
                cell.gamma, cell.batch, cell.replicate
            ));
        }
    }
    Ok(warnings)
}
