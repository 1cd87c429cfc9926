//! Trajectory experiments: diffusion paths and mini-batch SGD runs.
//!
//! Both emit one `trajectories.csv` with a row per recorded step and a
//! `loss` column alongside the coordinates, so landscape traversal can be
//! plotted without re-evaluating anything.

use std::path::Path;

use rayon::prelude::*;
use sgdlab_core::dynamics::{sde_run, sgd_run, Trajectory};
use sgdlab_core::export::{float_cell, write_csv};
use sgdlab_core::landscape::{EmpiricalLandscape, IsotropicLandscape, Landscape};
use sgdlab_core::Schedule;

/// Shared CSV emission: `path, step, time, loss, w0..w{d−1}`.
fn write_trajectories(
    dir: &Path,
    landscape: &(impl Landscape + ?Sized),
    trajectories: &[Trajectory],
) -> Result<Vec<String>, String> {
    let dim = landscape.dim();
    let mut header: Vec<String> = vec!["path".into(), "step".into(), "time".into(), "loss".into()];
    for a in 0..dim {
        header.push(format!("w{a}"));
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();

    let mut warnings = Vec::new();
    let mut rows = Vec::new();
    for (i, trajectory) in trajectories.iter().enumerate() {
        for (k, (t, state)) in trajectory.iter().enumerate() {
            let mut row = vec![
                i.to_string(),
                trajectory.steps()[k].to_string(),
                float_cell(t),
                float_cell(landscape.value(state)),
            ];
            row.extend(state.iter().map(|x| float_cell(*x)));
            rows.push(row);
        }
        if trajectory.last_state().iter().any(|x| !x.is_finite()) {
            warnings.push(format!(
                "path {i} left the finite range; the step size is likely above the \
                 stability bound"
            ));
        }
    }
    write_csv(&dir.join("trajectories.csv"), &header_refs, &rows).map_err(|e| e.to_string())?;
    Ok(warnings)
}

#[allow(clippy::too_many_arguments)]
pub fn sde(
    dir: &Path,
    seed: u64,
    landscape: &(dyn IsotropicLandscape + Send + Sync),
    schedule: &Schedule,
    w0: &[f64],
    t_end: f64,
    dt: f64,
    n_paths: usize,
    record_stride: usize,
) -> Result<Vec<String>, String> {
    let trajectories: Vec<Trajectory> = (0..n_paths)
        .into_par_iter()
        .map(|i| sde_run(landscape, schedule, w0, t_end, dt, seed, i as u64, record_stride))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    write_trajectories(dir, landscape, &trajectories)
}

#[allow(clippy::too_many_arguments)]
pub fn sgd(
    dir: &Path,
    seed: u64,
    landscape: &EmpiricalLandscape,
    schedule: &Schedule,
    w0: &[f64],
    n_steps: usize,
    n_paths: usize,
    record_stride: usize,
) -> Result<Vec<String>, String> {
    let trajectories: Vec<Trajectory> = (0..n_paths)
        .into_par_iter()
        .map(|i| sgd_run(landscape, schedule, w0, n_steps, seed, i as u64, record_stride))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut warnings = write_trajectories(dir, landscape, &trajectories)?;
    if let Some(note) = landscape.confinement_warning() {
        warnings.push(note.to_string());
    }
    Ok(warnings)
}
