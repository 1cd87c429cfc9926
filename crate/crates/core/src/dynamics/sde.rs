//! Euler-Maruyama integration of the diffusion approximation
//! `dW = −∇L(W) dt + √(γ(t) β(W)/M(t)) dB`.

use super::{stream_rng, DynamicsError, Schedule, Trajectory};
use crate::landscape::{CriticalPointCatalog, IsotropicLandscape};
use rand::Rng;
use rand_distr::StandardNormal;

/// Default recording stride for plain runs; first-passage drivers observe
/// every step instead of recording.
pub const DEFAULT_RECORD_STRIDE: usize = 100;

/// Largest stable/accurate step for a landscape with the given catalog:
/// one tenth of the fastest curvature time scale.
pub fn stable_dt(catalog: &CriticalPointCatalog) -> f64 {
    0.1 / catalog.max_curvature()
}

/// Core integrator. The observer sees `(step, t, state)` for every step
/// including the initial one and may return `false` to stop early (used by
/// first-passage experiments); the final state is observed before exit.
///
/// Observer calls happen in deterministic order; the noise sequence is a
/// pure function of `(master_seed, stream_id)`.
pub fn sde_drive<L, F>(
    landscape: &L,
    schedule: &Schedule,
    w0: &[f64],
    t_end: f64,
    dt: f64,
    master_seed: u64,
    stream_id: u64,
    mut observer: F,
) -> Result<(), DynamicsError>
where
    L: IsotropicLandscape + ?Sized,
    F: FnMut(usize, f64, &[f64]) -> bool,
{
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(DynamicsError::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if t_end < dt {
        return Err(DynamicsError::InvalidParameter(format!(
            "t_end = {t_end} is shorter than one step dt = {dt}"
        )));
    }
    if w0.len() != landscape.dim() {
        return Err(DynamicsError::InvalidParameter(format!(
            "initial state has dimension {}, landscape has {}",
            w0.len(),
            landscape.dim()
        )));
    }
    let dim = landscape.dim();
    let n_steps = (t_end / dt).ceil() as usize;
    let sqrt_dt = dt.sqrt();
    let escape_box = landscape.domain().scaled(2.0);
    let mut rng = stream_rng(master_seed, stream_id);
    let mut w = w0.to_vec();
    let mut grad = vec![0.0; dim];

    for k in 0..n_steps {
        let t = k as f64 * dt;
        if !observer(k, t, &w) {
            return Ok(());
        }
        let gamma = schedule.gamma_at(t);
        let m = schedule.batch_at(t) as f64;
        let amp = (gamma * landscape.beta(&w) / m).sqrt() * sqrt_dt;
        landscape.gradient_into(&w, &mut grad);
        for i in 0..dim {
            let xi: f64 = rng.sample(StandardNormal);
            w[i] += -grad[i] * dt + amp * xi;
        }
        if w.iter().any(|x| !x.is_finite()) || !escape_box.contains(&w) {
            return Err(DynamicsError::Diverged { step: k + 1, time: t + dt, state: w });
        }
    }
    observer(n_steps, n_steps as f64 * dt, &w);
    Ok(())
}

/// Integrates to `t_end` and records every `record_stride`-th state (plus
/// the first and last).
pub fn sde_run<L>(
    landscape: &L,
    schedule: &Schedule,
    w0: &[f64],
    t_end: f64,
    dt: f64,
    master_seed: u64,
    stream_id: u64,
    record_stride: usize,
) -> Result<Trajectory, DynamicsError>
where
    L: IsotropicLandscape + ?Sized,
{
    if record_stride == 0 {
        return Err(DynamicsError::InvalidParameter("record_stride must be at least 1".into()));
    }
    let n_steps = (t_end / dt).ceil() as usize;
    let mut trajectory = Trajectory::new(landscape.dim(), schedule.clone(), master_seed, stream_id);
    sde_drive(landscape, schedule, w0, t_end, dt, master_seed, stream_id, |k, t, w| {
        if k % record_stride == 0 || k == n_steps {
            trajectory.push(k as u64, t, w);
        }
        true
    })?;
    Ok(trajectory)
}
