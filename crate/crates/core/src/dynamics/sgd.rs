//! Mini-batch SGD on empirical landscapes.

use super::{stream_rng, DynamicsError, Schedule, Trajectory};
use crate::landscape::{EmpiricalLandscape, Landscape};
use rand::Rng;

/// Average of per-sample gradients over a batch drawn uniformly without
/// replacement. Batches are independent across calls.
pub fn minibatch_gradient(
    landscape: &EmpiricalLandscape,
    w: &[f64],
    batch_size: usize,
    rng: &mut impl Rng,
) -> Result<Vec<f64>, DynamicsError> {
    let n = landscape.n_samples();
    if batch_size == 0 || batch_size > n {
        return Err(DynamicsError::BatchTooLarge { batch: batch_size, n });
    }
    let dim = landscape.dim();
    let mut acc = vec![0.0; dim];
    let mut g = vec![0.0; dim];
    for idx in rand::seq::index::sample(rng, n, batch_size) {
        landscape.sample_gradient_into(idx, w, &mut g);
        for k in 0..dim {
            acc[k] += g[k];
        }
    }
    for a in &mut acc {
        *a /= batch_size as f64;
    }
    Ok(acc)
}

/// Runs `w ← w − γ(t)·ĝ(w)` for `n_steps` steps, advancing the clock by
/// the learning rate in force at each step so that schedules mean the same
/// thing as in the diffusion simulator. States are recorded every
/// `record_stride` steps plus the initial and final ones.
pub fn sgd_run(
    landscape: &EmpiricalLandscape,
    schedule: &Schedule,
    w0: &[f64],
    n_steps: usize,
    master_seed: u64,
    stream_id: u64,
    record_stride: usize,
) -> Result<Trajectory, DynamicsError> {
    if n_steps == 0 {
        return Err(DynamicsError::InvalidParameter("n_steps must be at least 1".into()));
    }
    if record_stride == 0 {
        return Err(DynamicsError::InvalidParameter("record_stride must be at least 1".into()));
    }
    if w0.len() != landscape.dim() {
        return Err(DynamicsError::InvalidParameter(format!(
            "initial state has dimension {}, landscape has {}",
            w0.len(),
            landscape.dim()
        )));
    }
    let mut rng = stream_rng(master_seed, stream_id);
    let escape_box = landscape.domain().scaled(2.0);
    let mut trajectory = Trajectory::new(landscape.dim(), schedule.clone(), master_seed, stream_id);
    let mut w = w0.to_vec();
    let mut t = 0.0;
    trajectory.push(0, t, &w);
    for k in 0..n_steps {
        let gamma = schedule.gamma_at(t);
        let batch = schedule.batch_at(t) as usize;
        let g = minibatch_gradient(landscape, &w, batch, &mut rng)?;
        for (wi, gi) in w.iter_mut().zip(&g) {
            *wi -= gamma * gi;
        }
        t += gamma;
        if w.iter().any(|x| !x.is_finite()) || !escape_box.contains(&w) {
            return Err(DynamicsError::Diverged { step: k + 1, time: t, state: w });
        }
        if (k + 1) % record_stride == 0 || k + 1 == n_steps {
            trajectory.push((k + 1) as u64, t, &w);
        }
    }
    Ok(trajectory)
}
