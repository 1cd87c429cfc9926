//! Recorded simulation paths.

use super::Schedule;
use serde::{Deserialize, Serialize};

/// A recorded path: one state per recorded step, plus enough provenance
/// (schedule snapshot, seed, stream) to regenerate it.
///
/// Step indices increase strictly. Times are the simulation clock — the
/// SDE's `t`, or the accumulated learning rate for SGD — and increase
/// strictly except in the degenerate zero-learning-rate case, where the
/// clock freezes while the step counter still advances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    steps: Vec<u64>,
    times: Vec<f64>,
    /// Row-major `len × dim` state storage.
    states: Vec<f64>,
    dim: usize,
    schedule: Schedule,
    master_seed: u64,
    stream_id: u64,
}

impl Trajectory {
    pub(crate) fn new(dim: usize, schedule: Schedule, master_seed: u64, stream_id: u64) -> Self {
        Trajectory {
            steps: Vec::new(),
            times: Vec::new(),
            states: Vec::new(),
            dim,
            schedule,
            master_seed,
            stream_id,
        }
    }

    pub(crate) fn push(&mut self, step: u64, t: f64, state: &[f64]) {
        debug_assert_eq!(state.len(), self.dim);
        debug_assert!(self.steps.last().map_or(true, |last| step > *last));
        debug_assert!(self.times.last().map_or(true, |last| t >= *last));
        self.steps.push(step);
        self.times.push(t);
        self.states.extend_from_slice(state);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn steps(&self) -> &[u64] {
        &self.steps
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn last_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Iterator over `(t, state)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.times.iter().enumerate().map(|(i, t)| (*t, self.state(i)))
    }
}
