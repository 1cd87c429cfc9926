//! Mini-batch SGD and its diffusion approximation.
//!
//! Two simulators share one vocabulary of schedules, seeds and
//! trajectories:
//!
//! * [`sgd_run`] iterates `w ← w − γ·ĝ(w)` on an empirical landscape,
//!   where `ĝ` averages per-sample gradients over a freshly drawn batch.
//! * [`sde_run`] integrates the Euler-Maruyama discretization
//!   `w ← w − ∇L dt + √(γ β(w)/M)·√dt·ξ` on an analytic landscape.
//!
//! SGD steps are placed on the same time axis as the SDE by advancing
//! `t` by the learning rate in force at each step, so a schedule `γ(t)`,
//! `M(t)` means the same thing to both simulators.
//!
//! Every stochastic routine takes a `(master_seed, stream_id)` pair and
//! derives an independent counter-based RNG stream from it; results are
//! bit-identical no matter how many workers run concurrently.

mod noise;
mod rng;
mod schedule;
mod sde;
mod sgd;
mod trajectory;

pub use noise::{noise_stats, NoiseStatsReport};
pub use rng::stream_rng;
pub use schedule::{Profile, Schedule};
pub use sde::{sde_drive, sde_run, stable_dt, DEFAULT_RECORD_STRIDE};
pub use sgd::{minibatch_gradient, sgd_run};
pub use trajectory::Trajectory;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DynamicsError {
    /// The state left the enlarged domain box (twice the landscape's box)
    /// or became non-finite.
    #[error("trajectory diverged at step {step} (t = {time:.6}): state {state:?}")]
    Diverged { step: usize, time: f64, state: Vec<f64> },

    #[error("batch size {batch} exceeds dataset size {n}")]
    BatchTooLarge { batch: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
