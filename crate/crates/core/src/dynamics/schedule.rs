//! Learning-rate and batch-size schedules.
//!
//! Both knobs are functions of simulation time with a declared limiting
//! value, so the inverse temperature `η(t) = 2M(t)/(γ(t)β)` and its limit
//! `η∞ = 2M∞/(γ∞β)` are always well defined.

use super::DynamicsError;
use serde::{Deserialize, Serialize};

/// A scalar control signal over time.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Constant { value: f64 },
    /// `values[i]` holds on `[times[i], times[i+1])`; `times[0]` must be 0
    /// and the last value holds forever.
    PiecewiseConstant { times: Vec<f64>, values: Vec<f64> },
    /// `limit + (initial − limit)·e^{−rate·t}`.
    ExpDecayToLimit { initial: f64, limit: f64, rate: f64 },
}

impl Profile {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            Profile::Constant { value } => *value,
            Profile::PiecewiseConstant { times, values } => {
                let idx = times.partition_point(|s| *s <= t).saturating_sub(1);
                values[idx]
            }
            Profile::ExpDecayToLimit { initial, limit, rate } => {
                limit + (initial - limit) * (-rate * t).exp()
            }
        }
    }

    /// Declared limiting value as `t → ∞`.
    pub fn limit(&self) -> f64 {
        match self {
            Profile::Constant { value } => *value,
            Profile::PiecewiseConstant { values, .. } => *values.last().unwrap(),
            Profile::ExpDecayToLimit { limit, .. } => *limit,
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Profile::Constant { .. } => true,
            Profile::PiecewiseConstant { values, .. } => {
                values.iter().all(|v| v == &values[0])
            }
            Profile::ExpDecayToLimit { initial, limit, .. } => initial == limit,
        }
    }

    fn validate(&self, name: &str, min_allowed: f64) -> Result<(), DynamicsError> {
        let check = |v: f64, what: &str| {
            if !(v >= min_allowed) || !v.is_finite() {
                return Err(DynamicsError::InvalidParameter(format!(
                    "{name}: {what} must be at least {min_allowed}, got {v}"
                )));
            }
            Ok(())
        };
        match self {
            Profile::Constant { value } => check(*value, "value"),
            Profile::PiecewiseConstant { times, values } => {
                if times.len() != values.len() || times.is_empty() {
                    return Err(DynamicsError::InvalidParameter(format!(
                        "{name}: times and values must be non-empty and equally long"
                    )));
                }
                if times[0] != 0.0 {
                    return Err(DynamicsError::InvalidParameter(format!(
                        "{name}: first breakpoint must be t = 0"
                    )));
                }
                if !times.windows(2).all(|p| p[1] > p[0]) {
                    return Err(DynamicsError::InvalidParameter(format!(
                        "{name}: breakpoints must be strictly increasing"
                    )));
                }
                values.iter().try_for_each(|v| check(*v, "value"))
            }
            Profile::ExpDecayToLimit { initial, limit, rate } => {
                check(*initial, "initial")?;
                check(*limit, "limit")?;
                if !(*rate > 0.0) {
                    return Err(DynamicsError::InvalidParameter(format!(
                        "{name}: decay rate must be positive, got {rate}"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Learning rate γ(t) and batch size M(t) with declared limits.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Schedule {
    gamma: Profile,
    batch: Profile,
}

impl Schedule {
    /// Zero learning rate is allowed (it freezes the iterate — useful as a
    /// degenerate control); negative rates and batches below 1 are not.
    pub fn new(gamma: Profile, batch: Profile) -> Result<Self, DynamicsError> {
        gamma.validate("schedule.gamma", 0.0)?;
        batch.validate("schedule.batch", 1.0)?;
        Ok(Schedule { gamma, batch })
    }

    /// Constant γ and M, the Theorem-style setting.
    pub fn constant(gamma: f64, batch: u64) -> Result<Self, DynamicsError> {
        Schedule::new(
            Profile::Constant { value: gamma },
            Profile::Constant { value: batch as f64 },
        )
    }

    pub fn gamma_at(&self, t: f64) -> f64 {
        self.gamma.at(t)
    }

    /// Batch sizes are integers; profiles are rounded (and floored at 1).
    pub fn batch_at(&self, t: f64) -> u64 {
        (self.batch.at(t).round() as i64).max(1) as u64
    }

    /// Inverse temperature `2M(t)/(γ(t)β)` at time t for a given constant β.
    pub fn eta_at(&self, t: f64, beta: f64) -> f64 {
        2.0 * self.batch.at(t) / (self.gamma.at(t) * beta)
    }

    /// Limiting inverse temperature `2M∞/(γ∞β)`.
    pub fn eta_inf(&self, beta: f64) -> f64 {
        2.0 * self.batch.limit() / (self.gamma.limit() * beta)
    }

    pub fn gamma_limit(&self) -> f64 {
        self.gamma.limit()
    }

    pub fn batch_limit(&self) -> u64 {
        (self.batch.limit().round() as i64).max(1) as u64
    }

    /// True when both controls are constant in time (required by the
    /// escape-time theory, which is stated at fixed γ and M).
    pub fn is_constant(&self) -> bool {
        self.gamma.is_constant() && self.batch.is_constant()
    }

    pub fn gamma_profile(&self) -> &Profile {
        &self.gamma
    }

    pub fn batch_profile(&self) -> &Profile {
        &self.batch
    }
}
