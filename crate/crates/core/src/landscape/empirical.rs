//! Dataset-backed regression losses with exact per-sample structure.
//!
//! Two families over a synthetic dataset with standard-normal covariates:
//!
//! * `Linear` — squared error `½(wᵀx − y)²` with targets `y = w₀ᵀx + ε`,
//!   `ε ~ N(0,1)`. The per-sample gradient covariance has the closed form
//!   `(1 + ‖w−w₀‖²)I + (w−w₀)(w−w₀)ᵀ`, which in one dimension collapses to
//!   the scalar `2(w−w₀)² + 1`.
//! * `Logistic` — cross entropy with Bernoulli labels drawn from the
//!   sigmoid of `w₀ᵀx`, plus a ridge term `½·l2·‖w‖²`. Without the ridge
//!   the loss is not confining; that configuration is permitted but
//!   flagged.
//!
//! The ridge contribution is folded into every per-sample loss/gradient so
//! that the full-data gradient is *exactly* the mean of the per-sample
//! gradients — mini-batch sampling stays unbiased by construction.
//!
//! `EmpiricalLandscape` deliberately implements only [`Landscape`], never
//! [`IsotropicLandscape`](super::IsotropicLandscape): its gradient noise is
//! not isotropic in general, so the diffusion layers reject it at compile
//! time while assumption checks and finite-difference oracles still work.

use super::{DomainBox, Landscape, LandscapeError};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmpiricalKind {
    Linear,
    Logistic,
}

#[derive(Debug, Clone)]
pub struct EmpiricalLandscape {
    kind: EmpiricalKind,
    /// Covariates, row-major `n × dim`.
    x: Vec<f64>,
    /// Targets (continuous for linear, 0/1 for logistic).
    y: Vec<f64>,
    n: usize,
    dim: usize,
    l2: f64,
    true_weights: Vec<f64>,
    domain: DomainBox,
    warning: Option<String>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl EmpiricalLandscape {
    pub fn kind(&self) -> EmpiricalKind {
        self.kind
    }

    pub fn n_samples(&self) -> usize {
        self.n
    }

    pub fn l2_penalty(&self) -> f64 {
        self.l2
    }

    pub fn true_weights(&self) -> &[f64] {
        &self.true_weights
    }

    /// Set when the configuration violates a standing assumption
    /// (logistic without a ridge term is not confining).
    pub fn confinement_warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    fn covariate(&self, idx: usize) -> &[f64] {
        &self.x[idx * self.dim..(idx + 1) * self.dim]
    }

    fn dot(&self, idx: usize, w: &[f64]) -> f64 {
        self.covariate(idx).iter().zip(w).map(|(a, b)| a * b).sum()
    }

    /// Loss of one sample, ridge term included.
    pub fn sample_loss(&self, idx: usize, w: &[f64]) -> f64 {
        let z = self.dot(idx, w);
        let ridge = 0.5 * self.l2 * w.iter().map(|v| v * v).sum::<f64>();
        match self.kind {
            EmpiricalKind::Linear => {
                let r = z - self.y[idx];
                0.5 * r * r + ridge
            }
            EmpiricalKind::Logistic => log1p_exp(z) - self.y[idx] * z + ridge,
        }
    }

    /// Gradient of one sample's loss, ridge term included. The mean of
    /// these over the full dataset equals [`Landscape::gradient`] exactly.
    pub fn sample_gradient_into(&self, idx: usize, w: &[f64], out: &mut [f64]) {
        let z = self.dot(idx, w);
        let factor = match self.kind {
            EmpiricalKind::Linear => z - self.y[idx],
            EmpiricalKind::Logistic => sigmoid(z) - self.y[idx],
        };
        let xs = self.covariate(idx);
        for k in 0..self.dim {
            out[k] = factor * xs[k] + self.l2 * w[k];
        }
    }

    /// Population covariance of the single-sample gradient (linear kind
    /// only; the logistic family has no such closed form).
    pub fn population_gradient_covariance(&self, w: &[f64]) -> Option<DMatrix<f64>> {
        match self.kind {
            EmpiricalKind::Linear => {
                let delta: Vec<f64> =
                    w.iter().zip(&self.true_weights).map(|(a, b)| a - b).collect();
                let d2: f64 = delta.iter().map(|v| v * v).sum();
                let mut cov = DMatrix::from_diagonal_element(self.dim, self.dim, 1.0 + d2);
                for i in 0..self.dim {
                    for j in 0..self.dim {
                        cov[(i, j)] += delta[i] * delta[j];
                    }
                }
                Some(cov)
            }
            EmpiricalKind::Logistic => None,
        }
    }

    /// Scalar population variance `2(w−w₀)² + 1` of the one-dimensional
    /// linear family; `None` otherwise.
    pub fn population_sigma_sq(&self, w: &[f64]) -> Option<f64> {
        if self.dim != 1 {
            return None;
        }
        match self.kind {
            EmpiricalKind::Linear => {
                let delta = w[0] - self.true_weights[0];
                Some(2.0 * delta * delta + 1.0)
            }
            EmpiricalKind::Logistic => None,
        }
    }
}

impl Landscape for EmpiricalLandscape {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, w: &[f64]) -> f64 {
        let mut acc = 0.0;
        for idx in 0..self.n {
            let z = self.dot(idx, w);
            acc += match self.kind {
                EmpiricalKind::Linear => {
                    let r = z - self.y[idx];
                    0.5 * r * r
                }
                EmpiricalKind::Logistic => log1p_exp(z) - self.y[idx] * z,
            };
        }
        acc / self.n as f64 + 0.5 * self.l2 * w.iter().map(|v| v * v).sum::<f64>()
    }

    fn gradient_into(&self, w: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for idx in 0..self.n {
            let z = self.dot(idx, w);
            let factor = match self.kind {
                EmpiricalKind::Linear => z - self.y[idx],
                EmpiricalKind::Logistic => sigmoid(z) - self.y[idx],
            };
            let xs = self.covariate(idx);
            for k in 0..self.dim {
                out[k] += factor * xs[k];
            }
        }
        for k in 0..self.dim {
            out[k] = out[k] / self.n as f64 + self.l2 * w[k];
        }
    }

    fn hessian(&self, w: &[f64]) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.dim, self.dim);
        for idx in 0..self.n {
            let weight = match self.kind {
                EmpiricalKind::Linear => 1.0,
                EmpiricalKind::Logistic => {
                    let s = sigmoid(self.dot(idx, w));
                    s * (1.0 - s)
                }
            };
            let xs = self.covariate(idx);
            for i in 0..self.dim {
                for j in 0..self.dim {
                    h[(i, j)] += weight * xs[i] * xs[j];
                }
            }
        }
        h /= self.n as f64;
        for i in 0..self.dim {
            h[(i, i)] += self.l2;
        }
        h
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }
}

/// Generates the synthetic dataset and wraps it as a landscape.
/// Deterministic in `seed`.
pub fn make_empirical_regression(
    kind: EmpiricalKind,
    n_samples: usize,
    true_weights: &[f64],
    l2_penalty: f64,
    seed: u64,
) -> Result<EmpiricalLandscape, LandscapeError> {
    if n_samples == 0 {
        return Err(LandscapeError::Invalid("n_samples must be at least 1".into()));
    }
    let dim = true_weights.len();
    if dim == 0 {
        return Err(LandscapeError::Invalid("true_weights must be non-empty".into()));
    }
    if !(l2_penalty >= 0.0) {
        return Err(LandscapeError::Invalid(format!(
            "l2_penalty must be nonnegative, got {l2_penalty}"
        )));
    }
    let warning = match kind {
        EmpiricalKind::Logistic if l2_penalty == 0.0 => Some(
            "logistic loss without a ridge term is not confining; \
             stationary-density results do not apply"
                .to_string(),
        ),
        _ => None,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n_samples * dim);
    let mut y = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let start = x.len();
        for _ in 0..dim {
            x.push(rng.sample::<f64, _>(StandardNormal));
        }
        let z: f64 = x[start..].iter().zip(true_weights).map(|(a, b)| a * b).sum();
        match kind {
            EmpiricalKind::Linear => {
                let eps: f64 = rng.sample(StandardNormal);
                y.push(z + eps);
            }
            EmpiricalKind::Logistic => {
                let label = if rng.gen::<f64>() < sigmoid(z) { 1.0 } else { 0.0 };
                y.push(label);
            }
        }
    }

    let lo: Vec<f64> = true_weights.iter().map(|c| c - 12.0).collect();
    let hi: Vec<f64> = true_weights.iter().map(|c| c + 12.0).collect();
    Ok(EmpiricalLandscape {
        kind,
        x,
        y,
        n: n_samples,
        dim,
        l2: l2_penalty,
        true_weights: true_weights.to_vec(),
        domain: DomainBox::new(lo, hi),
        warning,
    })
}
