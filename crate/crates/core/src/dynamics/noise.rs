//! Empirical verification of the mini-batch gradient noise law
//! `E[ĝ] = ∇L(w)`, `Cov[ĝ] = σ²(w)/M`.

use super::{minibatch_gradient, stream_rng, DynamicsError};
use crate::landscape::{EmpiricalLandscape, Landscape};
use nalgebra::DMatrix;
use serde::Serialize;

/// Sampled mean/covariance of the mini-batch gradient at one point,
/// together with the exact references it should match.
#[derive(Debug, Clone, Serialize)]
pub struct NoiseStatsReport {
    pub location: Vec<f64>,
    pub batch_size: usize,
    pub n_draws: usize,
    /// Empirical mean of the batch gradients.
    pub mean: Vec<f64>,
    /// Empirical covariance (symmetric PSD by construction).
    pub covariance: Vec<Vec<f64>>,
    /// Exact full-data gradient ∇L(w).
    pub reference_gradient: Vec<f64>,
    /// Exact covariance of the estimator on this dataset:
    /// per-sample gradient covariance × (N−M)/(M(N−1))
    /// (without-replacement sampling has a finite-population factor;
    /// it is 1 at M = 1 and 0 at M = N).
    pub reference_covariance: Vec<Vec<f64>>,
    /// Closed-form population σ²(w)/M where one exists (the linear
    /// regression family); `None` otherwise.
    pub population_covariance: Option<Vec<Vec<f64>>>,
    /// ‖mean − ∇L(w)‖ in units of the Monte-Carlo standard error
    /// ‖σ‖/√(M·n_draws). O(1) values mean the mean is unbiased.
    pub mean_error_se_units: f64,
    /// ‖Ĉ − C_ref‖_F / ‖C_ref‖_F.
    pub covariance_relative_error: f64,
}

/// Draws `n_draws` independent mini-batches at `w` and summarizes the
/// gradient estimator's first two moments against their exact values.
pub fn noise_stats(
    landscape: &EmpiricalLandscape,
    w: &[f64],
    batch_size: usize,
    n_draws: usize,
    seed: u64,
) -> Result<NoiseStatsReport, DynamicsError> {
    if n_draws < 100 {
        return Err(DynamicsError::InvalidParameter(format!(
            "n_draws = {n_draws} is too few for a covariance estimate (need at least 100)"
        )));
    }
    let dim = landscape.dim();
    if w.len() != dim {
        return Err(DynamicsError::InvalidParameter(format!(
            "location has dimension {}, landscape has {dim}",
            w.len()
        )));
    }
    let n = landscape.n_samples();
    let mut rng = stream_rng(seed, 0);

    let mut draws = vec![0.0; n_draws * dim];
    let mut mean = vec![0.0; dim];
    for k in 0..n_draws {
        let g = minibatch_gradient(landscape, w, batch_size, &mut rng)?;
        for i in 0..dim {
            draws[k * dim + i] = g[i];
            mean[i] += g[i];
        }
    }
    for m in &mut mean {
        *m /= n_draws as f64;
    }
    let mut cov = DMatrix::zeros(dim, dim);
    for k in 0..n_draws {
        let row = &draws[k * dim..(k + 1) * dim];
        for i in 0..dim {
            let di = row[i] - mean[i];
            for j in 0..dim {
                cov[(i, j)] += di * (row[j] - mean[j]);
            }
        }
    }
    cov /= n_draws as f64;

    // Exact moments of the estimator on this dataset. Per-sample gradients
    // average to the full gradient, so the dataset covariance is the only
    // extra pass needed.
    let mut reference_gradient = vec![0.0; dim];
    landscape.gradient_into(w, &mut reference_gradient);
    let mut sample_cov = DMatrix::zeros(dim, dim);
    let mut g = vec![0.0; dim];
    for idx in 0..n {
        landscape.sample_gradient_into(idx, w, &mut g);
        for i in 0..dim {
            let di = g[i] - reference_gradient[i];
            for j in 0..dim {
                sample_cov[(i, j)] += di * (g[j] - reference_gradient[j]);
            }
        }
    }
    sample_cov /= n as f64;
    let fpc = if n > 1 { (n - batch_size) as f64 / (n - 1) as f64 } else { 0.0 };
    let reference_cov = &sample_cov * (fpc / batch_size as f64);

    let population_covariance = landscape
        .population_gradient_covariance(w)
        .map(|c| matrix_rows(&(c / batch_size as f64)));

    let mean_err: f64 = mean
        .iter()
        .zip(&reference_gradient)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let sigma_norm = sample_cov.trace().sqrt();
    let se = sigma_norm / ((batch_size * n_draws) as f64).sqrt();
    let mean_error_se_units = if se > 0.0 { mean_err / se } else { 0.0 };

    let diff_norm = (&cov - &reference_cov).norm();
    let ref_norm = reference_cov.norm();
    let covariance_relative_error = if ref_norm > 0.0 { diff_norm / ref_norm } else { diff_norm };

    Ok(NoiseStatsReport {
        location: w.to_vec(),
        batch_size,
        n_draws,
        mean,
        covariance: matrix_rows(&cov),
        reference_gradient,
        reference_covariance: matrix_rows(&reference_cov),
        population_covariance,
        mean_error_se_units,
        covariance_relative_error,
    })
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{make_empirical_regression, EmpiricalKind};

    fn linear_1d(n: usize, seed: u64) -> EmpiricalLandscape {
        make_empirical_regression(EmpiricalKind::Linear, n, &[2.0], 0.0, seed).unwrap()
    }

    #[test]
    fn doubling_batch_halves_variance() {
        let l = linear_1d(2000, 11);
        let a = noise_stats(&l, &[3.0], 8, 20_000, 1).unwrap();
        let b = noise_stats(&l, &[3.0], 16, 20_000, 2).unwrap();
        let ratio = a.covariance[0][0] / b.covariance[0][0];
        // Without-replacement correction shifts the exact ratio slightly
        // above 2 at this N.
        let exact = 2.0 * (2000.0 - 8.0) / (2000.0 - 16.0);
        assert!((ratio - exact).abs() < 0.1, "variance ratio {ratio} vs {exact}");
    }

    #[test]
    fn unit_distance_variance_is_three() {
        // Per-sample gradient variance at |w − w₀| = 1 is 2·1 + 1 = 3 in
        // the population; a 65536-sample dataset sits within a couple of
        // percent of that.
        let l = linear_1d(65_536, 5);
        let r = noise_stats(&l, &[3.0], 1, 100_000, 3).unwrap();
        assert!(
            (r.covariance[0][0] - 3.0).abs() / 3.0 < 0.05,
            "variance {} vs 3.0",
            r.covariance[0][0]
        );
        assert_eq!(r.population_covariance.as_ref().unwrap()[0][0], 3.0);
    }

    #[test]
    fn mean_is_unbiased_at_the_true_weights() {
        let l = linear_1d(4000, 17);
        let r = noise_stats(&l, &[2.0], 4, 10_000, 9).unwrap();
        assert!(r.mean_error_se_units < 4.0, "mean off by {} se", r.mean_error_se_units);
    }

    #[test]
    fn covariance_is_symmetric_psd_and_isotropic_at_the_minimum() {
        let l = make_empirical_regression(EmpiricalKind::Linear, 4000, &[1.0, -1.0, 0.5], 0.0, 23)
            .unwrap();
        // At w = w₀ the population covariance is exactly I.
        let r = noise_stats(&l, &[1.0, -1.0, 0.5], 4, 20_000, 31).unwrap();
        let c = &r.covariance;
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(c[i][j], c[j][i]);
            }
        }
        let m = DMatrix::from_fn(3, 3, |i, j| c[i][j]);
        let eigs = m.symmetric_eigenvalues();
        assert!(eigs.iter().all(|&e| e >= -1e-12), "covariance not PSD: {eigs}");
        let n_draws = r.n_draws as f64;
        let n_data = l.n_samples() as f64;
        // Two error sources stack: the Monte-Carlo estimate around the
        // dataset covariance, and the dataset's own deviation from the
        // isotropic population (at w₀ each off-diagonal per-sample entry
        // x_i x_j ε² has second moment 3, so the dataset term is
        // 3/N at per-sample scale, ×(fpc/M)² at batch scale).
        let fpc_over_m = (n_data - 4.0) / (n_data - 1.0) / 4.0;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let var_mc = c[i][i] * c[j][j] / n_draws;
                    let var_data = 3.0 / n_data * fpc_over_m * fpc_over_m;
                    let se = (var_mc + var_data).sqrt();
                    assert!(
                        c[i][j].abs() < 4.0 * se,
                        "off-diagonal ({i},{j}) = {} exceeds 4 se = {}",
                        c[i][j],
                        4.0 * se
                    );
                }
            }
        }
        assert!(r.covariance_relative_error < 0.1);
    }

    #[test]
    fn rejects_tiny_sample_counts() {
        let l = linear_1d(200, 1);
        assert!(noise_stats(&l, &[0.0], 1, 99, 0).is_err());
        assert!(noise_stats(&l, &[0.0], 1, 100, 0).is_ok());
    }

    #[test]
    fn full_batch_has_zero_variance() {
        let l = linear_1d(150, 2);
        let r = noise_stats(&l, &[1.0], 150, 200, 0).unwrap();
        assert!(r.covariance[0][0].abs() < 1e-25);
        assert_eq!(r.reference_covariance[0][0], 0.0);
    }
}
