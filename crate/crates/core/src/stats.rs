//! Shared statistical utilities for the experiment layer: log-linear fits,
//! bootstrap confidence intervals, and the distribution tests used to judge
//! simulated samples (two-sample KS, exponentiality, rank comparison).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("{0}")]
    Invalid(String),
}

/// Ordinary least squares `y ≈ slope·x + intercept`; returns
/// `(slope, intercept, r²)`.
pub fn least_squares_line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64), StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::Invalid(format!(
            "x and y lengths differ: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(StatsError::TooFewSamples { need: 2, got: xs.len() });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(StatsError::Invalid("all x values identical".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok((slope, intercept, r2))
}

/// Percentile bootstrap confidence interval for an arbitrary statistic.
/// `level` is the two-sided coverage, e.g. 0.95.
pub fn bootstrap_ci<F>(
    samples: &[f64],
    statistic: F,
    n_resamples: usize,
    level: f64,
    seed: u64,
) -> Result<(f64, f64), StatsError>
where
    F: Fn(&[f64]) -> f64,
{
    if samples.len() < 2 {
        return Err(StatsError::TooFewSamples { need: 2, got: samples.len() });
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(StatsError::Invalid(format!("coverage level {level} not in (0, 1)")));
    }
    if n_resamples < 100 {
        return Err(StatsError::TooFewSamples { need: 100, got: n_resamples });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = samples.len();
    let mut resample = vec![0.0; n];
    let mut stats = Vec::with_capacity(n_resamples);
    for _ in 0..n_resamples {
        for slot in &mut resample {
            *slot = samples[rng.gen_range(0..n)];
        }
        stats.push(statistic(&resample));
    }
    stats.sort_by(|a, b| a.total_cmp(b));
    let alpha = (1.0 - level) / 2.0;
    Ok((quantile_sorted(&stats, alpha), quantile_sorted(&stats, 1.0 - alpha)))
}

/// Linear-interpolated quantile of an ascending slice.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}

/// Two-sample Kolmogorov-Smirnov test. Returns `(D, p)` where `p` is the
/// asymptotic two-sided p-value with the small-sample correction
/// λ = (√n_e + 0.12 + 0.11/√n_e)·D.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<(f64, f64), StatsError> {
    if a.len() < 5 || b.len() < 5 {
        return Err(StatsError::TooFewSamples { need: 5, got: a.len().min(b.len()) });
    }
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(|p, q| p.total_cmp(q));
    xb.sort_by(|p, q| p.total_cmp(q));
    let (na, nb) = (xa.len(), xb.len());
    let mut i = 0;
    let mut j = 0;
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = xa[i].min(xb[j]);
        while i < na && xa[i] <= x {
            i += 1;
        }
        while j < nb && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let ne = (na as f64 * nb as f64) / (na + nb) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    Ok((d, ks_survival(lambda)))
}

/// Kolmogorov distribution tail Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²λ²}.
fn ks_survival(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..101 {
        let term = (-2.0 * (k as f64 * lambda).powi(2)).exp();
        sum += sign * term;
        if term < 1e-12 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Lilliefors-type test of exponentiality with estimated mean. Returns
/// `(D, modified statistic, passes at the 1% level)`; the modified
/// statistic D*(√n + 0.26 + 0.5/√n)(D − 0.2/n) is compared against the
/// standard large-sample critical value 1.308.
pub fn lilliefors_exponential(samples: &[f64]) -> Result<(f64, f64, bool), StatsError> {
    const CRITICAL_1PCT: f64 = 1.308;
    if samples.len() < 20 {
        return Err(StatsError::TooFewSamples { need: 20, got: samples.len() });
    }
    if samples.iter().any(|&x| x <= 0.0) {
        return Err(StatsError::Invalid("exponential samples must be positive".into()));
    }
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let mut xs = samples.to_vec();
    xs.sort_by(|p, q| p.total_cmp(q));
    let mut d: f64 = 0.0;
    for (k, &x) in xs.iter().enumerate() {
        let f = 1.0 - (-x / mean).exp();
        let upper = (k + 1) as f64 / n as f64 - f;
        let lower = f - k as f64 / n as f64;
        d = d.max(upper.max(lower));
    }
    let sqrt_n = (n as f64).sqrt();
    let modified = (sqrt_n + 0.26 + 0.5 / sqrt_n) * (d - 0.2 / n as f64);
    Ok((d, modified, modified < CRITICAL_1PCT))
}

/// One-sided Mann-Whitney test of whether samples in `a` tend to be
/// *smaller* than samples in `b`. Returns the p-value from the normal
/// approximation with tie correction and continuity correction.
pub fn mann_whitney_less(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    if a.len() < 3 || b.len() < 3 {
        return Err(StatsError::TooFewSamples { need: 3, got: a.len().min(b.len()) });
    }
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let mut all: Vec<(f64, bool)> = a
        .iter()
        .map(|&x| (x, true))
        .chain(b.iter().map(|&x| (x, false)))
        .collect();
    all.sort_by(|p, q| p.0.total_cmp(&q.0));

    // Midranks with tie bookkeeping.
    let n = all.len();
    let mut rank_sum_a = 0.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && all[j].0 == all[i].0 {
            j += 1;
        }
        let tied = (j - i) as f64;
        let midrank = (i + j + 1) as f64 / 2.0;
        for item in &all[i..j] {
            if item.1 {
                rank_sum_a += midrank;
            }
        }
        tie_term += tied * tied * tied - tied;
        i = j;
    }
    let u_a = rank_sum_a - na * (na + 1.0) / 2.0;
    let mean_u = na * nb / 2.0;
    let n_tot = na + nb;
    let var_u = na * nb / 12.0 * (n_tot + 1.0 - tie_term / (n_tot * (n_tot - 1.0)));
    if var_u <= 0.0 {
        return Err(StatsError::Invalid("all observations tied".into()));
    }
    // Small U ⇒ a below b; continuity-corrected left tail.
    let z = (u_a + 0.5 - mean_u) / var_u.sqrt();
    Ok(normal_cdf(z))
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}
