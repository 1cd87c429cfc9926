//! Distance to stationarity and decay-rate extraction.

use super::{DensityField, FokkerPlanckError};
use crate::stats::least_squares_line;

/// Values of the reference density below this are clamped (and counted)
/// before dividing.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// The χ²-type weighted distance `Σ (p−p∞)²/p∞ · cellvol` together with
/// the number of cells where the reference had to be floored.
#[derive(Debug, Clone, Copy)]
pub struct WeightedL2Distance {
    pub value: f64,
    pub floored_cells: usize,
}

/// Weighted L² distance of `p` from the reference `p_inf`, both on the
/// same grid.
pub fn weighted_l2_distance(
    p: &DensityField,
    p_inf: &DensityField,
) -> Result<WeightedL2Distance, FokkerPlanckError> {
    if p.grid() != p_inf.grid() {
        return Err(FokkerPlanckError::GridMismatch);
    }
    let vol = p.grid().cell_volume();
    let mut value = 0.0;
    let mut floored = 0;
    for (&a, &b) in p.values().iter().zip(p_inf.values()) {
        let denom = if b < DENSITY_FLOOR {
            floored += 1;
            DENSITY_FLOOR
        } else {
            b
        };
        let d = a - b;
        value += d * d / denom;
    }
    Ok(WeightedL2Distance { value: value * vol, floored_cells: floored })
}

/// Least-squares rate of exponential decay of a distance series within a
/// time window: fits `log d(t) ≈ −rate·t + c` and returns `(rate, r²)`.
pub fn fit_decay_rate(
    series: &[(f64, f64)],
    window: (f64, f64),
) -> Result<(f64, f64), FokkerPlanckError> {
    let (t_lo, t_hi) = window;
    if !(t_hi > t_lo) {
        return Err(FokkerPlanckError::Invalid(format!(
            "fit window [{t_lo}, {t_hi}] is empty"
        )));
    }
    let mut ts = Vec::new();
    let mut logs = Vec::new();
    for &(t, d) in series {
        if t >= t_lo && t <= t_hi {
            if !(d > 0.0) {
                return Err(FokkerPlanckError::NonpositiveDistance { t, value: d });
            }
            ts.push(t);
            logs.push(d.ln());
        }
    }
    if ts.len() < 10 {
        return Err(FokkerPlanckError::TooFewPoints { need: 10, got: ts.len() });
    }
    let (slope, _, r2) = least_squares_line(&ts, &logs)?;
    Ok((-slope, r2))
}
