//! Finite-difference oracles for gradients and Hessians.
//!
//! These are deliberately independent of the analytic derivative code: the
//! test suite uses them to certify every factory's `gradient`/`hessian`
//! implementations, and catalog verification uses them to certify stored
//! spectra.

use super::{Landscape, LandscapeError};
use nalgebra::{DMatrix, DVector};

fn require_interior(
    landscape: &(impl Landscape + ?Sized),
    w: &[f64],
    step: f64,
) -> Result<(), LandscapeError> {
    if step <= 0.0 {
        return Err(LandscapeError::Invalid(format!(
            "finite-difference step {step} must be positive"
        )));
    }
    if !landscape.domain().contains_with_margin(w, step) {
        return Err(LandscapeError::TooCloseToBoundary { w: w.to_vec(), step });
    }
    Ok(())
}

/// Centered-difference gradient of the loss value.
pub fn numeric_gradient(
    landscape: &(impl Landscape + ?Sized),
    w: &[f64],
    step: f64,
) -> Result<DVector<f64>, LandscapeError> {
    require_interior(landscape, w, step)?;
    let d = landscape.dim();
    let mut g = DVector::zeros(d);
    let mut x = w.to_vec();
    for i in 0..d {
        x[i] = w[i] + step;
        let plus = landscape.value(&x);
        x[i] = w[i] - step;
        let minus = landscape.value(&x);
        x[i] = w[i];
        g[i] = (plus - minus) / (2.0 * step);
    }
    Ok(g)
}

/// Centered second differences of the loss value, symmetrized by averaging
/// with the transpose. Exact (up to roundoff) for quadratics.
pub fn numeric_hessian(
    landscape: &(impl Landscape + ?Sized),
    w: &[f64],
    step: f64,
) -> Result<DMatrix<f64>, LandscapeError> {
    require_interior(landscape, w, step)?;
    let d = landscape.dim();
    let center = landscape.value(w);
    let mut h = DMatrix::zeros(d, d);
    let mut x = w.to_vec();
    for i in 0..d {
        x[i] = w[i] + step;
        let plus = landscape.value(&x);
        x[i] = w[i] - step;
        let minus = landscape.value(&x);
        x[i] = w[i];
        h[(i, i)] = (plus - 2.0 * center + minus) / (step * step);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut corner = |si: f64, sj: f64| {
                x[i] = w[i] + si * step;
                x[j] = w[j] + sj * step;
                let v = landscape.value(&x);
                x[i] = w[i];
                x[j] = w[j];
                v
            };
            let mixed = (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0)
                + corner(-1.0, -1.0))
                / (4.0 * step * step);
            h[(i, j)] = mixed;
            h[(j, i)] = mixed;
        }
    }
    // Symmetrize: the cross-difference formula is symmetric analytically,
    // this removes the last bits of floating-point asymmetry.
    let ht = h.transpose();
    Ok((h + ht) * 0.5)
}
