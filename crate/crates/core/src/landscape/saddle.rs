//! Saddle location between two minima.
//!
//! 1D: grid argmax of the loss on the connecting segment, then safeguarded
//! Newton on the derivative. 2D: simplified string method (fixed image
//! count, gradient relaxation with arclength reparametrization), a
//! golden-section search for the maximum along the converged path, then a
//! full Newton polish of `∇L = 0`.

use super::{Landscape, LandscapeError};
use nalgebra::{DMatrix, DVector};

const GRID_POINTS: usize = 512;
const STRING_IMAGES: usize = 20;
const STRING_STEPS: usize = 500;

/// Highest point of the loss on `[a, b]`, polished to `|L'| ≈ 0`.
/// Returns `(location, loss, second derivative)`.
pub fn find_saddle_1d(
    landscape: &(impl Landscape + ?Sized),
    a: f64,
    b: f64,
) -> Result<(f64, f64, f64), LandscapeError> {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    let fail = |reason: String| LandscapeError::SaddleSearchFailed { from: 0, to: 1, reason };

    // Interior grid argmax.
    let mut best = (a, f64::NEG_INFINITY);
    for k in 1..=GRID_POINTS {
        let x = a + (b - a) * k as f64 / (GRID_POINTS + 1) as f64;
        let v = landscape.value(&[x]);
        if v > best.1 {
            best = (x, v);
        }
    }
    let step = (b - a) / (GRID_POINTS + 1) as f64;
    let deriv = |x: f64| landscape.gradient(&[x])[0];

    // Bracket the derivative's + → − sign change around the argmax.
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    if !(deriv(lo) > 0.0 && deriv(hi) < 0.0) {
        // Widen once; a very flat top can defeat the one-cell bracket.
        lo -= step;
        hi += step;
        if !(deriv(lo) > 0.0 && deriv(hi) < 0.0) {
            return Err(fail(format!(
                "no interior maximum bracketed near x = {:.6} in [{a}, {b}]",
                best.0
            )));
        }
    }

    // Safeguarded Newton on L': bisection step whenever Newton leaves the
    // bracket or the curvature has the wrong sign.
    let mut x = best.0;
    for _ in 0..100 {
        let g = deriv(x);
        if g > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let h = landscape.hessian(&[x])[(0, 0)];
        let newton = x - g / h;
        x = if h < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 * (b - a).abs().max(1.0) {
            break;
        }
    }
    let loss = landscape.value(&[x]);
    let curvature = landscape.hessian(&[x])[(0, 0)];
    if curvature >= 0.0 {
        return Err(fail(format!(
            "polished point x = {x:.6} has nonnegative curvature {curvature:.3e}"
        )));
    }
    if deriv(x).abs() > 1e-8 {
        return Err(fail(format!(
            "derivative {:.3e} at polished point exceeds 1e-8",
            deriv(x)
        )));
    }
    Ok((x, loss, curvature))
}

/// Spectral-norm bound for a small symmetric matrix (max abs row sum).
fn hessian_scale(h: &DMatrix<f64>) -> f64 {
    let mut m = 0.0f64;
    for i in 0..h.nrows() {
        let row: f64 = (0..h.ncols()).map(|j| h[(i, j)].abs()).sum();
        m = m.max(row);
    }
    m.max(1e-9)
}

/// Min-max saddle between two 2D minima via the simplified string method,
/// then Newton on `∇L = 0`. Returns the polished saddle location.
pub fn find_saddle_2d(
    landscape: &(impl Landscape + ?Sized),
    a: &[f64],
    b: &[f64],
) -> Result<Vec<f64>, LandscapeError> {
    let fail = |reason: String| LandscapeError::SaddleSearchFailed { from: 0, to: 1, reason };
    if a.len() != 2 || b.len() != 2 {
        return Err(fail("string method implemented for dimension 2 only".into()));
    }
    let pa = DVector::from_column_slice(a);
    let pb = DVector::from_column_slice(b);

    // Straight-line initial string.
    let mut images: Vec<DVector<f64>> = (0..STRING_IMAGES)
        .map(|i| {
            let t = i as f64 / (STRING_IMAGES - 1) as f64;
            &pa + (&pb - &pa) * t
        })
        .collect();

    let span = (&pb - &pa).norm();
    for _ in 0..STRING_STEPS {
        // Relax every interior image along −∇L with a curvature-scaled,
        // displacement-capped step.
        for img in images.iter_mut().take(STRING_IMAGES - 1).skip(1) {
            let g = landscape.gradient(img.as_slice());
            let h = landscape.hessian(img.as_slice());
            let dt = 0.2 / hessian_scale(&h);
            let mut step = g * dt;
            let cap = 0.02 * span;
            if step.norm() > cap {
                step *= cap / step.norm();
            }
            *img -= step;
        }
        // Reparametrize to equal arclength (piecewise linear).
        let mut cum = vec![0.0; STRING_IMAGES];
        for i in 1..STRING_IMAGES {
            cum[i] = cum[i - 1] + (&images[i] - &images[i - 1]).norm();
        }
        let total = cum[STRING_IMAGES - 1];
        if total < 1e-12 {
            return Err(fail("string collapsed to a point".into()));
        }
        let old = images.clone();
        for (i, img) in images.iter_mut().enumerate().take(STRING_IMAGES - 1).skip(1) {
            let target = total * i as f64 / (STRING_IMAGES - 1) as f64;
            let seg = cum.partition_point(|c| *c < target).clamp(1, STRING_IMAGES - 1);
            let span = cum[seg] - cum[seg - 1];
            let t = if span > 0.0 { (target - cum[seg - 1]) / span } else { 0.0 };
            *img = &old[seg - 1] + (&old[seg] - &old[seg - 1]) * t;
        }
    }

    // The col can be far narrower than the image spacing (soft-min blends
    // between steep wells smooth a near-kink), so Newton from the raw
    // highest image may land outside its basin. Localize the maximum along
    // the converged path first with a golden-section search.
    let mut cum = vec![0.0; STRING_IMAGES];
    for i in 1..STRING_IMAGES {
        cum[i] = cum[i - 1] + (&images[i] - &images[i - 1]).norm();
    }
    let path_point = |s: f64| -> DVector<f64> {
        let seg = cum.partition_point(|c| *c < s).clamp(1, STRING_IMAGES - 1);
        let width = cum[seg] - cum[seg - 1];
        let t = if width > 0.0 { (s - cum[seg - 1]) / width } else { 0.0 };
        &images[seg - 1] + (&images[seg] - &images[seg - 1]) * t
    };
    let path_value = |s: f64| landscape.value(path_point(s).as_slice());
    let hi_idx = (1..STRING_IMAGES - 1)
        .max_by(|&i, &j| {
            landscape
                .value(images[i].as_slice())
                .partial_cmp(&landscape.value(images[j].as_slice()))
                .unwrap()
        })
        .unwrap();
    let mut lo = cum[hi_idx.saturating_sub(2)];
    let mut hi = cum[(hi_idx + 2).min(STRING_IMAGES - 1)];
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut s1, mut s2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut f1, mut f2) = (path_value(s1), path_value(s2));
    for _ in 0..200 {
        if hi - lo < 1e-13 * cum[STRING_IMAGES - 1].max(1.0) {
            break;
        }
        if f1 < f2 {
            lo = s1;
            s1 = s2;
            f1 = f2;
            s2 = lo + phi * (hi - lo);
            f2 = path_value(s2);
        } else {
            hi = s2;
            s2 = s1;
            f2 = f1;
            s1 = hi - phi * (hi - lo);
            f1 = path_value(s1);
        }
    }
    let mut x = path_point(0.5 * (lo + hi));

    // Newton polish of ∇L = 0, step-clamped to stay inside the basin.
    for _ in 0..100 {
        let g = landscape.gradient(x.as_slice());
        if g.norm() < 1e-13 {
            break;
        }
        let h = landscape.hessian(x.as_slice());
        let mut step = h
            .lu()
            .solve(&g)
            .ok_or_else(|| fail(format!("singular Hessian at {:?}", x.as_slice())))?;
        let cap = 0.05 * span;
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        x -= step;
        if !landscape.domain().scaled(2.0).contains(x.as_slice()) {
            return Err(fail(format!("Newton iterate left the domain: {:?}", x.as_slice())));
        }
    }
    let g = landscape.gradient(x.as_slice());
    if g.norm() > 1e-8 {
        return Err(fail(format!(
            "Newton stalled with gradient norm {:.3e} at {:?}",
            g.norm(),
            x.as_slice()
        )));
    }
    let eig = landscape.hessian(x.as_slice()).symmetric_eigen().eigenvalues;
    let negatives = eig.iter().filter(|e| **e < 0.0).count();
    if negatives != 1 {
        return Err(fail(format!(
            "converged to a critical point with {negatives} descent directions at {:?}",
            x.as_slice()
        )));
    }
    Ok(x.as_slice().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{make_asymmetric_double_well, make_double_well, DomainBox};

    #[test]
    fn symmetric_double_well_saddle_is_at_zero() {
        let (l, _) = make_double_well(0.25).unwrap();
        let (x, loss, curv) = find_saddle_1d(&l, -1.0, 1.0).unwrap();
        assert!(x.abs() < 1e-10);
        assert!((loss - 0.25).abs() < 1e-12);
        assert!((curv + 1.0).abs() < 1e-9);
    }

    #[test]
    fn asymmetric_well_search_matches_catalog() {
        let (l, cat) = make_asymmetric_double_well(4.5, 12.5, 0.55).unwrap();
        let (x, loss, curv) = find_saddle_1d(&l, -0.55, 0.55).unwrap();
        assert!((x - cat.saddles[0].location[0]).abs() < 1e-9);
        assert!((loss - cat.saddles[0].loss).abs() < 1e-12);
        assert!((curv + cat.saddles[0].lambda_star).abs() < 1e-6);
    }

    struct XDoubleWell {
        domain: DomainBox,
    }

    impl Landscape for XDoubleWell {
        fn dim(&self) -> usize {
            2
        }
        fn value(&self, w: &[f64]) -> f64 {
            let s = w[0] * w[0] - 1.0;
            s * s + 2.0 * w[1] * w[1]
        }
        fn gradient_into(&self, w: &[f64], out: &mut [f64]) {
            out[0] = 4.0 * w[0] * (w[0] * w[0] - 1.0);
            out[1] = 4.0 * w[1];
        }
        fn hessian(&self, w: &[f64]) -> DMatrix<f64> {
            let mut h = DMatrix::zeros(2, 2);
            h[(0, 0)] = 12.0 * w[0] * w[0] - 4.0;
            h[(1, 1)] = 4.0;
            h
        }
        fn domain(&self) -> &DomainBox {
            &self.domain
        }
    }

    #[test]
    fn string_method_finds_the_origin_saddle() {
        let l = XDoubleWell { domain: DomainBox::symmetric(2, 3.0) };
        let s = find_saddle_2d(&l, &[-1.0, 0.0], &[1.0, 0.0]).unwrap();
        assert!(s[0].abs() < 1e-9, "saddle x = {}", s[0]);
        assert!(s[1].abs() < 1e-9, "saddle y = {}", s[1]);
    }

    #[test]
    fn string_method_works_off_axis() {
        // Same landscape, but approach the saddle from minima that are not
        // on the y = 0 axis line (the string has to bend).
        let l = XDoubleWell { domain: DomainBox::symmetric(2, 3.0) };
        // Perturbed endpoints still in the two basins.
        let s = find_saddle_2d(&l, &[-1.0, 1e-3], &[1.0, -1e-3]).unwrap();
        assert!(s[0].abs() < 1e-8);
        assert!(s[1].abs() < 1e-8);
    }
}
