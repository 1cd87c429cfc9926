//! Equal-depth double well with unequal curvatures.
//!
//! Two pure quadratic wells `½λ_flat(w+a)²` and `½λ_sharp(w−a)²` are joined
//! by a quintic Hermite bridge across their equal-value crossing point. The
//! bridge matches value, slope and curvature at both junctions, so the
//! landscape is C² everywhere while each minimum keeps an *exactly*
//! quadratic neighborhood: catalog entries (location, depth 0, curvature)
//! are exact by construction, which is what the sharp-vs-flat stationary
//! ratio law needs.

use super::{
    Barrier, CriticalPointCatalog, DomainBox, IsotropicLandscape, Landscape, LandscapeError,
    Minimum, Saddle,
};
use nalgebra::DMatrix;

/// Piecewise landscape: flat quadratic | quintic bridge | sharp quadratic.
#[derive(Debug, Clone)]
pub struct AsymmetricDoubleWell {
    lambda_flat: f64,
    lambda_sharp: f64,
    a: f64,
    bridge_lo: f64,
    bridge_hi: f64,
    /// Bridge width `bridge_hi - bridge_lo`.
    width: f64,
    /// Quintic coefficients in the scaled variable `u = (w - bridge_lo)/width`.
    coeffs: [f64; 6],
    domain: DomainBox,
}

impl AsymmetricDoubleWell {
    fn bridge_value(&self, u: f64) -> f64 {
        let c = &self.coeffs;
        ((((c[5] * u + c[4]) * u + c[3]) * u + c[2]) * u + c[1]) * u + c[0]
    }

    fn bridge_d1(&self, u: f64) -> f64 {
        let c = &self.coeffs;
        (((5.0 * c[5] * u + 4.0 * c[4]) * u + 3.0 * c[3]) * u + 2.0 * c[2]) * u + c[1]
    }

    fn bridge_d2(&self, u: f64) -> f64 {
        let c = &self.coeffs;
        ((20.0 * c[5] * u + 12.0 * c[4]) * u + 6.0 * c[3]) * u + 2.0 * c[2]
    }

    /// Second derivative of the loss at `w`.
    pub fn second_derivative(&self, w: f64) -> f64 {
        if w < self.bridge_lo {
            self.lambda_flat
        } else if w > self.bridge_hi {
            self.lambda_sharp
        } else {
            self.bridge_d2((w - self.bridge_lo) / self.width) / (self.width * self.width)
        }
    }

    pub fn bridge_interval(&self) -> (f64, f64) {
        (self.bridge_lo, self.bridge_hi)
    }
}

impl Landscape for AsymmetricDoubleWell {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, w: &[f64]) -> f64 {
        let x = w[0];
        if x < self.bridge_lo {
            let d = x + self.a;
            0.5 * self.lambda_flat * d * d
        } else if x > self.bridge_hi {
            let d = x - self.a;
            0.5 * self.lambda_sharp * d * d
        } else {
            self.bridge_value((x - self.bridge_lo) / self.width)
        }
    }

    fn gradient_into(&self, w: &[f64], out: &mut [f64]) {
        let x = w[0];
        out[0] = if x < self.bridge_lo {
            self.lambda_flat * (x + self.a)
        } else if x > self.bridge_hi {
            self.lambda_sharp * (x - self.a)
        } else {
            self.bridge_d1((x - self.bridge_lo) / self.width) / self.width
        };
    }

    fn hessian(&self, w: &[f64]) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, self.second_derivative(w[0]))
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }
}

impl IsotropicLandscape for AsymmetricDoubleWell {
    fn beta(&self, _w: &[f64]) -> f64 {
        1.0
    }
}

/// Equal-depth wells at ∓`half_separation` with the given curvatures, both
/// at loss 0, bridged near the equal-value crossing of the two parabolas.
///
/// The catalog stores the flat minimum as id 0, the sharp minimum as id 1,
/// the bridge saddle (located to machine precision by bisection on the
/// quintic's derivative), and both directed barriers.
pub fn make_asymmetric_double_well(
    curv_flat: f64,
    curv_sharp: f64,
    half_separation: f64,
) -> Result<(AsymmetricDoubleWell, CriticalPointCatalog), LandscapeError> {
    for (index, &value) in [curv_flat, curv_sharp].iter().enumerate() {
        if !(value > 0.0) {
            return Err(LandscapeError::NonPositiveCurvature { index, value });
        }
    }
    let a = half_separation;
    if !(a > 0.0) {
        return Err(LandscapeError::Invalid(format!(
            "half separation {a} must be positive"
        )));
    }
    let (l1, l2) = (curv_flat, curv_sharp);
    // Equal-value crossing of the two parabolas, between the minima.
    let xc = a * (l2.sqrt() - l1.sqrt()) / (l1.sqrt() + l2.sqrt());
    let delta = 0.2 * a;
    let (lo, hi) = (xc - delta, xc + delta);
    if lo <= -a + 0.5 * (xc + a) || hi >= a - 0.5 * (a - xc) {
        return Err(LandscapeError::Invalid(format!(
            "bridge [{lo:.3}, {hi:.3}] reaches too close to a minimum at ±{a}"
        )));
    }

    // Hermite data at the junctions, expressed in u = (x - lo)/width.
    let width = hi - lo;
    let f0 = 0.5 * l1 * (lo + a) * (lo + a);
    let s0 = l1 * (lo + a) * width;
    let c0 = l1 * width * width;
    let f1 = 0.5 * l2 * (hi - a) * (hi - a);
    let s1 = l2 * (hi - a) * width;
    let c1 = l2 * width * width;
    // Quintic p(u) = Σ coeffs[k] u^k with p(0)=f0, p'(0)=s0, p''(0)=c0 and
    // the corresponding conditions at u=1.
    let aa = f1 - f0 - s0 - 0.5 * c0;
    let bb = s1 - s0 - c0;
    let cc = c1 - c0;
    let coeffs = [
        f0,
        s0,
        0.5 * c0,
        10.0 * aa - 4.0 * bb + 0.5 * cc,
        -15.0 * aa + 7.0 * bb - cc,
        6.0 * aa - 3.0 * bb + 0.5 * cc,
    ];

    let domain = DomainBox::new(
        vec![-a - 8.0 / l1.sqrt()],
        vec![a + 8.0 / l2.sqrt()],
    );
    let well = AsymmetricDoubleWell {
        lambda_flat: l1,
        lambda_sharp: l2,
        a,
        bridge_lo: lo,
        bridge_hi: hi,
        width,
        coeffs,
        domain,
    };

    // The bridge must rise once and fall once: exactly one sign change of
    // p' on (0,1), from + to −. Anything else means the Hermite data
    // produced a wiggly interpolant and the fixture is unusable.
    let mut sign_changes = 0;
    let mut prev = well.bridge_d1(0.0);
    for k in 1..=1000 {
        let cur = well.bridge_d1(k as f64 / 1000.0);
        if prev > 0.0 && cur <= 0.0 || prev < 0.0 && cur >= 0.0 {
            sign_changes += 1;
        }
        prev = cur;
    }
    if sign_changes != 1 || well.bridge_d1(0.0) <= 0.0 || well.bridge_d1(1.0) >= 0.0 {
        return Err(LandscapeError::SaddleSearchFailed {
            from: 0,
            to: 1,
            reason: format!("bridge derivative has {sign_changes} sign changes, expected 1"),
        });
    }

    // Bisection on p' for the bridge maximum; 80 halvings reach 2^-80,
    // far below f64 resolution on a unit interval.
    let (mut ulo, mut uhi) = (0.0f64, 1.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (ulo + uhi);
        if well.bridge_d1(mid) > 0.0 {
            ulo = mid;
        } else {
            uhi = mid;
        }
    }
    let us = 0.5 * (ulo + uhi);
    let saddle_x = lo + us * width;
    let saddle_loss = well.bridge_value(us);
    let saddle_curv = well.bridge_d2(us) / (width * width);
    if saddle_curv >= 0.0 {
        return Err(LandscapeError::SaddleSearchFailed {
            from: 0,
            to: 1,
            reason: format!("bridge maximum has curvature {saddle_curv:.3}, expected negative"),
        });
    }

    let catalog = CriticalPointCatalog::new(
        vec![
            Minimum::new(vec![-a], 0.0, vec![l1]),
            Minimum::new(vec![a], 0.0, vec![l2]),
        ],
        vec![Saddle::new(vec![saddle_x], saddle_loss, vec![saddle_curv])],
        vec![
            Barrier { from: 0, to: 1, saddle: 0, height: saddle_loss },
            Barrier { from: 1, to: 0, saddle: 0, height: saddle_loss },
        ],
    )?;
    Ok((well, catalog))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::numeric::{numeric_gradient, numeric_hessian};

    fn fixture() -> (AsymmetricDoubleWell, CriticalPointCatalog) {
        make_asymmetric_double_well(4.5, 12.5, 0.55).unwrap()
    }

    #[test]
    fn minima_are_exact_and_equal_depth() {
        let (l, cat) = fixture();
        assert_eq!(cat.minima[0].location, vec![-0.55]);
        assert_eq!(cat.minima[1].location, vec![0.55]);
        assert_eq!(cat.minima[0].loss, 0.0);
        assert_eq!(cat.minima[1].loss, 0.0);
        assert_eq!(cat.minima[0].eigenvalues, vec![4.5]);
        assert_eq!(cat.minima[1].eigenvalues, vec![12.5]);
        assert_eq!(l.value(&[-0.55]), 0.0);
        assert_eq!(l.gradient(&[-0.55])[0], 0.0);
        assert_eq!(l.gradient(&[0.55])[0], 0.0);
    }

    #[test]
    fn c2_continuity_at_junctions() {
        let (l, _) = fixture();
        let (lo, hi) = l.bridge_interval();
        for x in [lo, hi] {
            let eps = 1e-9;
            let v_in = l.value(&[x + eps * (if x == lo { 1.0 } else { -1.0 })]);
            let v_out = l.value(&[x - eps * (if x == lo { 1.0 } else { -1.0 })]);
            assert!((v_in - v_out).abs() < 1e-7, "value jump at {x}");
            let g_in = l.gradient(&[x + eps])[0];
            let g_out = l.gradient(&[x - eps])[0];
            assert!((g_in - g_out).abs() < 1e-6, "slope jump at {x}");
            let h_in = l.second_derivative(x + eps);
            let h_out = l.second_derivative(x - eps);
            assert!((h_in - h_out).abs() < 1e-5, "curvature jump at {x}");
        }
    }

    #[test]
    fn saddle_sits_between_wells_and_is_critical() {
        let (l, cat) = fixture();
        let s = &cat.saddles[0];
        let x = s.location[0];
        assert!(x > -0.55 && x < 0.55);
        assert!(l.gradient(&[x])[0].abs() < 1e-12);
        assert!(s.lambda_star > 0.0);
        // Saddle height: between the quintic's junction values (≈0.75 and
        // ≈0.57 scaled) and below the raw parabola crossing 3.5156·a².
        assert!(s.loss > 0.7 && s.loss < 3.5156 * 0.55 * 0.55);
        assert_eq!(cat.barrier(0, 1).unwrap().height, s.loss);
        assert_eq!(cat.barrier(1, 0).unwrap().height, s.loss);
    }

    #[test]
    fn derivatives_match_finite_differences_everywhere() {
        let (l, _) = fixture();
        // Sweep across all three pieces, including inside the bridge.
        for k in 0..60 {
            let x = -1.2 + k as f64 * 0.04;
            let g = numeric_gradient(&l, &[x], 1e-6).unwrap()[0];
            let ga = l.gradient(&[x])[0];
            assert!(
                (g - ga).abs() <= 1e-5 * ga.abs().max(1.0),
                "gradient mismatch at {x}: fd {g} vs analytic {ga}"
            );
            let h = numeric_hessian(&l, &[x], 1e-4).unwrap()[(0, 0)];
            let ha = l.second_derivative(x);
            assert!(
                (h - ha).abs() <= 1e-3 * ha.abs().max(1.0),
                "hessian mismatch at {x}: fd {h} vs analytic {ha}"
            );
        }
    }

    #[test]
    fn catalog_survives_numeric_verification() {
        let (l, cat) = fixture();
        cat.verify(&l, 1e-3).unwrap();
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(make_asymmetric_double_well(0.0, 12.5, 0.55).is_err());
        assert!(make_asymmetric_double_well(4.5, -1.0, 0.55).is_err());
        assert!(make_asymmetric_double_well(4.5, 12.5, 0.0).is_err());
    }

    #[test]
    fn equal_curvatures_give_a_symmetric_landscape() {
        let (l, cat) = make_asymmetric_double_well(4.0, 4.0, 1.0).unwrap();
        assert!((cat.saddles[0].location[0]).abs() < 1e-12);
        for x in [0.2, 0.5, 0.9, 1.3] {
            assert!((l.value(&[x]) - l.value(&[-x])).abs() < 1e-12);
        }
    }
}
