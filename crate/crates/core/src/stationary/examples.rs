//! The three stock example suites behind the `appendix-h` CLI kind: ball
//! probabilities swept over M/γ on fixed reference landscapes.
//!
//! 1. Three 1D equal-depth wells with Hessians 4.5, 12.5 and 28.125.
//! 2. One 1D well (Hessian 4.5) under noise levels β ∈ {5, 10, 50, 100}.
//! 3. Three 2D equal-depth wells with Hessian spectra (15, 20),
//!    (14.22, 42.66) and (102.13, 25.53).

use serde::Serialize;

use super::probability::minimizer_probability;
use super::StationaryError;
use crate::landscape::{make_multiwell, make_quadratic, WellSpec};

/// Ball radius used throughout the example suites.
const EPSILON: f64 = 0.1;

/// Noise levels for example 2.
const BETA_LEVELS: [f64; 4] = [5.0, 10.0, 50.0, 100.0];

/// One (M/γ, minimum) cell of an example table.
#[derive(Debug, Clone, Serialize)]
pub struct AppendixHRow {
    pub m_over_gamma: f64,
    pub beta: f64,
    pub eta_inf: f64,
    pub minimum: usize,
    pub determinant: f64,
    pub closed_form: f64,
    pub quadrature: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AppendixHTable {
    pub example: u8,
    pub epsilon: f64,
    pub rows: Vec<AppendixHRow>,
}

/// Sweeps one example suite over the given M/γ values. Examples 1 and 3 run
/// at β = 1 (η∞ = 2M/γ) and emit one row per minimum; example 2 emits one
/// row per noise level, with η∞ = 2M/(γβ).
pub fn appendix_h_example(
    example: u8,
    m_over_gamma: &[f64],
) -> Result<AppendixHTable, StationaryError> {
    if !(1..=3).contains(&example) {
        return Err(StationaryError::Invalid(format!(
            "example id {example} not in 1..=3"
        )));
    }
    if m_over_gamma.is_empty() {
        return Err(StationaryError::Invalid("m_over_gamma list is empty".into()));
    }
    for &r in m_over_gamma {
        if !(r > 0.0) || !r.is_finite() {
            return Err(StationaryError::Invalid(format!(
                "M/γ values must be positive and finite, got {r}"
            )));
        }
    }

    let mut rows = Vec::new();
    match example {
        1 => {
            let wells = [
                WellSpec { location: vec![-2.0], depth: 0.0, eigenvalues: vec![4.5] },
                WellSpec { location: vec![0.0], depth: 0.0, eigenvalues: vec![12.5] },
                WellSpec { location: vec![2.0], depth: 0.0, eigenvalues: vec![28.125] },
            ];
            let (landscape, catalog) = make_multiwell(&wells)?;
            for &r in m_over_gamma {
                let eta_inf = 2.0 * r;
                for minimum in 0..catalog.minima.len() {
                    let p =
                        minimizer_probability(&landscape, &catalog, minimum, eta_inf, EPSILON)?;
                    rows.push(AppendixHRow {
                        m_over_gamma: r,
                        beta: 1.0,
                        eta_inf,
                        minimum,
                        determinant: catalog.minima[minimum].determinant,
                        closed_form: p.closed_form,
                        quadrature: p.quadrature,
                    });
                }
            }
        }
        2 => {
            let (landscape, catalog) = make_quadratic(&[4.5])?;
            for &r in m_over_gamma {
                for &beta in &BETA_LEVELS {
                    // A constant β only rescales the stationary exponent, so
                    // it enters purely through η∞ = 2M/(γβ).
                    let eta_inf = 2.0 * r / beta;
                    let p = minimizer_probability(&landscape, &catalog, 0, eta_inf, EPSILON)?;
                    rows.push(AppendixHRow {
                        m_over_gamma: r,
                        beta,
                        eta_inf,
                        minimum: 0,
                        determinant: catalog.minima[0].determinant,
                        closed_form: p.closed_form,
                        quadrature: p.quadrature,
                    });
                }
            }
        }
        _ => {
            let wells = [
                WellSpec { location: vec![0.0, 0.0], depth: 0.0, eigenvalues: vec![15.0, 20.0] },
                WellSpec {
                    location: vec![2.5, 0.0],
                    depth: 0.0,
                    eigenvalues: vec![14.22, 42.66],
                },
                WellSpec {
                    location: vec![1.25, 2.165],
                    depth: 0.0,
                    eigenvalues: vec![102.13, 25.53],
                },
            ];
            let (landscape, catalog) = make_multiwell(&wells)?;
            for &r in m_over_gamma {
                let eta_inf = 2.0 * r;
                for minimum in 0..catalog.minima.len() {
                    let p =
                        minimizer_probability(&landscape, &catalog, minimum, eta_inf, EPSILON)?;
                    rows.push(AppendixHRow {
                        m_over_gamma: r,
                        beta: 1.0,
                        eta_inf,
                        minimum,
                        determinant: catalog.minima[minimum].determinant,
                        closed_form: p.closed_form,
                        quadrature: p.quadrature,
                    });
                }
            }
        }
    }
    Ok(AppendixHTable { example, epsilon: EPSILON, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows_for<'t>(
        table: &'t AppendixHTable,
        r: f64,
        beta: Option<f64>,
    ) -> Vec<&'t AppendixHRow> {
        table
            .rows
            .iter()
            .filter(|row| row.m_over_gamma == r && beta.is_none_or(|b| row.beta == b))
            .collect()
    }

    #[test]
    fn example_one_favors_flat_minima_and_widens() {
        let table = appendix_h_example(1, &[1.0, 3.0]).unwrap();
        assert_eq!(table.rows.len(), 6);
        for &r in &[1.0, 3.0] {
            let rows = rows_for(&table, r, None);
            // Flat before mid before sharp, in both columns.
            assert!(rows[0].quadrature > rows[1].quadrature);
            assert!(rows[1].quadrature > rows[2].quadrature);
            assert!(rows[0].closed_form > rows[1].closed_form);
            assert!(rows[1].closed_form > rows[2].closed_form);
        }
        // The flat minimum's lead grows with M/γ.
        let low = rows_for(&table, 1.0, None);
        let high = rows_for(&table, 3.0, None);
        for other in [1, 2] {
            let lead_low = low[0].quadrature - low[other].quadrature;
            let lead_high = high[0].quadrature - high[other].quadrature;
            assert!(
                lead_high > lead_low,
                "lead over minimum {other} shrank: {lead_low} → {lead_high}"
            );
        }
    }

    #[test]
    fn example_two_noise_slows_the_probability_growth() {
        let table = appendix_h_example(2, &[10.0, 50.0]).unwrap();
        assert_eq!(table.rows.len(), 8);
        // At fixed M/γ the probability falls as β rises…
        for &r in &[10.0, 50.0] {
            let rows = rows_for(&table, r, None);
            for pair in rows.windows(2) {
                assert!(pair[0].quadrature > pair[1].quadrature);
                assert!(pair[0].closed_form > pair[1].closed_form);
            }
        }
        // …and the growth between the two M/γ stops is slower at higher β.
        let mut growths = Vec::new();
        for &beta in &BETA_LEVELS {
            let low = rows_for(&table, 10.0, Some(beta))[0].quadrature;
            let high = rows_for(&table, 50.0, Some(beta))[0].quadrature;
            growths.push(high - low);
        }
        for pair in growths.windows(2) {
            assert!(pair[0] > pair[1], "growth did not slow: {growths:?}");
        }
    }

    #[test]
    fn example_three_orders_by_determinant() {
        let table = appendix_h_example(3, &[3.0]).unwrap();
        let rows = rows_for(&table, 3.0, None);
        assert_eq!(rows.len(), 3);
        let dets: Vec<f64> = rows.iter().map(|r| r.determinant).collect();
        assert!((dets[0] - 300.0).abs() < 1e-9);
        assert!((dets[1] - 606.6252).abs() < 1e-3);
        assert!((dets[2] - 2607.3789).abs() < 1e-3);
        // Smaller determinant, larger probability — in both columns.
        assert!(rows[0].quadrature > rows[1].quadrature);
        assert!(rows[1].quadrature > rows[2].quadrature);
        assert!(rows[0].closed_form > rows[1].closed_form);
        assert!(rows[1].closed_form > rows[2].closed_form);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(appendix_h_example(0, &[1.0]).is_err());
        assert!(appendix_h_example(4, &[1.0]).is_err());
        assert!(appendix_h_example(1, &[]).is_err());
        assert!(appendix_h_example(1, &[-2.0]).is_err());
    }
}
