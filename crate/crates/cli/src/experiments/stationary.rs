//! Stationary-law experiments: ball probabilities with their closed forms,
//! occupation ratios from long trajectories, and the stock example suites.

use std::path::Path;

use sgdlab_core::export::{float_cell, write_csv};
use sgdlab_core::landscape::{CriticalPointCatalog, IsotropicLandscape};
use sgdlab_core::stationary::{
    appendix_h_example, minimizer_probability, occupation_ratio_mc, DepthConvention,
};

fn convention_name(c: DepthConvention) -> &'static str {
    match c {
        DepthConvention::Single => "single",
        DepthConvention::Double => "double",
    }
}

pub fn probabilities(
    dir: &Path,
    landscape: &(dyn IsotropicLandscape + Send + Sync),
    catalog: &CriticalPointCatalog,
    eta_inf: f64,
    epsilon: f64,
    minimum: Option<usize>,
) -> Result<Vec<String>, String> {
    let ids: Vec<usize> = match minimum {
        Some(i) => vec![i],
        None => (0..catalog.minima.len()).collect(),
    };
    let mut warnings = Vec::new();
    let mut rows = Vec::with_capacity(ids.len());
    for &i in &ids {
        let p = minimizer_probability(landscape, catalog, i, eta_inf, epsilon)
            .map_err(|e| e.to_string())?;
        if p.favored == DepthConvention::Double {
            warnings.push(format!(
                "minimum {i}: the squared-depth weight matched the quadrature better \
                 (gap {} vs {})",
                p.gap_double, p.gap
            ));
        }
        let m = &catalog.minima[i];
        rows.push(vec![
            i.to_string(),
            float_cell(m.loss),
            float_cell(m.determinant),
            float_cell(p.closed_form),
            float_cell(p.quadrature),
            float_cell(p.gap),
            float_cell(p.closed_form_double),
            float_cell(p.gap_double),
            convention_name(p.favored).to_string(),
            float_cell(p.kappa),
            float_cell(p.depth_weight),
            float_cell(p.determinant_factor),
            float_cell(p.product_term),
            float_cell(p.inflation),
            float_cell(p.oracle_refinement_gap),
            float_cell(eta_inf),
            float_cell(epsilon),
        ]);
    }
    write_csv(
        &dir.join("probabilities.csv"),
        &[
            "minimum",
            "loss",
            "determinant",
            "closed_form",
            "quadrature",
            "gap",
            "closed_form_double",
            "gap_double",
            "favored",
            "kappa",
            "depth_weight",
            "determinant_factor",
            "product_term",
            "inflation",
            "refinement_gap",
            "eta_inf",
            "epsilon",
        ],
        &rows,
    )
    .map_err(|e| e.to_string())?;
    Ok(warnings)
}

#[allow(clippy::too_many_arguments)]
pub fn occupation(
    dir: &Path,
    seed: u64,
    landscape: &(dyn IsotropicLandscape + Send + Sync),
    catalog: &CriticalPointCatalog,
    from: usize,
    to: usize,
    eta_inf: f64,
    epsilon: f64,
    t_burn: f64,
    t_total: f64,
    dt: f64,
) -> Result<Vec<String>, String> {
    let r = occupation_ratio_mc(
        landscape, catalog, from, to, eta_inf, epsilon, t_burn, t_total, dt, seed,
    )
    .map_err(|e| e.to_string())?;

    let row = vec![vec![
        from.to_string(),
        to.to_string(),
        float_cell(r.eta_inf),
        float_cell(r.epsilon),
        float_cell(r.t_burn),
        float_cell(r.t_total),
        float_cell(r.occupancy.0),
        float_cell(r.occupancy.1),
        r.ratio.map(float_cell).unwrap_or_default(),
    ]];
    write_csv(
        &dir.join("occupation.csv"),
        &[
            "from",
            "to",
            "eta_inf",
            "epsilon",
            "t_burn",
            "t_total",
            "occupancy_from",
            "occupancy_to",
            "ratio",
        ],
        &row,
    )
    .map_err(|e| e.to_string())?;

    let mut warnings = Vec::new();
    if let Some(note) = &r.mixing_warning {
        warnings.push(note.clone());
    }
    if r.ratio.is_none() {
        warnings.push(
            "one ball was never visited after burn-in; the ratio column is empty".into(),
        );
    }
    Ok(warnings)
}

pub fn appendix_h(dir: &Path, example: u8, m_over_gamma: &[f64]) -> Result<Vec<String>, String> {
    let table = appendix_h_example(example, m_over_gamma).map_err(|e| e.to_string())?;

    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            vec![
                float_cell(r.m_over_gamma),
                float_cell(r.beta),
                float_cell(r.eta_inf),
                float_cell(table.epsilon),
                r.minimum.to_string(),
                float_cell(r.determinant),
                float_cell(r.closed_form),
                float_cell(r.quadrature),
            ]
        })
        .collect();
    write_csv(
        &dir.join("probabilities.csv"),
        &[
            "m_over_gamma",
            "beta",
            "eta_inf",
            "epsilon",
            "minimum",
            "determinant",
            "closed_form",
            "quadrature",
        ],
        &rows,
    )
    .map_err(|e| e.to_string())?;

    // Difference curves against the suite's baseline: the first minimum for
    // the multiwell suites, the lowest β level for the quadratic one.
    let mut diff_rows = Vec::new();
    let label = if example == 2 { "beta" } else { "minimum" };
    if example == 2 {
        let base_beta = table
            .rows
            .iter()
            .map(|r| r.beta)
            .fold(f64::INFINITY, f64::min);
        for &ratio in m_over_gamma {
            let base = table
                .rows
                .iter()
                .find(|r| r.m_over_gamma == ratio && r.beta == base_beta)
                .expect("baseline row exists");
            for r in table.rows.iter().filter(|r| r.m_over_gamma == ratio && r.beta != base_beta)
            {
                diff_rows.push(vec![
                    float_cell(ratio),
                    float_cell(r.beta),
                    float_cell(base.closed_form - r.closed_form),
                    float_cell(base.quadrature - r.quadrature),
                ]);
            }
        }
    } else {
        for &ratio in m_over_gamma {
            let base = table
                .rows
                .iter()
                .find(|r| r.m_over_gamma == ratio && r.minimum == 0)
                .expect("baseline row exists");
            for r in table.rows.iter().filter(|r| r.m_over_gamma == ratio && r.minimum != 0) {
                diff_rows.push(vec![
                    float_cell(ratio),
                    r.minimum.to_string(),
                    float_cell(base.closed_form - r.closed_form),
                    float_cell(base.quadrature - r.quadrature),
                ]);
            }
        }
    }
    write_csv(
        &dir.join("differences.csv"),
        &["m_over_gamma", label, "closed_form", "quadrature"],
        &diff_rows,
    )
    .map_err(|e| e.to_string())?;
    Ok(Vec::new())
}
