//! Config validation: turns an [`ExperimentConfig`] into a [`Plan`] whose
//! fields are fully checked and ready to execute.
//!
//! Validation is collective: every offending field is reported in one pass,
//! with messages prefixed by the field path (`params.dt`, `schedule.gamma`,
//! `landscape`). Blocks a kind does not use are rejected rather than
//! silently ignored, so a config never carries dead weight.

use sgdlab_core::config::{BuiltLandscape, LandscapeSpec};
use sgdlab_core::dynamics::{stable_dt, Schedule, DEFAULT_RECORD_STRIDE};
use sgdlab_core::landscape::{
    BetaProfile, CriticalPointCatalog, EmpiricalKind, EmpiricalLandscape, IsotropicLandscape,
    Landscape,
};
use sgdlab_core::{EscapeSpec, GridSpec};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::CliError;

/// Alias for the landscape trait object carried by analytic plans.
pub type DynLandscape = Box<dyn IsotropicLandscape + Send + Sync>;

pub const DEFAULT_N_DRAWS: usize = 10_000;
pub const DEFAULT_GRID_RESOLUTION: usize = 64;
pub const DEFAULT_N_SEEDS: usize = 2;
pub const DEFAULT_N_EPOCHS: usize = 50;
/// Stock (γ, M) pairs for the sharpness experiment.
pub const DEFAULT_PAIRS: [(f64, u64); 3] = [(0.01, 128), (0.1, 128), (0.2, 256)];

/// A validated experiment: built landscape objects, resolved defaults,
/// checked numeric ranges.
pub enum Plan {
    SimulateSde {
        landscape: DynLandscape,
        schedule: Schedule,
        w0: Vec<f64>,
        t_end: f64,
        dt: f64,
        n_paths: usize,
        record_stride: usize,
    },
    SimulateSgd {
        landscape: EmpiricalLandscape,
        schedule: Schedule,
        w0: Vec<f64>,
        n_steps: usize,
        n_paths: usize,
        record_stride: usize,
    },
    FokkerPlanck {
        landscape: DynLandscape,
        schedule: Schedule,
        grid: GridSpec,
        w0: Vec<f64>,
        t_end: f64,
        dt: f64,
        /// Limiting inverse temperature used for the stationary reference.
        eta_ref: f64,
        fit_window: (f64, f64),
    },
    EscapeTime {
        landscape: DynLandscape,
        catalog: CriticalPointCatalog,
        schedule: Schedule,
        spec: EscapeSpec,
        dt: f64,
    },
    EscapeSweep {
        landscape: DynLandscape,
        catalog: CriticalPointCatalog,
        spec: EscapeSpec,
        eta_values: Vec<f64>,
        dt: f64,
    },
    StationaryProb {
        landscape: DynLandscape,
        catalog: CriticalPointCatalog,
        eta_inf: f64,
        epsilon: f64,
        /// `None` reports every minimum in the catalog.
        minimum: Option<usize>,
    },
    OccupationRatio {
        landscape: DynLandscape,
        catalog: CriticalPointCatalog,
        from: usize,
        to: usize,
        eta_inf: f64,
        epsilon: f64,
        t_burn: f64,
        t_total: f64,
        dt: f64,
    },
    AppendixH {
        example: u8,
        m_over_gamma: Vec<f64>,
    },
    VerifyNoise {
        landscape: EmpiricalLandscape,
        w0: Vec<f64>,
        batch: usize,
        n_draws: usize,
    },
    CheckAssumptions {
        landscape: BuiltLandscape,
        shells: Vec<f64>,
        grid_resolution: usize,
    },
    SharpnessToy {
        landscape: EmpiricalLandscape,
        w0: Vec<f64>,
        pairs: Vec<(f64, u64)>,
        n_seeds: usize,
        n_epochs: usize,
    },
}

/// Which top-level blocks each kind consumes.
fn block_usage(kind: ExperimentKind) -> (bool, bool) {
    use ExperimentKind::*;
    let landscape = !matches!(kind, AppendixH);
    let schedule = matches!(kind, SimulateSde | SimulateSgd | FokkerPlanck | EscapeTime);
    (landscape, schedule)
}

/// Field-path error accumulator.
struct Ck {
    kind: ExperimentKind,
    errors: Vec<String>,
}

impl Ck {
    fn err(&mut self, field: &str, msg: &str) {
        self.errors.push(format!("params.{field}: {msg}"));
    }

    /// Required strictly positive finite float.
    fn pos_f64(&mut self, field: &str, v: Option<f64>) -> Option<f64> {
        match v {
            None => {
                self.err(field, &format!("required for {}", self.kind));
                None
            }
            Some(x) if x.is_finite() && x > 0.0 => Some(x),
            Some(x) => {
                self.err(field, &format!("must be positive and finite, got {x}"));
                None
            }
        }
    }

    /// Optional strictly positive finite float.
    fn opt_pos_f64(&mut self, field: &str, v: Option<f64>) -> Option<Option<f64>> {
        match v {
            None => Some(None),
            Some(x) if x.is_finite() && x > 0.0 => Some(Some(x)),
            Some(x) => {
                self.err(field, &format!("must be positive and finite, got {x}"));
                None
            }
        }
    }

    /// Required count (≥ 1).
    fn req_count(&mut self, field: &str, v: Option<usize>) -> Option<usize> {
        match v {
            None => {
                self.err(field, &format!("required for {}", self.kind));
                None
            }
            Some(0) => {
                self.err(field, "must be at least 1");
                None
            }
            Some(n) => Some(n),
        }
    }

    /// Count with a default (≥ 1).
    fn count(&mut self, field: &str, v: Option<usize>, default: usize) -> Option<usize> {
        match v {
            None => Some(default),
            Some(0) => {
                self.err(field, "must be at least 1");
                None
            }
            Some(n) => Some(n),
        }
    }

    /// Required minimum index, range-checked when the catalog is known.
    fn min_index(&mut self, field: &str, v: Option<usize>, n_minima: Option<usize>) -> Option<usize> {
        let idx = match v {
            None => {
                self.err(field, &format!("required for {}", self.kind));
                return None;
            }
            Some(i) => i,
        };
        if let Some(n) = n_minima {
            if idx >= n {
                self.err(field, &format!("minimum index {idx} out of range (catalog has {n})"));
                return None;
            }
        }
        Some(idx)
    }

    /// Explicit start point: finite entries with the landscape's dimension.
    fn w0_explicit(&mut self, w0: &[f64], dim: Option<usize>) -> Option<Vec<f64>> {
        if w0.iter().any(|x| !x.is_finite()) {
            self.err("w0", "entries must be finite");
            return None;
        }
        if let Some(d) = dim {
            if w0.len() != d {
                self.err("w0", &format!("has dimension {}, landscape has {d}", w0.len()));
                return None;
            }
        }
        Some(w0.to_vec())
    }
}

fn catalog_required(
    errors: &mut Vec<String>,
    kind: ExperimentKind,
    built: Option<BuiltLandscape>,
) -> Option<(DynLandscape, CriticalPointCatalog)> {
    match built {
        Some(BuiltLandscape::Isotropic { landscape, catalog: Some(c) }) => Some((landscape, c)),
        Some(BuiltLandscape::Isotropic { catalog: None, .. }) => {
            errors.push(format!(
                "landscape: {kind} needs a landscape with a critical-point catalog"
            ));
            None
        }
        Some(BuiltLandscape::Empirical(_)) => {
            errors.push(format!("landscape: {kind} needs an analytic landscape, not a dataset"));
            None
        }
        None => None,
    }
}

fn isotropic_required(
    errors: &mut Vec<String>,
    kind: ExperimentKind,
    built: Option<BuiltLandscape>,
) -> Option<(DynLandscape, Option<CriticalPointCatalog>)> {
    match built {
        Some(BuiltLandscape::Isotropic { landscape, catalog }) => Some((landscape, catalog)),
        Some(BuiltLandscape::Empirical(_)) => {
            errors.push(format!("landscape: {kind} needs an analytic landscape, not a dataset"));
            None
        }
        None => None,
    }
}

fn empirical_required(
    errors: &mut Vec<String>,
    kind: ExperimentKind,
    built: Option<BuiltLandscape>,
) -> Option<EmpiricalLandscape> {
    match built {
        Some(BuiltLandscape::Empirical(l)) => Some(l),
        Some(BuiltLandscape::Isotropic { .. }) => {
            errors.push(format!("landscape: {kind} needs a regression dataset landscape"));
            None
        }
        None => None,
    }
}

/// Whether the spec wraps a spatially varying β profile anywhere.
fn has_varying_beta(spec: &LandscapeSpec) -> bool {
    match spec {
        LandscapeSpec::WithBeta { inner, profile } => {
            matches!(profile, BetaProfile::Quadratic { .. }) || has_varying_beta(inner)
        }
        _ => false,
    }
}

/// Start point resolution: explicit `w0`, else the first catalog minimum.
fn w0_or_first_minimum(
    ck: &mut Ck,
    w0: Option<&Vec<f64>>,
    catalog: Option<&CriticalPointCatalog>,
    dim: Option<usize>,
) -> Option<Vec<f64>> {
    match w0 {
        Some(v) => ck.w0_explicit(v, dim),
        None => match catalog {
            Some(c) => Some(c.minima[0].location.clone()),
            None => {
                ck.err("w0", "required (this landscape has no catalog to supply a default)");
                None
            }
        },
    }
}

/// Validates a config and builds the corresponding plan, plus any warnings
/// worth carrying into the run manifest.
pub fn plan(config: &ExperimentConfig) -> Result<(Plan, Vec<String>), CliError> {
    let kind = config.kind;
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    let (needs_landscape, needs_schedule) = block_usage(kind);

    if !needs_landscape && config.landscape.is_some() {
        errors.push(format!("landscape: {kind} does not use a landscape block"));
    }
    if !needs_schedule && config.schedule.is_some() {
        errors.push(format!("schedule: {kind} does not use a schedule block"));
    }

    let built = if needs_landscape {
        match &config.landscape {
            Some(spec) => match spec.build() {
                Ok(b) => Some(b),
                Err(e) => {
                    let msg = e.to_string();
                    if msg.starts_with("landscape") {
                        errors.push(msg);
                    } else {
                        errors.push(format!("landscape: {msg}"));
                    }
                    None
                }
            },
            None => {
                errors.push(format!("landscape: required for {kind}"));
                None
            }
        }
    } else {
        None
    };

    let schedule = if needs_schedule {
        match &config.schedule {
            Some(spec) => match spec.build() {
                // Core allows a zero learning rate (a frozen iterate is a
                // useful degenerate control), but every kind that takes a
                // schedule block divides by the limiting rate, so reject it
                // here.
                Ok(s) if !(s.gamma_limit() > 0.0) => {
                    errors.push(format!(
                        "schedule.gamma: the limiting learning rate must be positive, got {}",
                        s.gamma_limit()
                    ));
                    None
                }
                Ok(s) => Some(s),
                Err(e) => {
                    let msg = e.to_string();
                    if msg.starts_with("schedule") {
                        errors.push(msg);
                    } else {
                        errors.push(format!("schedule: {msg}"));
                    }
                    None
                }
            },
            None => {
                errors.push(format!("schedule: required for {kind}"));
                None
            }
        }
    } else {
        None
    };

    let mut ck = Ck { kind, errors };
    let plan = build_plan(&mut ck, &mut warnings, config, built, schedule);
    let errors = ck.errors;

    match plan {
        Some(p) if errors.is_empty() => Ok((p, warnings)),
        _ => {
            // A helper can bail without pushing (when an upstream error
            // already explains the failure); make sure we never emit an
            // empty list.
            let errors = if errors.is_empty() {
                vec![format!("config: cannot assemble a {kind} run from these inputs")]
            } else {
                errors
            };
            Err(CliError::Validation(errors))
        }
    }
}

fn build_plan(
    ck: &mut Ck,
    warnings: &mut Vec<String>,
    config: &ExperimentConfig,
    built: Option<BuiltLandscape>,
    schedule: Option<Schedule>,
) -> Option<Plan> {
    let p = &config.params;
    let kind = config.kind;
    match kind {
        ExperimentKind::SimulateSde => {
            let dt = ck.pos_f64("dt", p.dt);
            let t_end = ck.pos_f64("t_end", p.t_end);
            let n_paths = ck.count("n_paths", p.n_paths, 1);
            let stride = ck.count("record_stride", p.record_stride, DEFAULT_RECORD_STRIDE);
            let iso = isotropic_required(&mut ck.errors, kind, built);
            let dim = iso.as_ref().map(|(l, _)| l.dim());
            let w0 =
                w0_or_first_minimum(ck, p.w0.as_ref(), iso.as_ref().and_then(|(_, c)| c.as_ref()), dim);
            let (landscape, catalog) = iso?;
            let (dt, t_end) = (dt?, t_end?);
            if let Some(c) = &catalog {
                let bound = stable_dt(c);
                if dt > bound {
                    warnings.push(format!(
                        "params.dt = {dt} exceeds the curvature stability bound {bound}; \
                         expect the integrator to blow up"
                    ));
                }
            }
            Some(Plan::SimulateSde {
                landscape,
                schedule: schedule?,
                w0: w0?,
                t_end,
                dt,
                n_paths: n_paths?,
                record_stride: stride?,
            })
        }
        ExperimentKind::SimulateSgd => {
            let n_steps = ck.req_count("n_steps", p.n_steps);
            let n_paths = ck.count("n_paths", p.n_paths, 1);
            let stride = ck.count("record_stride", p.record_stride, DEFAULT_RECORD_STRIDE);
            let landscape = empirical_required(&mut ck.errors, kind, built);
            let dim = landscape.as_ref().map(|l| l.dim());
            let w0 = match p.w0.as_ref() {
                Some(v) => ck.w0_explicit(v, dim),
                None => dim.map(|d| vec![0.0; d]),
            };
            if let (Some(l), Some(s)) = (&landscape, &schedule) {
                let n = l.n_samples();
                for (label, m) in [("now", s.batch_at(0.0)), ("in the limit", s.batch_limit())] {
                    if m as usize > n {
                        ck.errors.push(format!(
                            "schedule.batch: {m} ({label}) exceeds the dataset size {n}"
                        ));
                        return None;
                    }
                }
            }
            Some(Plan::SimulateSgd {
                landscape: landscape?,
                schedule: schedule?,
                w0: w0?,
                n_steps: n_steps?,
                n_paths: n_paths?,
                record_stride: stride?,
            })
        }
        ExperimentKind::FokkerPlanck => {
            let dt = ck.pos_f64("dt", p.dt);
            let t_end = ck.pos_f64("t_end", p.t_end);
            let cells = ck.req_count("grid_cells", p.grid_cells);
            let iso = isotropic_required(&mut ck.errors, kind, built);
            let dim = iso.as_ref().map(|(l, _)| l.dim());
            let w0 =
                w0_or_first_minimum(ck, p.w0.as_ref(), iso.as_ref().and_then(|(_, c)| c.as_ref()), dim);
            let fit_window = match (p.fit_window, t_end) {
                (Some((lo, hi)), Some(te)) => {
                    if lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi && hi <= te {
                        Some((lo, hi))
                    } else {
                        ck.err(
                            "fit_window",
                            &format!("needs 0 ≤ lo < hi ≤ t_end, got ({lo}, {hi})"),
                        );
                        None
                    }
                }
                (None, Some(te)) => Some((te / 2.0, te)),
                _ => None,
            };
            let (landscape, catalog) = iso?;
            let w0 = w0?;
            let schedule = schedule?;
            let beta = landscape.beta(&w0);
            let eta_ref = schedule.eta_inf(beta);
            if config.landscape.as_ref().is_some_and(has_varying_beta) {
                warnings.push(format!(
                    "landscape β varies in space; the stationary reference uses β at the \
                     initial point, β({w0:?}) = {beta}"
                ));
            }
            let cells = cells?;
            let grid = match (&p.grid_lo, &p.grid_hi) {
                (Some(lo), Some(hi)) => GridSpec::new(lo.clone(), hi.clone(), vec![cells; lo.len()]),
                (None, None) => match &catalog {
                    Some(c) => GridSpec::for_catalog(c, eta_ref, cells),
                    None => {
                        ck.err(
                            "grid_lo",
                            "explicit bounds are required (this landscape has no catalog)",
                        );
                        return None;
                    }
                },
                _ => {
                    ck.err("grid_lo", "give both grid_lo and grid_hi, or neither");
                    return None;
                }
            };
            let grid = match grid {
                Ok(g) => g,
                Err(e) => {
                    ck.err("grid_cells", &e.to_string());
                    return None;
                }
            };
            Some(Plan::FokkerPlanck {
                landscape,
                schedule,
                grid,
                w0,
                t_end: t_end?,
                dt: dt?,
                eta_ref,
                fit_window: fit_window?,
            })
        }
        ExperimentKind::EscapeTime | ExperimentKind::EscapeSweep => {
            let dt = ck.pos_f64("dt", p.dt);
            let n_paths = ck.req_count("n_paths", p.n_paths);
            let radius = ck.opt_pos_f64("radius", p.radius);
            let t_max = ck.opt_pos_f64("t_max", p.t_max);
            let pair = catalog_required(&mut ck.errors, kind, built);
            let n_minima = pair.as_ref().map(|(_, c)| c.minima.len());
            let from = ck.min_index("from", p.from, n_minima);
            let to = ck.min_index("to", p.to, n_minima);
            if let (Some(f), Some(t)) = (from, to) {
                if f == t {
                    ck.err("to", "must name a different minimum than params.from");
                    return None;
                }
            }
            let eta_values = if kind == ExperimentKind::EscapeSweep {
                match &p.eta_values {
                    None => {
                        ck.err("eta_values", &format!("required for {kind}"));
                        None
                    }
                    Some(v) if v.is_empty() => {
                        ck.err("eta_values", "must not be empty");
                        None
                    }
                    Some(v) if v.iter().any(|x| !x.is_finite() || *x <= 0.0) => {
                        ck.err("eta_values", "entries must be positive and finite");
                        None
                    }
                    Some(v) => Some(v.clone()),
                }
            } else {
                Some(Vec::new())
            };
            let (landscape, catalog) = pair?;
            let (from, to) = (from?, to?);
            let dt = dt?;
            let bound = stable_dt(&catalog);
            if dt > bound {
                ck.err("dt", &format!("exceeds the curvature stability bound {bound}"));
                return None;
            }
            let barrier = match catalog.barrier(from, to) {
                Some(b) => b,
                None => {
                    ck.err("from", &format!("no saddle separates minima {from} and {to}"));
                    return None;
                }
            };
            let radius = radius?;
            if let Some(r) = radius {
                let saddle = &catalog.saddles[barrier.saddle];
                let dist: f64 = catalog.minima[to]
                    .location
                    .iter()
                    .zip(&saddle.location)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if r >= 0.5 * dist {
                    ck.err(
                        "radius",
                        &format!(
                            "{r} reaches past the midpoint between minimum {to} and its \
                             saddle (distance {dist})"
                        ),
                    );
                    return None;
                }
            }
            let spec = EscapeSpec { from, to, radius, t_max: t_max?, n_paths: n_paths? };
            if kind == ExperimentKind::EscapeTime {
                let schedule = schedule?;
                if !schedule.is_constant() {
                    ck.errors
                        .push("schedule: escape-time needs constant γ and M".into());
                    return None;
                }
                Some(Plan::EscapeTime { landscape, catalog, schedule, spec, dt })
            } else {
                Some(Plan::EscapeSweep { landscape, catalog, spec, eta_values: eta_values?, dt })
            }
        }
        ExperimentKind::StationaryProb => {
            let eta_inf = ck.pos_f64("eta_inf", p.eta_inf);
            let epsilon = ck.pos_f64("epsilon", p.epsilon);
            let pair = catalog_required(&mut ck.errors, kind, built);
            let n_minima = pair.as_ref().map(|(_, c)| c.minima.len());
            let minimum = match p.minimum {
                None => Some(None),
                Some(i) => match n_minima {
                    Some(n) if i >= n => {
                        ck.err("minimum", &format!("index {i} out of range (catalog has {n})"));
                        None
                    }
                    _ => Some(Some(i)),
                },
            };
            let (landscape, catalog) = pair?;
            Some(Plan::StationaryProb {
                landscape,
                catalog,
                eta_inf: eta_inf?,
                epsilon: epsilon?,
                minimum: minimum?,
            })
        }
        ExperimentKind::OccupationRatio => {
            let eta_inf = ck.pos_f64("eta_inf", p.eta_inf);
            let epsilon = ck.pos_f64("epsilon", p.epsilon);
            let t_total = ck.pos_f64("t_total", p.t_total);
            let dt = ck.pos_f64("dt", p.dt);
            let pair = catalog_required(&mut ck.errors, kind, built);
            let n_minima = pair.as_ref().map(|(_, c)| c.minima.len());
            let from = ck.min_index("from", p.from, n_minima);
            let to = ck.min_index("to", p.to, n_minima);
            let t_burn = match (p.t_burn, t_total) {
                (Some(b), Some(tt)) => {
                    if b.is_finite() && 0.0 <= b && b < tt {
                        Some(b)
                    } else {
                        ck.err("t_burn", &format!("needs 0 ≤ t_burn < t_total, got {b}"));
                        None
                    }
                }
                (None, Some(tt)) => Some(tt / 10.0),
                _ => None,
            };
            let (landscape, catalog) = pair?;
            let (from, to) = (from?, to?);
            if from == to {
                ck.err("to", "must name a different minimum than params.from");
                return None;
            }
            let dt = dt?;
            let bound = stable_dt(&catalog);
            if dt > bound {
                ck.err("dt", &format!("exceeds the curvature stability bound {bound}"));
                return None;
            }
            let epsilon = epsilon?;
            let sep: f64 = catalog.minima[from]
                .location
                .iter()
                .zip(&catalog.minima[to].location)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if epsilon >= 0.5 * sep {
                ck.err(
                    "epsilon",
                    &format!("{epsilon} makes the balls overlap (minima are {sep} apart)"),
                );
                return None;
            }
            Some(Plan::OccupationRatio {
                landscape,
                catalog,
                from,
                to,
                eta_inf: eta_inf?,
                epsilon,
                t_burn: t_burn?,
                t_total: t_total?,
                dt,
            })
        }
        ExperimentKind::AppendixH => {
            let example = match p.example {
                None => {
                    ck.err("example", &format!("required for {kind}"));
                    None
                }
                Some(e) if (1..=3).contains(&e) => Some(e),
                Some(e) => {
                    ck.err("example", &format!("must be 1, 2, or 3, got {e}"));
                    None
                }
            };
            let ratios = match &p.m_over_gamma {
                None => {
                    ck.err("m_over_gamma", &format!("required for {kind}"));
                    None
                }
                Some(v) if v.is_empty() => {
                    ck.err("m_over_gamma", "must not be empty");
                    None
                }
                Some(v) if v.iter().any(|x| !x.is_finite() || *x <= 0.0) => {
                    ck.err("m_over_gamma", "entries must be positive and finite");
                    None
                }
                Some(v) => Some(v.clone()),
            };
            Some(Plan::AppendixH { example: example?, m_over_gamma: ratios? })
        }
        ExperimentKind::VerifyNoise => {
            let landscape = empirical_required(&mut ck.errors, kind, built);
            let dim = landscape.as_ref().map(|l| l.dim());
            let w0 = match p.w0.as_ref() {
                Some(v) => ck.w0_explicit(v, dim),
                None => dim.map(|d| vec![0.0; d]),
            };
            let batch = match (ck.req_count("batch", p.batch), &landscape) {
                (Some(m), Some(l)) if m > l.n_samples() => {
                    ck.err("batch", &format!("{m} exceeds the dataset size {}", l.n_samples()));
                    None
                }
                (b, _) => b,
            };
            let n_draws = match ck.count("n_draws", p.n_draws, DEFAULT_N_DRAWS) {
                Some(n) if n < 100 => {
                    ck.err("n_draws", "need at least 100 draws for a covariance estimate");
                    None
                }
                n => n,
            };
            Some(Plan::VerifyNoise {
                landscape: landscape?,
                w0: w0?,
                batch: batch?,
                n_draws: n_draws?,
            })
        }
        ExperimentKind::CheckAssumptions => {
            let shells = match &p.shells {
                None => {
                    ck.err("shells", &format!("required for {kind}"));
                    None
                }
                Some(v) if v.is_empty() => {
                    ck.err("shells", "must not be empty");
                    None
                }
                Some(v)
                    if v.iter().any(|x| !x.is_finite() || *x <= 0.0)
                        || v.windows(2).any(|w| w[1] <= w[0]) =>
                {
                    ck.err("shells", "radii must be positive, finite, and strictly increasing");
                    None
                }
                Some(v) => Some(v.clone()),
            };
            let resolution = match ck.count("grid_resolution", p.grid_resolution, DEFAULT_GRID_RESOLUTION)
            {
                Some(r) if r < 2 => {
                    ck.err("grid_resolution", "must be at least 2");
                    None
                }
                r => r,
            };
            Some(Plan::CheckAssumptions {
                landscape: built?,
                shells: shells?,
                grid_resolution: resolution?,
            })
        }
        ExperimentKind::SharpnessToy => {
            let landscape = match empirical_required(&mut ck.errors, kind, built) {
                Some(l) if l.kind() != EmpiricalKind::Logistic => {
                    ck.errors.push(format!(
                        "landscape: {kind} needs a logistic regression landscape"
                    ));
                    None
                }
                l => l,
            };
            let dim = landscape.as_ref().map(|l| l.dim());
            let w0 = match p.w0.as_ref() {
                Some(v) => ck.w0_explicit(v, dim),
                None => dim.map(|d| vec![0.0; d]),
            };
            let pairs = match &p.pairs {
                None => Some(DEFAULT_PAIRS.to_vec()),
                Some(v) if v.is_empty() => {
                    ck.err("pairs", "must not be empty");
                    None
                }
                Some(v) => {
                    let mut ok = true;
                    for (i, (gamma, batch)) in v.iter().enumerate() {
                        // γ = 0 is allowed: it freezes the iterate and gives
                        // a flat reference curve.
                        if !gamma.is_finite() || *gamma < 0.0 {
                            ck.err("pairs", &format!("pair {i}: γ must be ≥ 0 and finite, got {gamma}"));
                            ok = false;
                        }
                        if *batch == 0 {
                            ck.err("pairs", &format!("pair {i}: batch must be at least 1"));
                            ok = false;
                        }
                        if let Some(l) = &landscape {
                            if *batch as usize > l.n_samples() {
                                ck.err(
                                    "pairs",
                                    &format!(
                                        "pair {i}: batch {batch} exceeds the dataset size {}",
                                        l.n_samples()
                                    ),
                                );
                                ok = false;
                            }
                        }
                    }
                    ok.then(|| v.clone())
                }
            };
            let n_seeds = match ck.count("n_seeds", p.n_seeds, DEFAULT_N_SEEDS) {
                Some(n) if n < 2 => {
                    ck.err("n_seeds", "need at least 2 seeds to show across-seed spread");
                    None
                }
                n => n,
            };
            let n_epochs = ck.count("n_epochs", p.n_epochs, DEFAULT_N_EPOCHS);
            Some(Plan::SharpnessToy {
                landscape: landscape?,
                w0: w0?,
                pairs: pairs?,
                n_seeds: n_seeds?,
                n_epochs: n_epochs?,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(toml_text: &str) -> ExperimentConfig {
        toml::from_str(toml_text).unwrap()
    }

    fn errors_of(config: &ExperimentConfig) -> Vec<String> {
        match plan(config) {
            Err(CliError::Validation(e)) => e,
            Err(other) => panic!("expected validation failure, got {other:?}"),
            Ok(_) => panic!("expected validation failure, got a plan"),
        }
    }

    #[test]
    fn missing_fields_are_all_reported_at_once() {
        let config = parse("kind = \"simulate-sde\"\nseed = 1\n");
        let errors = errors_of(&config);
        let text = errors.join("\n");
        for needle in ["landscape:", "schedule:", "params.dt", "params.t_end"] {
            assert!(text.contains(needle), "missing {needle} in:\n{text}");
        }
    }

    #[test]
    fn nonpositive_gamma_names_the_schedule_field() {
        let config = parse(
            r#"
            kind = "simulate-sde"
            seed = 1
            [landscape]
            kind = "double_well"
            barrier_height = 0.25
            [schedule.gamma]
            kind = "constant"
            value = 0.0
            [schedule.batch]
            kind = "constant"
            value = 1.0
            [params]
            dt = 0.01
            t_end = 1.0
            "#,
        );
        let errors = errors_of(&config);
        assert!(
            errors.iter().any(|e| e.contains("schedule.gamma")),
            "expected schedule.gamma in {errors:?}"
        );
    }

    #[test]
    fn unused_blocks_are_rejected() {
        let config = parse(
            r#"
            kind = "appendix-h"
            seed = 1
            [landscape]
            kind = "double_well"
            barrier_height = 0.25
            [params]
            example = 1
            m_over_gamma = [1.0]
            "#,
        );
        let errors = errors_of(&config);
        assert!(
            errors.iter().any(|e| e.contains("does not use a landscape block")),
            "{errors:?}"
        );
    }

    #[test]
    fn escape_time_checks_dt_against_the_stability_bound() {
        let config = parse(
            r#"
            kind = "escape-time"
            seed = 1
            [landscape]
            kind = "double_well"
            barrier_height = 0.25
            [schedule.gamma]
            kind = "constant"
            value = 0.1
            [schedule.batch]
            kind = "constant"
            value = 1.0
            [params]
            dt = 10.0
            n_paths = 4
            from = 0
            to = 1
            "#,
        );
        let errors = errors_of(&config);
        assert!(
            errors.iter().any(|e| e.contains("params.dt") && e.contains("stability")),
            "{errors:?}"
        );
    }

    #[test]
    fn sharpness_defaults_are_filled_in() {
        let config = parse(
            r#"
            kind = "sharpness-toy"
            seed = 1
            [landscape]
            kind = "regression"
            task = "logistic"
            n_samples = 256
            true_weights = [1.0, -0.5]
            l2_penalty = 0.01
            seed = 9
            "#,
        );
        let (plan, warnings) = plan(&config).unwrap();
        assert!(warnings.is_empty());
        match plan {
            Plan::SharpnessToy { pairs, n_seeds, n_epochs, w0, .. } => {
                assert_eq!(pairs, DEFAULT_PAIRS.to_vec());
                assert_eq!(n_seeds, DEFAULT_N_SEEDS);
                assert_eq!(n_epochs, DEFAULT_N_EPOCHS);
                assert_eq!(w0, vec![0.0, 0.0]);
            }
            _ => panic!("wrong plan kind"),
        }
    }

    #[test]
    fn appendix_h_plan_carries_the_requested_grid() {
        let config = parse(
            "kind = \"appendix-h\"\nseed = 1\n[params]\nexample = 2\nm_over_gamma = [0.5, 1.0]\n",
        );
        let (plan, _) = plan(&config).unwrap();
        match plan {
            Plan::AppendixH { example, m_over_gamma } => {
                assert_eq!(example, 2);
                assert_eq!(m_over_gamma, vec![0.5, 1.0]);
            }
            _ => panic!("wrong plan kind"),
        }
    }

    #[test]
    fn occupation_ratio_rejects_overlapping_balls() {
        let config = parse(
            r#"
            kind = "occupation-ratio"
            seed = 1
            [landscape]
            kind = "double_well"
            barrier_height = 0.25
            [params]
            eta_inf = 6.0
            epsilon = 1.5
            t_total = 100.0
            dt = 0.01
            from = 0
            to = 1
            "#,
        );
        let errors = errors_of(&config);
        assert!(
            errors.iter().any(|e| e.contains("params.epsilon") && e.contains("overlap")),
            "{errors:?}"
        );
    }
}
