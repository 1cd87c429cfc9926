//! Experiment configuration: the on-disk format accepted by `sgdlab run`.
//!
//! A config file (TOML or JSON) names one experiment kind, a mandatory
//! master seed, optional landscape and schedule blocks, and a flat `params`
//! table whose relevant subset depends on the kind. Unknown keys are
//! rejected at parse time so typos surface as validation errors instead of
//! silently falling back to defaults.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sgdlab_core::config::{LandscapeSpec, ScheduleSpec};

use crate::CliError;

/// The experiment families the runner knows how to execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    SimulateSde,
    SimulateSgd,
    FokkerPlanck,
    EscapeTime,
    EscapeSweep,
    StationaryProb,
    OccupationRatio,
    AppendixH,
    VerifyNoise,
    CheckAssumptions,
    SharpnessToy,
}

impl ExperimentKind {
    /// The kebab-case name used in config files and run-directory names.
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::SimulateSde => "simulate-sde",
            ExperimentKind::SimulateSgd => "simulate-sgd",
            ExperimentKind::FokkerPlanck => "fokker-planck",
            ExperimentKind::EscapeTime => "escape-time",
            ExperimentKind::EscapeSweep => "escape-sweep",
            ExperimentKind::StationaryProb => "stationary-prob",
            ExperimentKind::OccupationRatio => "occupation-ratio",
            ExperimentKind::AppendixH => "appendix-h",
            ExperimentKind::VerifyNoise => "verify-noise",
            ExperimentKind::CheckAssumptions => "check-assumptions",
            ExperimentKind::SharpnessToy => "sharpness-toy",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Kind-dependent numeric parameters. Every field is optional here; the
/// planner decides which ones a given kind requires and reports all missing
/// or out-of-range entries at once.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    // Time stepping and windows.
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
    pub t_burn: Option<f64>,
    pub t_total: Option<f64>,
    pub t_max: Option<f64>,
    // Trajectory bookkeeping.
    pub n_paths: Option<usize>,
    pub n_steps: Option<usize>,
    pub record_stride: Option<usize>,
    pub w0: Option<Vec<f64>>,
    // Stationary-law and escape-time knobs.
    pub eta_inf: Option<f64>,
    pub epsilon: Option<f64>,
    pub from: Option<usize>,
    pub to: Option<usize>,
    pub radius: Option<f64>,
    pub eta_values: Option<Vec<f64>>,
    pub minimum: Option<usize>,
    // Fokker–Planck grid and fit window.
    pub grid_cells: Option<usize>,
    pub grid_lo: Option<Vec<f64>>,
    pub grid_hi: Option<Vec<f64>>,
    pub fit_window: Option<(f64, f64)>,
    // Stock example suites.
    pub example: Option<u8>,
    pub m_over_gamma: Option<Vec<f64>>,
    // Empirical-landscape experiments.
    pub batch: Option<usize>,
    pub n_draws: Option<usize>,
    pub shells: Option<Vec<f64>>,
    pub grid_resolution: Option<usize>,
    pub pairs: Option<Vec<(f64, u64)>>,
    pub n_seeds: Option<usize>,
    pub n_epochs: Option<usize>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("runs")
}

/// One experiment request, as parsed from disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Master seed. Mandatory: together with the config it determines every
    /// output byte, so there is deliberately no default.
    pub seed: u64,
    /// Parent directory for run directories, resolved against the working
    /// directory. Defaults to `runs`.
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub landscape: Option<LandscapeSpec>,
    #[serde(default)]
    pub schedule: Option<ScheduleSpec>,
    #[serde(default)]
    pub params: Params,
}

impl ExperimentConfig {
    /// Parses a config file. `.toml` and `.json` pick the format by
    /// extension; anything else is tried as TOML first, then JSON.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(vec![format!("config: cannot read {}: {e}", path.display())])
        })?;
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
        let parsed = match ext {
            "toml" => toml::from_str::<ExperimentConfig>(&text)
                .map_err(|e| format!("config: {e}")),
            "json" => serde_json::from_str::<ExperimentConfig>(&text)
                .map_err(|e| format!("config: {e}")),
            _ => toml::from_str::<ExperimentConfig>(&text).map_err(|e| format!("config: {e}"))
                .or_else(|toml_err| {
                    serde_json::from_str::<ExperimentConfig>(&text)
                        .map_err(|json_err| format!("{toml_err}; as JSON: config: {json_err}"))
                }),
        };
        parsed.map_err(|msg| CliError::Validation(vec![msg]))
    }

    /// Canonical JSON serialization. Hashing this (rather than the raw file
    /// bytes) makes the config hash insensitive to formatting and comments.
    pub fn canonical_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("config serializes");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        let kinds = [
            ExperimentKind::SimulateSde,
            ExperimentKind::SimulateSgd,
            ExperimentKind::FokkerPlanck,
            ExperimentKind::EscapeTime,
            ExperimentKind::EscapeSweep,
            ExperimentKind::StationaryProb,
            ExperimentKind::OccupationRatio,
            ExperimentKind::AppendixH,
            ExperimentKind::VerifyNoise,
            ExperimentKind::CheckAssumptions,
            ExperimentKind::SharpnessToy,
        ];
        for kind in kinds {
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(json, format!("\"{}\"", kind.as_str()));
            let back: ExperimentKind = serde_json::from_str(&json).unwrap();
            assert_eq!(back, kind);
        }
    }

    #[test]
    fn toml_config_parses_with_defaults() {
        let text = r#"
            kind = "appendix-h"
            seed = 7

            [params]
            example = 1
            m_over_gamma = [0.5, 1.0, 2.0]
        "#;
        let config: ExperimentConfig = toml::from_str(text).unwrap();
        assert_eq!(config.kind, ExperimentKind::AppendixH);
        assert_eq!(config.seed, 7);
        assert_eq!(config.output_dir, PathBuf::from("runs"));
        assert!(config.landscape.is_none());
        assert_eq!(config.params.example, Some(1));
        assert_eq!(config.params.m_over_gamma.as_deref(), Some(&[0.5, 1.0, 2.0][..]));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"
            kind = "appendix-h"
            seed = 7

            [params]
            exmple = 1
        "#;
        let err = toml::from_str::<ExperimentConfig>(text).unwrap_err();
        assert!(err.to_string().contains("exmple"), "{err}");
    }

    #[test]
    fn seed_is_mandatory() {
        let err = toml::from_str::<ExperimentConfig>("kind = \"appendix-h\"\n").unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");
    }

    #[test]
    fn canonical_json_is_stable_across_formatting() {
        let a: ExperimentConfig =
            toml::from_str("kind = \"appendix-h\"\nseed = 3\n[params]\nexample = 2\n").unwrap();
        let b: ExperimentConfig = serde_json::from_str(
            "{\"kind\":\"appendix-h\",\"seed\":3,\"params\":{\"example\":2}}",
        )
        .unwrap();
        assert_eq!(a.canonical_json(), b.canonical_json());
    }
}
