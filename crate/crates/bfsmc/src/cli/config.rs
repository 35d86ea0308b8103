//! JSON experiment configuration: schema, loading and validation.
//!
//! Unknown keys are hard errors (anti-typo), and validation reports every
//! violation found, not just the first.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controller::{ActuatorSpec, BarrierSpec, ControllerSpec};
use crate::model::PlantSpec;
use crate::regions::{self, RegionBounds};
use crate::simengine::SimConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config:\n  - {}", .0.join("\n  - "))]
    Invalid(Vec<String>),
}

/// Controller block of the config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ControllerConfig {
    Bfa { epsilon: f64 },
    Bfsat { epsilon: f64, c1: f64 },
    LinearSat { k: f64, c1: f64 },
}

impl ControllerConfig {
    pub fn to_spec(self) -> ControllerSpec {
        match self {
            ControllerConfig::Bfa { epsilon } => ControllerSpec::Bfa(BarrierSpec { epsilon }),
            ControllerConfig::Bfsat { epsilon, c1 } => {
                ControllerSpec::Bfsat(BarrierSpec { epsilon }, ActuatorSpec { c1 })
            }
            ControllerConfig::LinearSat { k, c1 } => {
                ControllerSpec::LinearSat { k, actuator: ActuatorSpec { c1 } }
            }
        }
    }
}

/// Explicit region decomposition parameters; any field left out is derived
/// from the controller and plant blocks.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionsConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_bar: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Ultimate,
    Reaching,
    Gain,
    Chattering,
}

fn default_reports() -> Vec<ReportKind> {
    vec![ReportKind::Ultimate]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default = "default_reports")]
    pub reports: Vec<ReportKind>,
    /// Constant gain the gain report compares against; defaults to the
    /// linear controller's `k` when that is the configured controller.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_k: Option<f64>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig { reports: default_reports(), reference_k: None }
    }
}

fn default_out_dir() -> String {
    "out".into()
}

fn default_basename() -> String {
    "run".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: String,
    #[serde(default = "default_basename")]
    pub basename: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_out_dir(), basename: default_basename() }
    }
}

/// One closed-loop experiment: plant, controller, execution parameters and
/// requested post-processing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub plant: PlantSpec,
    pub controller: ControllerConfig,
    pub sim: SimConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<RegionsConfig>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Fully validated experiment, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedExperiment {
    pub plant: PlantSpec,
    pub ctrl: ControllerSpec,
    pub sim: SimConfig,
    pub bounds: RegionBounds,
    pub delta_bar: f64,
    pub c1: f64,
    pub analysis: AnalysisConfig,
    pub output: OutputConfig,
}

/// Load and parse a config file. Validation is a separate step so callers
/// can patch fields (sweeps do) before resolving.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    Ok(serde_json::from_str(&text)?)
}

/// Serialize a config back to canonical JSON.
pub fn emit(config: &ExperimentConfig) -> String {
    serde_json::to_string_pretty(config).expect("config serialization cannot fail")
}

impl ExperimentConfig {
    /// Validate all structural and cross-field constraints; returns the
    /// complete list of violations on failure.
    pub fn resolve(&self) -> Result<ResolvedExperiment, ConfigError> {
        let mut violations = Vec::new();
        violations.extend(self.plant.violations());
        let ctrl = self.controller.to_spec();
        violations.extend(ctrl.violations());
        violations.extend(self.sim.violations());

        let rc = self.regions.unwrap_or_default();
        let epsilon = rc.epsilon.or(ctrl.epsilon());
        let c1 = rc.c1.or(ctrl.c1());
        let delta_bar = rc.delta_bar.or(self.plant.disturbance.bound());

        if epsilon.is_none() {
            violations.push(
                "no barrier half-width available: set regions.epsilon or use a barrier controller"
                    .into(),
            );
        }
        if c1.is_none() {
            violations.push(
                "no actuator capacity available: set regions.c1 or use a saturated controller"
                    .into(),
            );
        }
        if delta_bar.is_none() {
            violations.push(
                "no disturbance bound available: set regions.delta_bar (the escape disturbance has none)"
                    .into(),
            );
        }
        if let (Some(db), Some(c1v)) = (delta_bar, c1) {
            if !(db < c1v) {
                violations.push(format!(
                    "actuator must dominate the disturbance: requires delta_bar < c1, got delta_bar = {db}, c1 = {c1v}"
                ));
            }
        }
        if self.analysis.reports.contains(&ReportKind::Gain)
            && self.analysis.reference_k.is_none()
            && !matches!(self.controller, ControllerConfig::LinearSat { .. })
        {
            violations.push("gain report requested but analysis.reference_k is not set".into());
        }
        if let (ControllerConfig::Bfa { epsilon: ce } | ControllerConfig::Bfsat { epsilon: ce, .. }, Some(re)) =
            (self.controller, rc.epsilon)
        {
            if re != ce {
                violations.push(format!(
                    "regions.epsilon = {re} disagrees with controller epsilon = {ce}"
                ));
            }
        }

        let bounds = match (epsilon, c1, delta_bar) {
            (Some(e), Some(c), Some(d)) => match regions::bounds(e, c, d) {
                Ok(b) => Some(b),
                Err(err) => {
                    violations.push(err.to_string());
                    None
                }
            },
            _ => None,
        };

        if !violations.is_empty() {
            return Err(ConfigError::Invalid(violations));
        }
        let reference_k = self.analysis.reference_k.or(match self.controller {
            ControllerConfig::LinearSat { k, .. } => Some(k),
            _ => None,
        });
        Ok(ResolvedExperiment {
            plant: self.plant,
            ctrl,
            sim: self.sim,
            bounds: bounds.unwrap(),
            delta_bar: delta_bar.unwrap(),
            c1: c1.unwrap(),
            analysis: AnalysisConfig { reports: self.analysis.reports.clone(), reference_k },
            output: self.output.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> &'static str {
        r#"{
          "plant": {
            "g1": 1.0, "g2": 1.5,
            "gain_profile": {"type": "paper_square", "g1": 1.0, "g2": 1.5},
            "disturbance": {"type": "paper_mix", "delta_bar": 4.4}
          },
          "controller": {"type": "bfa", "epsilon": 0.01},
          "regions": {"c1": 5.0},
          "sim": {"x0": 0.005, "tau": 1.38e-4, "t_end": 1.0}
        }"#
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg: ExperimentConfig = serde_json::from_str(minimal_json()).unwrap();
        assert_eq!(cfg.sim.h_inner, 1e-6);
        assert_eq!(cfg.sim.t0, 0.0);
        let resolved = cfg.resolve().unwrap();
        assert_eq!(resolved.delta_bar, 4.4);
        assert_eq!(resolved.c1, 5.0);
        assert!((resolved.bounds.x_f - 4.4 * 0.01 / 5.4).abs() < 1e-15);
    }

    #[test]
    fn unknown_keys_are_hard_errors() {
        let bad = minimal_json().replace("\"x0\"", "\"x_zero\"");
        assert!(serde_json::from_str::<ExperimentConfig>(&bad).is_err());
        let bad2 = minimal_json().replace("\"sim\":", "\"simm\":");
        assert!(serde_json::from_str::<ExperimentConfig>(&bad2).is_err());
    }

    #[test]
    fn weak_actuator_is_rejected_with_the_dominance_rule() {
        let bad = minimal_json().replace("\"c1\": 5.0", "\"c1\": 4.4");
        let cfg: ExperimentConfig = serde_json::from_str(&bad).unwrap();
        match cfg.resolve() {
            Err(ConfigError::Invalid(v)) => {
                assert!(v.iter().any(|m| m.contains("requires delta_bar < c1")), "{v:?}");
            }
            other => panic!("expected invalid config, got {other:?}"),
        }
    }

    #[test]
    fn non_integral_sampling_ratio_is_reported() {
        let bad = minimal_json().replace("\"tau\": 1.38e-4", "\"tau\": 1e-4, \"h_inner\": 3e-5");
        let cfg: ExperimentConfig = serde_json::from_str(&bad).unwrap();
        match cfg.resolve() {
            Err(ConfigError::Invalid(v)) => {
                assert!(v.iter().any(|m| m.contains("not an integer")), "{v:?}");
            }
            other => panic!("expected invalid config, got {other:?}"),
        }
    }

    #[test]
    fn violations_are_collected_not_first_only() {
        let bad = minimal_json()
            .replace("\"c1\": 5.0", "\"c1\": 4.0")
            .replace("\"tau\": 1.38e-4", "\"tau\": 1e-4, \"h_inner\": 3e-5");
        let cfg: ExperimentConfig = serde_json::from_str(&bad).unwrap();
        match cfg.resolve() {
            Err(ConfigError::Invalid(v)) => assert!(v.len() >= 2, "{v:?}"),
            other => panic!("expected invalid config, got {other:?}"),
        }
    }

    #[test]
    fn emit_round_trips_field_exact() {
        let cfg: ExperimentConfig = serde_json::from_str(minimal_json()).unwrap();
        let reparsed: ExperimentConfig = serde_json::from_str(&emit(&cfg)).unwrap();
        assert_eq!(cfg, reparsed);
    }
}
