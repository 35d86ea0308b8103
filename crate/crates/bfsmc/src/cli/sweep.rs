//! Parameter sweeps: run a base experiment across an axis of values and a
//! set of disturbance time-offsets, aggregating one report row per run.
//!
//! Rows are ordered by (value, phase) in declared order regardless of
//! execution parallelism, and individual run failures are recorded per-row
//! instead of aborting the sweep.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cli::config::{ConfigError, ControllerConfig, ExperimentConfig, RegionsConfig};
use crate::cli::execute;
use crate::model::DisturbanceSpec;
use crate::simengine::Termination;
use crate::tuning::{self, FormulaVariant};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogGrid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: ExperimentConfig,
    /// Parameter path, e.g. `sim.tau` or `controller.c1`.
    pub axis: String,
    /// Explicit axis values; mutually exclusive with `log_grid`.
    #[serde(default)]
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_grid: Option<LogGrid>,
    /// Disturbance time-offsets applied to the mixed disturbance; defaults
    /// to a single zero offset.
    #[serde(default)]
    pub phases: Vec<f64>,
}

/// Aggregate result of a sweep.
#[derive(Debug)]
pub struct SweepOutcome {
    /// The aggregate CSV, one row per run.
    pub csv: String,
    pub rows: usize,
    /// True when every run inside the admissible sampling regime
    /// (`tau < tau_max`) passed its checks — the falsifiable guarantee.
    pub all_guaranteed_passed: bool,
}

impl SweepSpec {
    fn axis_values(&self) -> Result<Vec<f64>, ConfigError> {
        match (&self.values[..], self.log_grid) {
            ([], None) => Err(ConfigError::Invalid(vec![
                "sweep needs axis values: set values or log_grid".into(),
            ])),
            ([], Some(g)) => {
                let mut errs = Vec::new();
                if !(g.min > 0.0 && g.max > g.min) {
                    errs.push(format!("log_grid requires 0 < min < max, got {g:?}"));
                }
                if g.n < 2 {
                    errs.push(format!("log_grid requires n >= 2, got n = {}", g.n));
                }
                if !errs.is_empty() {
                    return Err(ConfigError::Invalid(errs));
                }
                let (lmin, lmax) = (g.min.ln(), g.max.ln());
                Ok((0..g.n)
                    .map(|i| (lmin + (lmax - lmin) * i as f64 / (g.n - 1) as f64).exp())
                    .collect())
            }
            (_, Some(_)) => Err(ConfigError::Invalid(vec![
                "sweep values and log_grid are mutually exclusive".into(),
            ])),
            (v, None) => Ok(v.to_vec()),
        }
    }

    fn phase_values(&self) -> Vec<f64> {
        if self.phases.is_empty() {
            vec![0.0]
        } else {
            self.phases.clone()
        }
    }
}

fn apply_axis(cfg: &mut ExperimentConfig, axis: &str, v: f64) -> Result<(), String> {
    match axis {
        "sim.tau" => {
            cfg.sim.tau = v;
            // keep the inner step close to the base one while preserving an
            // integral tau/h ratio for arbitrary axis values
            let n = (v / cfg.sim.h_inner).round().max(1.0);
            cfg.sim.h_inner = v / n;
        }
        "sim.x0" => cfg.sim.x0 = v,
        "sim.h_inner" => cfg.sim.h_inner = v,
        "sim.t_end" => cfg.sim.t_end = v,
        "plant.g1" => cfg.plant.g1 = v,
        "plant.g2" => cfg.plant.g2 = v,
        "plant.disturbance.delta_bar" => match &mut cfg.plant.disturbance {
            DisturbanceSpec::PaperMix { delta_bar, .. } => *delta_bar = v,
            other => {
                return Err(format!(
                    "axis plant.disturbance.delta_bar needs a paper_mix disturbance, got {other:?}"
                ))
            }
        },
        "controller.epsilon" => match &mut cfg.controller {
            ControllerConfig::Bfa { epsilon } | ControllerConfig::Bfsat { epsilon, .. } => {
                *epsilon = v
            }
            other => return Err(format!("axis controller.epsilon not available for {other:?}")),
        },
        "controller.c1" => match &mut cfg.controller {
            ControllerConfig::Bfsat { c1, .. } | ControllerConfig::LinearSat { c1, .. } => *c1 = v,
            // a pure barrier controller has no capacity of its own; the
            // sweep then moves the analysis-side capacity
            ControllerConfig::Bfa { .. } => {
                let rc = cfg.regions.get_or_insert(RegionsConfig::default());
                rc.c1 = Some(v);
            }
        },
        "controller.k" => match &mut cfg.controller {
            ControllerConfig::LinearSat { k, .. } => *k = v,
            other => return Err(format!("axis controller.k not available for {other:?}")),
        },
        other => return Err(format!("unknown sweep axis '{other}'")),
    }
    Ok(())
}

fn apply_phase(cfg: &mut ExperimentConfig, phase: f64) -> Result<(), String> {
    if phase == 0.0 {
        return Ok(());
    }
    match &mut cfg.plant.disturbance {
        DisturbanceSpec::PaperMix { t_offset, .. } => {
            *t_offset = phase;
            Ok(())
        }
        other => Err(format!("phase offsets need a paper_mix disturbance, got {other:?}")),
    }
}

const CSV_HEADER: &str = "axis,value,phase,tau,epsilon,c1,delta_bar,tau_max_statement,status,\
                          entry_sample,invariant_after_entry,attractive,saturation_visited,\
                          max_abs_x,max_abs_u,pass,note";

fn sanitize(note: &str) -> String {
    note.replace(['\n', ','], ";")
}

/// Run every (value, phase) combination of the sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutcome, ConfigError> {
    let values = spec.axis_values()?;
    let phases = spec.phase_values();

    let combos: Vec<(f64, f64)> = values
        .iter()
        .flat_map(|&v| phases.iter().map(move |&p| (v, p)))
        .collect();

    // indexed parallel map preserves row order on collect
    let results: Vec<(String, bool, bool)> = combos
        .par_iter()
        .map(|&(value, phase)| sweep_row(spec, value, phase))
        .collect();

    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    let mut all_guaranteed_passed = true;
    for (row, pass, guaranteed) in &results {
        csv.push_str(row);
        csv.push('\n');
        if *guaranteed && !pass {
            all_guaranteed_passed = false;
        }
    }
    Ok(SweepOutcome { csv, rows: results.len(), all_guaranteed_passed })
}

/// Build one aggregate row; returns (row, pass, within_guaranteed_regime).
fn sweep_row(spec: &SweepSpec, value: f64, phase: f64) -> (String, bool, bool) {
    let mut cfg = spec.base.clone();
    let patch = apply_axis(&mut cfg, &spec.axis, value).and_then(|()| apply_phase(&mut cfg, phase));
    let prefix = format!("{},{:.16e},{:.16e}", spec.axis, value, phase);

    let fail_row = |status: &str, note: &str| {
        (
            format!("{prefix},,,,,,{status},,,,,,,false,{}", sanitize(note)),
            false,
            false,
        )
    };

    if let Err(e) = patch {
        return fail_row("config_error", &e);
    }
    let resolved = match cfg.resolve() {
        Ok(r) => r,
        Err(e) => return fail_row("config_error", &e.to_string()),
    };

    let tau_max = tuning::tau_max(
        resolved.bounds.epsilon,
        resolved.c1,
        resolved.plant.g2,
        FormulaVariant::Statement,
    )
    .ok();
    let guaranteed = tau_max.is_some_and(|tm| resolved.sim.tau < tm);

    let artifacts = match execute(&resolved) {
        Ok(a) => a,
        Err(e) => return fail_row("sim_error", &e.to_string()),
    };

    let status = match artifacts.trajectory.termination {
        Termination::Completed => "ok",
        Termination::BarrierViolation { .. } => "barrier_violation",
    };
    let pass = artifacts.checks_passed;
    let u = artifacts.ultimate;
    let row = format!(
        "{prefix},{:.16e},{:.16e},{:.16e},{:.16e},{},{status},{},{},{},{},{:.16e},{:.16e},{},",
        resolved.sim.tau,
        resolved.bounds.epsilon,
        resolved.c1,
        resolved.delta_bar,
        tau_max.map_or(String::new(), |t| format!("{t:.16e}")),
        u.and_then(|r| r.entry_sample).map_or(String::new(), |k| k.to_string()),
        u.and_then(|r| r.invariant_after_entry).map_or(String::new(), |b| b.to_string()),
        u.map_or(String::new(), |r| r.attractive.to_string()),
        u.map_or(String::new(), |r| r.saturation_visited.to_string()),
        u.map_or(f64::NAN, |r| r.max_abs_x_overall),
        u.map_or(f64::NAN, |r| r.max_abs_u),
        pass,
    );
    (row, pass, guaranteed)
}
