//! Embedded reproduction presets for the five reference experiments:
//! one-interval escape, barrier invariance, linear-vs-barrier comparison,
//! gain overestimation, and finite-time reaching from far initial
//! conditions.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::adversary::{escape_magnitude_sim, verify_escape};
use crate::cli::config::{
    AnalysisConfig, ControllerConfig, ExperimentConfig, OutputConfig, RegionsConfig, ReportKind,
};
use crate::cli::{execute, plot, write_artifacts, ConfigError};
use crate::controller::{BarrierSpec, ControllerSpec};
use crate::model::{DisturbanceSpec, EscapeDirection, GainProfile, PlantSpec};
use crate::simengine::{SimConfig, SimError};

/// Sampling period used by the reference barrier experiment (just below the
/// admissible bound `epsilon/(g2*c1+1)^2 = 1.38408e-4` for `epsilon = 0.01`,
/// `c1 = 5`, `g2 = 1.5`).
pub const BARRIER_TAU: f64 = 1.38e-4;

#[derive(Debug, Error)]
pub enum PresetError {
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Escape,
    Barrier,
    LinearVsBfa,
    Gains,
    Reaching,
}

/// Result of a reproduction: per-check lines plus the overall verdict.
#[derive(Debug)]
pub struct ReproduceOutcome {
    pub passed: bool,
    pub lines: Vec<String>,
}

/// The square-gain, mixed-disturbance plant of the barrier experiments.
pub fn reference_plant(delta_bar: f64, t_offset: f64) -> PlantSpec {
    PlantSpec {
        g1: 1.0,
        g2: 1.5,
        gain_profile: GainProfile::PaperSquare { g1: 1.0, g2: 1.5 },
        disturbance: DisturbanceSpec::PaperMix { delta_bar, t_offset },
    }
}

/// Unit-gain plant with a mixed disturbance (the linear-comparison setup).
pub fn unit_gain_plant(delta_bar: f64) -> PlantSpec {
    PlantSpec {
        g1: 1.0,
        g2: 1.0,
        gain_profile: GainProfile::Constant { value: 1.0 },
        disturbance: DisturbanceSpec::PaperMix { delta_bar, t_offset: 0.0 },
    }
}

/// Barrier-invariance experiment: pure barrier law, `epsilon = 0.01`,
/// `c1 = 5`, `delta_bar = 4.4`, one second at the reference sampling period.
pub fn barrier_config() -> ExperimentConfig {
    ExperimentConfig {
        plant: reference_plant(4.4, 0.0),
        controller: ControllerConfig::Bfa { epsilon: 0.01 },
        sim: SimConfig { x0: 0.005, tau: BARRIER_TAU, h_inner: 1e-6, t_end: 1.0, t0: 0.0 },
        regions: Some(RegionsConfig { epsilon: None, c1: Some(5.0), delta_bar: None }),
        analysis: AnalysisConfig {
            reports: vec![ReportKind::Ultimate, ReportKind::Chattering],
            reference_k: None,
        },
        output: OutputConfig { dir: "out".into(), basename: "barrier".into() },
    }
}

/// Linear-comparison pair: barrier law vs. saturated proportional law on the
/// unit-gain plant with `epsilon = 0.5`, `tau = 0.0062`, `c1 = 7.5`,
/// `delta_bar = 3`.
pub fn linear_vs_bfa_configs() -> (ExperimentConfig, ExperimentConfig) {
    let sim = SimConfig { x0: 0.25, tau: 0.0062, h_inner: 1e-6, t_end: 3.0, t0: 0.0 };
    let bfa = ExperimentConfig {
        plant: unit_gain_plant(3.0),
        controller: ControllerConfig::Bfa { epsilon: 0.5 },
        sim,
        regions: Some(RegionsConfig { epsilon: None, c1: Some(7.5), delta_bar: None }),
        analysis: AnalysisConfig { reports: vec![ReportKind::Ultimate], reference_k: None },
        output: OutputConfig { dir: "out".into(), basename: "lvb_bfa".into() },
    };
    let linear = ExperimentConfig {
        plant: unit_gain_plant(3.0),
        controller: ControllerConfig::LinearSat { k: 17.0, c1: 7.5 },
        sim,
        regions: Some(RegionsConfig { epsilon: Some(0.5), c1: None, delta_bar: None }),
        analysis: AnalysisConfig { reports: vec![ReportKind::Ultimate], reference_k: None },
        output: OutputConfig { dir: "out".into(), basename: "lvb_linear".into() },
    };
    (bfa, linear)
}

/// Gain-overestimation experiment: the barrier run of the linear comparison
/// with the adaptive gain reported against the constant `k = 17`.
pub fn gains_config() -> ExperimentConfig {
    let (mut bfa, _) = linear_vs_bfa_configs();
    bfa.analysis = AnalysisConfig {
        reports: vec![ReportKind::Ultimate, ReportKind::Gain],
        reference_k: Some(17.0),
    };
    bfa.output.basename = "gains".into();
    bfa
}

/// Finite-time reaching pair: saturated barrier law started far outside the
/// barrier set, `x0 = 0.201` and `x0 = 201`.
///
/// Horizons are chosen so both runs reach the final set well inside the
/// sample bound: one second for the near start, and `330000 * tau` (about
/// 45.5 s of model time, integrated at `tau/10`) for the far start.
pub fn reaching_configs() -> (ExperimentConfig, ExperimentConfig) {
    let near = ExperimentConfig {
        plant: reference_plant(4.4, 0.0),
        controller: ControllerConfig::Bfsat { epsilon: 0.01, c1: 5.0 },
        sim: SimConfig { x0: 0.201, tau: BARRIER_TAU, h_inner: 1e-6, t_end: 1.0, t0: 0.0 },
        regions: None,
        analysis: AnalysisConfig {
            reports: vec![ReportKind::Ultimate, ReportKind::Reaching],
            reference_k: None,
        },
        output: OutputConfig { dir: "out".into(), basename: "reaching_near".into() },
    };
    let far = ExperimentConfig {
        sim: SimConfig {
            x0: 201.0,
            tau: BARRIER_TAU,
            h_inner: BARRIER_TAU / 10.0,
            t_end: 330_000.0 * BARRIER_TAU,
            t0: 0.0,
        },
        output: OutputConfig { dir: "out".into(), basename: "reaching_far".into() },
        ..near.clone()
    };
    (near, far)
}

/// Parameters of the one-interval escape experiment: `tau = 0.01`, unit
/// gain, disturbance `varpi * sgn(x_k)` with `varpi = (epsilon - x0)/tau`.
/// The reference values `epsilon = 0.01`, `x0 = -0.005` give `varpi = 1.5`.
pub struct EscapePreset {
    pub epsilon: f64,
    pub x0: f64,
    pub tau: f64,
    pub g1: f64,
    pub h_inner: f64,
}

pub fn escape_preset() -> EscapePreset {
    EscapePreset { epsilon: 0.01, x0: -0.005, tau: 0.01, g1: 1.0, h_inner: 1e-4 }
}

/// Run a reproduction preset, writing trajectory CSVs, report files and a
/// gnuplot script into `out_dir`.
pub fn reproduce(figure: FigureId, out_dir: &Path) -> Result<ReproduceOutcome, PresetError> {
    fs::create_dir_all(out_dir)?;
    match figure {
        FigureId::Escape => reproduce_escape(out_dir),
        FigureId::Barrier => reproduce_barrier(out_dir),
        FigureId::LinearVsBfa => reproduce_linear_vs_bfa(out_dir),
        FigureId::Gains => reproduce_gains(out_dir),
        FigureId::Reaching => reproduce_reaching(out_dir),
    }
}

fn reproduce_escape(out_dir: &Path) -> Result<ReproduceOutcome, PresetError> {
    let p = escape_preset();
    let plant = PlantSpec {
        g1: p.g1,
        g2: p.g1,
        gain_profile: GainProfile::Constant { value: p.g1 },
        disturbance: DisturbanceSpec::Zero,
    };
    let ctrl = ControllerSpec::Bfa(BarrierSpec { epsilon: p.epsilon });
    let cfg = SimConfig { x0: p.x0, tau: p.tau, h_inner: p.h_inner, t_end: 2.0 * p.tau, t0: 0.0 };
    let varpi = escape_magnitude_sim(p.epsilon, p.x0, p.tau);
    let (cert, traj) =
        verify_escape(&plant, &ctrl, &cfg, varpi, EscapeDirection::LastSampleSign, 1.0)?;

    let mut csv = io::BufWriter::new(fs::File::create(out_dir.join("escape.csv"))?);
    traj.write_csv(&mut csv)?;
    drop(csv);
    fs::write(out_dir.join("escape_report.txt"), cert.kv())?;
    fs::write(out_dir.join("escape.gp"), plot::escape_script(p.epsilon))?;

    let mut lines = vec![format!("escape.varpi: {:.6}", cert.varpi)];
    let passed = !cert.falsified;
    lines.push(format!(
        "escape.exit_by_t1: {} (first exit at {:?})",
        if passed { "pass" } else { "FAIL" },
        cert.first_exit_time
    ));
    Ok(ReproduceOutcome { passed, lines })
}

fn reproduce_barrier(out_dir: &Path) -> Result<ReproduceOutcome, PresetError> {
    let resolved = barrier_config().resolve()?;
    let artifacts = execute(&resolved)?;
    write_artifacts(&artifacts, out_dir, "barrier")?;
    fs::write(out_dir.join("barrier.gp"), plot::barrier_script(resolved.bounds, resolved.c1))?;

    let mut lines = artifacts.check_lines.clone();
    let mut passed = artifacts.checks_passed;
    let r = artifacts.ultimate.expect("ultimate report requested");
    let u_ok = r.max_abs_u <= resolved.c1 + 1e-9;
    lines.push(format!(
        "barrier.control_within_capacity: {} (max |u| = {:.6})",
        if u_ok { "pass" } else { "FAIL" },
        r.max_abs_u
    ));
    let sat_ok = !r.saturation_visited;
    lines.push(format!(
        "barrier.saturation_avoided: {}",
        if sat_ok { "pass" } else { "FAIL" }
    ));
    passed = passed && u_ok && sat_ok;
    Ok(ReproduceOutcome { passed, lines })
}

fn reproduce_linear_vs_bfa(out_dir: &Path) -> Result<ReproduceOutcome, PresetError> {
    let (bfa_cfg, lin_cfg) = linear_vs_bfa_configs();
    let mut lines = Vec::new();
    let mut passed = true;
    for cfg in [bfa_cfg, lin_cfg] {
        let resolved = cfg.resolve()?;
        let artifacts = execute(&resolved)?;
        write_artifacts(&artifacts, out_dir, &cfg.output.basename)?;
        for l in &artifacts.check_lines {
            lines.push(format!("{}.{l}", cfg.output.basename));
        }
        passed = passed && artifacts.checks_passed;
    }
    fs::write(out_dir.join("linear_vs_bfa.gp"), plot::linear_vs_bfa_script())?;
    Ok(ReproduceOutcome { passed, lines })
}

fn reproduce_gains(out_dir: &Path) -> Result<ReproduceOutcome, PresetError> {
    let cfg = gains_config();
    let resolved = cfg.resolve()?;
    let artifacts = execute(&resolved)?;
    write_artifacts(&artifacts, out_dir, "gains")?;
    fs::write(out_dir.join("gains.gp"), plot::gains_script())?;

    let mut lines = artifacts.check_lines.clone();
    let mut passed = artifacts.checks_passed;
    let r = artifacts.gain.expect("gain report requested");
    let ratio_ok = r.ratio < 0.5;
    lines.push(format!(
        "gains.ratio_below_half: {} (ratio = {:.4})",
        if ratio_ok { "pass" } else { "FAIL" },
        r.ratio
    ));
    passed = passed && ratio_ok;
    Ok(ReproduceOutcome { passed, lines })
}

fn reproduce_reaching(out_dir: &Path) -> Result<ReproduceOutcome, PresetError> {
    let (near, far) = reaching_configs();
    let mut lines = Vec::new();
    let mut passed = true;
    for cfg in [near, far] {
        let resolved = cfg.resolve()?;
        let artifacts = execute(&resolved)?;
        write_artifacts(&artifacts, out_dir, &cfg.output.basename)?;
        for l in &artifacts.check_lines {
            lines.push(format!("{}.{l}", cfg.output.basename));
        }
        passed = passed && artifacts.checks_passed;
    }
    fs::write(out_dir.join("reaching.gp"), plot::reaching_script())?;
    Ok(ReproduceOutcome { passed, lines })
}
