//! Experiment orchestration: config ingestion, single runs, figure
//! reproduction presets and parameter sweeps.

pub mod config;
pub mod plot;
pub mod presets;
pub mod sweep;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::analysis::{
    self, GainReport, ReachingReport, UltimateReport,
};
use crate::simengine::{self, SimError, Termination, Trajectory};

pub use config::{
    emit, load_config, AnalysisConfig, ConfigError, ControllerConfig, ExperimentConfig,
    OutputConfig, RegionsConfig, ReportKind, ResolvedExperiment,
};

/// Everything one experiment produced.
#[derive(Debug)]
pub struct RunArtifacts {
    pub trajectory: Trajectory,
    pub ultimate: Option<UltimateReport>,
    pub reaching: Option<ReachingReport>,
    pub gain: Option<GainReport>,
    pub chattering: Option<f64>,
    /// One human-readable line per declared check.
    pub check_lines: Vec<String>,
    pub checks_passed: bool,
}

/// Run a resolved experiment and evaluate its declared checks.
pub fn execute(resolved: &ResolvedExperiment) -> Result<RunArtifacts, SimError> {
    let traj = simengine::run(&resolved.plant, &resolved.ctrl, &resolved.sim, &resolved.bounds)?;

    let mut check_lines = Vec::new();
    let mut passed = true;
    match traj.termination {
        Termination::Completed => check_lines.push("completed: pass".into()),
        Termination::BarrierViolation { t, x } => {
            passed = false;
            check_lines.push(format!(
                "completed: FAIL (barrier violation at t = {t:.9}, x = {x:.9e})"
            ));
        }
    }

    let mut ultimate = None;
    let mut reaching = None;
    let mut gain = None;
    let mut chattering = None;

    for kind in &resolved.analysis.reports {
        match kind {
            ReportKind::Ultimate => {
                let r = analysis::ultimate_report(&traj, &resolved.bounds);
                let ok = match r.invariant_after_entry {
                    Some(inv) => inv,
                    None => r.attractive,
                };
                if ok {
                    check_lines.push("ultimate.invariance: pass".into());
                } else {
                    passed = false;
                    check_lines.push("ultimate.invariance: FAIL".into());
                }
                ultimate = Some(r);
            }
            ReportKind::Reaching => {
                let r = analysis::reaching_report(
                    &traj,
                    &resolved.bounds,
                    resolved.plant.g1,
                    resolved.sim.tau,
                    resolved.c1,
                    resolved.delta_bar,
                );
                if let (Some(l), false) = (r.l_empirical, r.bound_violated) {
                    check_lines.push(format!(
                        "reaching.within_bound: pass (l = {l} <= {})",
                        r.l_bound
                    ));
                } else {
                    passed = false;
                    check_lines.push(format!(
                        "reaching.within_bound: FAIL (l_bound = {}, reached = {:?})",
                        r.l_bound, r.l_empirical
                    ));
                }
                reaching = Some(r);
            }
            ReportKind::Gain => {
                let epsilon = resolved.bounds.epsilon;
                let k_ref = resolved.analysis.reference_k.expect("validated at resolve time");
                match analysis::gain_report(&traj, epsilon, k_ref) {
                    Ok(r) => {
                        check_lines.push(format!("gain.ratio: {:.6} (report only)", r.ratio));
                        gain = Some(r);
                    }
                    Err(e) => {
                        passed = false;
                        check_lines.push(format!("gain: FAIL ({e})"));
                    }
                }
            }
            ReportKind::Chattering => {
                let c = analysis::chattering_metric(&traj);
                check_lines.push(format!("chattering.rate_hz: {c:.6} (report only)"));
                chattering = Some(c);
            }
        }
    }

    Ok(RunArtifacts {
        trajectory: traj,
        ultimate,
        reaching,
        gain,
        chattering,
        check_lines,
        checks_passed: passed,
    })
}

/// Resolve the output directory: an explicit `--out` wins, then the
/// `BFSMC_OUT` environment variable, then the config's own output block.
pub fn resolve_out_dir(cli_out: Option<&Path>, cfg: &OutputConfig) -> PathBuf {
    if let Some(p) = cli_out {
        return p.to_path_buf();
    }
    if let Ok(env) = std::env::var("BFSMC_OUT") {
        if !env.is_empty() {
            return PathBuf::from(env);
        }
    }
    PathBuf::from(&cfg.dir)
}

/// Write `<basename>.csv` and `<basename>_report.txt` into `dir`.
pub fn write_artifacts(artifacts: &RunArtifacts, dir: &Path, basename: &str) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{basename}.csv"));
    let mut csv = io::BufWriter::new(fs::File::create(&csv_path)?);
    artifacts.trajectory.write_csv(&mut csv)?;
    csv.flush()?;

    let mut report = String::new();
    match artifacts.trajectory.termination {
        Termination::Completed => report.push_str("termination=completed\n"),
        Termination::BarrierViolation { t, x } => {
            report.push_str(&format!("termination=barrier_violation\nviolation_t={t:.17e}\nviolation_x={x:.17e}\n"))
        }
    }
    if let Some(r) = &artifacts.ultimate {
        for line in r.kv().lines() {
            report.push_str(&format!("ultimate.{line}\n"));
        }
    }
    if let Some(r) = &artifacts.reaching {
        for line in r.kv().lines() {
            report.push_str(&format!("reaching.{line}\n"));
        }
    }
    if let Some(r) = &artifacts.gain {
        for line in r.kv().lines() {
            report.push_str(&format!("gain.{line}\n"));
        }
    }
    if let Some(c) = artifacts.chattering {
        report.push_str(&format!("chattering.rate_hz={c:.17e}\n"));
    }
    for line in &artifacts.check_lines {
        report.push_str(&format!("check: {line}\n"));
    }
    report.push_str(&format!("checks_passed={}\n", artifacts.checks_passed));
    fs::write(dir.join(format!("{basename}_report.txt")), report)?;
    Ok(())
}
