//! Adversarial disturbances that expel the state from the barrier set within
//! one sampling interval, no matter what control was latched at the sample.
//!
//! Once the control `u_0` is held over `[t_0, t_1)`, a constant disturbance
//! `delta = -varpi` with `varpi` large enough drags the state below
//! `-epsilon` before the controller gets to react. [`escape_magnitude`]
//! returns the sufficient magnitude `2*epsilon/(g1*tau) + u_0`; any scaling
//! `rho >= 1` of it still works. This is the construction behind the
//! unsolvability of predefined performance under sampling.

use serde::{Deserialize, Serialize};

use crate::controller::ControllerSpec;
use crate::model::{DisturbanceSpec, EscapeDirection, GainProfile, PlantSpec};
use crate::simengine::{run, SimConfig, SimError};

/// Record of one escape construction and its simulation check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeCertificate {
    /// Disturbance magnitude used.
    pub varpi: f64,
    /// Control latched at the initial sample.
    pub u0: f64,
    /// Whether `varpi` satisfies the sufficient exit condition
    /// `varpi >= epsilon*(1 + |x0|/epsilon)/(g1*tau) + u0` for this initial
    /// state.
    pub predicted_exit: bool,
    /// State at the first grid point outside the barrier set, or at `t_1`
    /// when no exit was found.
    pub verified_state: f64,
    /// Time of the first grid point with `|x| >= epsilon`, if any occurred
    /// at or before `t_1`.
    pub first_exit_time: Option<f64>,
    /// True when the exit happened strictly before the first sampling
    /// instant.
    pub exited_before_t1: bool,
    /// Set when no exit occurred by `t_1`: the bound or the setup is wrong.
    pub falsified: bool,
    /// Scale factor applied on top of the sufficient magnitude.
    pub rho: f64,
}

/// Sufficient escape magnitude from the one-interval displacement bound:
/// `2*epsilon/(g1*tau) + u0`.
pub fn escape_magnitude(epsilon: f64, g1: f64, tau: f64, u0: f64) -> f64 {
    2.0 * epsilon / (g1 * tau) + u0
}

/// The experiment-specific magnitude `(epsilon - x0)/tau`: sufficient for
/// that instance, weaker than the general bound.
pub fn escape_magnitude_sim(epsilon: f64, x0: f64, tau: f64) -> f64 {
    (epsilon - x0) / tau
}

/// Simulate one escape attempt and certify it.
///
/// The plant is frozen at its worst-case gain `g = g1` (the value the
/// displacement bound uses) and driven by the escape disturbance of
/// magnitude `rho * varpi`. The run covers two sampling intervals; the
/// certificate records the first inner-grid point with `|x| >= epsilon`
/// occurring no later than `t_1`.
pub fn verify_escape(
    plant: &PlantSpec,
    ctrl: &ControllerSpec,
    cfg: &SimConfig,
    varpi: f64,
    direction: EscapeDirection,
    rho: f64,
) -> Result<(EscapeCertificate, crate::simengine::Trajectory), SimError> {
    let epsilon = ctrl
        .epsilon()
        .ok_or_else(|| SimError::Config("escape verification needs a barrier controller".into()))?;
    let magnitude = rho * varpi;
    let frozen = PlantSpec {
        g1: plant.g1,
        g2: plant.g1,
        gain_profile: GainProfile::Constant { value: plant.g1 },
        disturbance: DisturbanceSpec::Escape { magnitude, direction },
    };
    // no disturbance bound applies to the adversarial run; label the grid
    // with a degenerate decomposition (empty final set, vanishing
    // saturation band) so the region column still tracks barrier exit
    let bounds = crate::regions::bounds(epsilon, 1e12, 0.0)
        .map_err(|e| SimError::Config(e.to_string()))?;
    let traj = run(&frozen, ctrl, cfg, &bounds)?;

    let u0 = traj.sampled_controls().next().unwrap_or(f64::NAN);
    let t1 = cfg.t0 + cfg.tau;
    // tolerate one ulp of roundoff when the trajectory lands exactly on the
    // boundary at t_1
    let threshold = epsilon * (1.0 - 1e-12);
    let mut first_exit_time = None;
    let mut verified_state = f64::NAN;
    for i in 0..traj.len() {
        if traj.t[i] > t1 + 0.5 * cfg.h_inner {
            break;
        }
        verified_state = traj.x[i];
        if traj.x[i].abs() >= threshold {
            first_exit_time = Some(traj.t[i]);
            break;
        }
    }

    let theta = cfg.x0.abs() / epsilon;
    let cert = EscapeCertificate {
        varpi: magnitude,
        u0,
        predicted_exit: magnitude >= epsilon * (1.0 + theta) / (plant.g1 * cfg.tau) + u0,
        verified_state,
        first_exit_time,
        exited_before_t1: first_exit_time.is_some_and(|t| t < t1 - 0.5 * cfg.h_inner),
        falsified: first_exit_time.is_none(),
        rho,
    };
    Ok((cert, traj))
}

impl EscapeCertificate {
    /// Flat key=value rendering.
    pub fn kv(&self) -> String {
        format!(
            "varpi={:.17e}\nu0={:.17e}\npredicted_exit={}\nverified_state={:.17e}\nfirst_exit_time={}\nexited_before_t1={}\nfalsified={}\nrho={}\n",
            self.varpi,
            self.u0,
            self.predicted_exit,
            self.verified_state,
            self.first_exit_time.map_or("none".into(), |t| format!("{t:.17e}")),
            self.exited_before_t1,
            self.falsified,
            self.rho,
        )
    }
}
