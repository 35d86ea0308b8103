//! Trajectory post-processing: final-set entry and invariance, finite-sample
//! reaching, chattering, gain overestimation and the continuous-time
//! ultimate bound.

use serde::{Deserialize, Serialize};

use crate::controller::{barrier_gain, ControlError};
use crate::regions::{classify, RegionBounds, RegionLabel};
use crate::simengine::Trajectory;

/// Final-set entry and invariance summary of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UltimateReport {
    /// First sample index classified Div 4, if any.
    pub entry_sample: Option<usize>,
    /// Defined only when an entry exists: every later sample stays in Div 4
    /// and every inner-grid point after entry keeps `|x| < epsilon`.
    pub invariant_after_entry: Option<bool>,
    /// Whether the sampled sequence either entered Div 4 or showed strictly
    /// decreasing `|x_k|` while in Div 3 (the at-sample reading of
    /// "asymptotically attractive").
    pub attractive: bool,
    pub max_abs_x_after_entry: Option<f64>,
    pub max_abs_x_overall: f64,
    pub max_abs_u: f64,
    /// Any inner-grid point in Div 1 or Div 2.
    pub saturation_visited: bool,
}

impl UltimateReport {
    /// Flat key=value rendering.
    pub fn kv(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "entry_sample={}\n",
            self.entry_sample.map_or("none".into(), |k| k.to_string())
        ));
        s.push_str(&format!(
            "invariant_after_entry={}\n",
            self.invariant_after_entry.map_or("undefined".into(), |b| b.to_string())
        ));
        s.push_str(&format!("attractive={}\n", self.attractive));
        s.push_str(&format!(
            "max_abs_x_after_entry={}\n",
            self.max_abs_x_after_entry.map_or("undefined".into(), |v| format!("{v:.17e}"))
        ));
        s.push_str(&format!("max_abs_x_overall={:.17e}\n", self.max_abs_x_overall));
        s.push_str(&format!("max_abs_u={:.17e}\n", self.max_abs_u));
        s.push_str(&format!("saturation_visited={}\n", self.saturation_visited));
        s
    }
}

/// Finite-sample reaching summary: theoretical sample bound vs. what the run
/// actually did.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReachingReport {
    /// Initial distance to the Div 3 boundary, `max(0, |x0| - x_S)`.
    pub d: f64,
    /// Per-sample progress lower bound `g1*tau*(c1 - delta_bar)`, a state
    /// displacement per sampling interval.
    pub sigma_step: f64,
    /// The raw authority margin `c1 - delta_bar` the bound is built from.
    pub sigma_raw: f64,
    /// `floor(d/sigma_step) + 1` samples.
    pub l_bound: u64,
    /// First sample index inside Div 3 or Div 4, if reached within the
    /// horizon.
    pub l_empirical: Option<usize>,
    /// Set when the run reached but took more samples than `l_bound`.
    pub bound_violated: bool,
}

impl ReachingReport {
    pub fn kv(&self) -> String {
        format!(
            "d={:.17e}\nsigma_step={:.17e}\nsigma_raw={:.17e}\nl_bound={}\nl_empirical={}\nbound_violated={}\n",
            self.d,
            self.sigma_step,
            self.sigma_raw,
            self.l_bound,
            self.l_empirical.map_or("not_reached".into(), |k| k.to_string()),
            self.bound_violated,
        )
    }
}

/// Continuous-time ultimate bound `max{beta, phi/(phi+1)} * epsilon` with
/// `phi = delta_bar + theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinalSetTheory {
    pub beta: f64,
    pub theta: f64,
    pub phi: f64,
    pub epsilon: f64,
    pub bound: f64,
}

impl FinalSetTheory {
    /// `theta = 1` is accepted as the loosest valid bound (the guarantee is
    /// existential in `theta` on (0, 1)).
    pub fn new(beta: f64, theta: f64, delta_bar: f64, epsilon: f64) -> Self {
        let phi = delta_bar + theta;
        FinalSetTheory {
            beta,
            theta,
            phi,
            epsilon,
            bound: f64::max(beta, phi / (phi + 1.0)) * epsilon,
        }
    }
}

/// Outcome of checking a fine-step run against [`FinalSetTheory`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub pass: bool,
    /// `bound + tol - tail_sup`; positive when passing.
    pub margin: f64,
    /// Supremum of `|x|` over the last 20% of the horizon.
    pub tail_sup: f64,
}

/// Maximum adaptive barrier gain over the sampled states, against a
/// reference constant gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    pub max_barrier_gain: f64,
    pub reference_gain: f64,
    pub ratio: f64,
}

impl GainReport {
    pub fn kv(&self) -> String {
        format!(
            "max_barrier_gain={:.17e}\nreference_gain={:.17e}\nratio={:.17e}\n",
            self.max_barrier_gain, self.reference_gain, self.ratio
        )
    }
}

/// Summarize final-set entry and invariance of a run.
pub fn ultimate_report(traj: &Trajectory, bounds: &RegionBounds) -> UltimateReport {
    let samples: Vec<f64> = traj.sampled_states().collect();
    let entry_sample = samples.iter().position(|&x| classify(x, bounds) == RegionLabel::Div4);

    let invariant_after_entry = entry_sample.map(|k| {
        let later_samples_ok =
            samples[k..].iter().all(|&x| classify(x, bounds) == RegionLabel::Div4);
        let entry_grid = traj.sample_idx[k];
        let inner_ok = traj.x[entry_grid..].iter().all(|&x| x.abs() < bounds.epsilon);
        later_samples_ok && inner_ok
    });

    // strictly decreasing |x_k| while in Div 3 also counts as attractive
    let attractive = entry_sample.is_some() || {
        samples.windows(2).all(|w| {
            classify(w[0], bounds) != RegionLabel::Div3 || w[1].abs() < w[0].abs()
        })
    };

    let max_abs_x_after_entry = entry_sample.map(|k| {
        let entry_grid = traj.sample_idx[k];
        traj.x[entry_grid..].iter().fold(0.0f64, |m, &x| m.max(x.abs()))
    });

    let max_abs_x_overall = traj.x.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let max_abs_u = traj.u.iter().fold(0.0f64, |m, &u| m.max(u.abs()));
    let saturation_visited = traj.region.iter().any(|&r| r == 1 || r == 2);

    UltimateReport {
        entry_sample,
        invariant_after_entry,
        attractive,
        max_abs_x_after_entry,
        max_abs_x_overall,
        max_abs_u,
        saturation_visited,
    }
}

/// Compare the empirical reaching time against the per-sample progress
/// bound.
pub fn reaching_report(
    traj: &Trajectory,
    bounds: &RegionBounds,
    g1: f64,
    tau: f64,
    c1: f64,
    delta_bar: f64,
) -> ReachingReport {
    let x0 = traj.x[0];
    let d = (x0.abs() - bounds.x_s).max(0.0);
    let sigma_raw = c1 - delta_bar;
    let sigma_step = g1 * tau * sigma_raw;
    let l_bound = (d / sigma_step).floor() as u64 + 1;
    let l_empirical = traj
        .sampled_states()
        .position(|x| matches!(classify(x, bounds), RegionLabel::Div3 | RegionLabel::Div4));
    let bound_violated = l_empirical.is_some_and(|l| l as u64 > l_bound);
    ReachingReport { d, sigma_step, sigma_raw, l_bound, l_empirical, bound_violated }
}

/// Strict sign alternations of the sampled control per second of run time.
pub fn chattering_metric(traj: &Trajectory) -> f64 {
    let controls: Vec<f64> = traj.sampled_controls().collect();
    let changes = controls
        .windows(2)
        .filter(|w| (w[0] > 0.0 && w[1] < 0.0) || (w[0] < 0.0 && w[1] > 0.0))
        .count();
    let duration = traj.t.last().unwrap() - traj.t.first().unwrap();
    changes as f64 / duration
}

/// Peak adaptive gain `1/(epsilon - |x_k|)` over the sampled states against
/// a constant reference gain. Errors if any sampled state sits outside the
/// barrier set, where the gain is undefined.
pub fn gain_report(
    traj: &Trajectory,
    epsilon: f64,
    reference_gain: f64,
) -> Result<GainReport, ControlError> {
    let mut max_gain = 0.0f64;
    for x in traj.sampled_states() {
        max_gain = max_gain.max(barrier_gain(x, epsilon)?);
    }
    Ok(GainReport { max_barrier_gain: max_gain, reference_gain, ratio: max_gain / reference_gain })
}

/// Check a fine-step (continuous-limit) trajectory against the theoretical
/// ultimate bound. The tail window is the last 20% of the grid and the
/// integration tolerance is `1e-6 * epsilon`.
pub fn continuous_bound_check(traj: &Trajectory, theory: &FinalSetTheory) -> BoundCheck {
    let start = traj.len() - traj.len() / 5;
    let tail_sup = traj.x[start..].iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let tol = 1e-6 * theory.epsilon;
    BoundCheck { pass: tail_sup <= theory.bound + tol, margin: theory.bound + tol - tail_sup, tail_sup }
}
