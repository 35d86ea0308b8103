//! Four-region decomposition of the state space around the barrier set.
//!
//! For barrier half-width `epsilon`, actuator capacity `c1` and disturbance
//! bound `delta_bar < c1` the line splits (symmetrically in `|x|`) into:
//!
//! - Div 4: `|x| <= x_F = delta_bar*epsilon/(delta_bar+1)` — the final set,
//! - Div 3: `x_F < |x| <= x_S = c1*epsilon/(c1+1)` — control authority
//!   exceeds the disturbance,
//! - Div 2: `x_S < |x| < epsilon` — the barrier law would exceed `c1`,
//! - Div 1: `|x| >= epsilon` — outside the barrier, where the barrier law
//!   flips sign.
//!
//! Boundaries are closed on the inner side so the barrier law is never
//! classified onto its pole at `|x| = epsilon`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RegionError {
    #[error("infeasible decomposition: requires 0 <= delta_bar < c1, got delta_bar = {delta_bar}, c1 = {c1}")]
    Infeasible { delta_bar: f64, c1: f64 },
    #[error("barrier half-width must be positive, got epsilon = {0}")]
    NonPositiveEpsilon(f64),
}

/// Boundaries of the decomposition for one `(epsilon, c1, delta_bar)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionBounds {
    pub epsilon: f64,
    /// Final-set radius `delta_bar*epsilon/(delta_bar+1)` (Div 4 boundary).
    pub x_f: f64,
    /// Saturation-onset radius `c1*epsilon/(c1+1)` (Div 2/Div 3 boundary).
    pub x_s: f64,
}

/// Region label; the integer code is what trajectory CSVs carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegionLabel {
    Div1,
    Div2,
    Div3,
    Div4,
}

impl RegionLabel {
    pub fn code(self) -> u8 {
        match self {
            RegionLabel::Div1 => 1,
            RegionLabel::Div2 => 2,
            RegionLabel::Div3 => 3,
            RegionLabel::Div4 => 4,
        }
    }
}

/// Compute the region boundaries.
///
/// Requires `0 <= delta_bar < c1` (a weaker actuator cannot dominate the
/// disturbance and the decomposition collapses). `delta_bar = 0` is accepted
/// as the degenerate limit `x_F = 0`.
pub fn bounds(epsilon: f64, c1: f64, delta_bar: f64) -> Result<RegionBounds, RegionError> {
    if !(epsilon > 0.0) {
        return Err(RegionError::NonPositiveEpsilon(epsilon));
    }
    if !(delta_bar >= 0.0 && delta_bar < c1) {
        return Err(RegionError::Infeasible { delta_bar, c1 });
    }
    Ok(RegionBounds {
        epsilon,
        x_f: delta_bar * epsilon / (delta_bar + 1.0),
        x_s: c1 * epsilon / (c1 + 1.0),
    })
}

/// Classify a state into its region. Boundary points belong to the inner
/// (smaller-`|x|`) region; `|x| = epsilon` belongs to Div 1.
pub fn classify(x: f64, b: &RegionBounds) -> RegionLabel {
    let a = x.abs();
    if a <= b.x_f {
        RegionLabel::Div4
    } else if a <= b.x_s {
        RegionLabel::Div3
    } else if a < b.epsilon {
        RegionLabel::Div2
    } else {
        RegionLabel::Div1
    }
}
