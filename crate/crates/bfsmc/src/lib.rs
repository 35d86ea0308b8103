//! Sampled-data closed-loop simulation laboratory for barrier-function
//! adaptive sliding-mode control (BFASMC).
//!
//! The crate simulates the scalar uncertain plant
//! `x' = g(t,x) * (delta(t,x) + u)` under zero-order hold: the controller is
//! evaluated only at uniform sampling instants `t_k = t0 + k*tau`, while the
//! plant evolves open-loop in between on a fast fixed-step inner grid.
//!
//! On top of the simulator:
//!
//! - [`tuning`] solves the (epsilon, tau, c1) design tasks from the sampling
//!   bound `tau < epsilon / (g2*c1 + 1)^2`,
//! - [`adversary`] constructs bounded disturbances that expel the state from
//!   the barrier set within one sampling interval,
//! - [`analysis`] post-processes trajectories into invariance, reaching,
//!   chattering and gain-overestimation reports,
//! - [`cli`] provides config ingestion, figure-reproduction presets and
//!   parameter sweeps.

// validation uses `!(x > 0.0)` on purpose: unlike `x <= 0.0` it also rejects
// NaN inputs
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod analysis;
pub mod cli;
pub mod controller;
pub mod model;
pub mod regions;
pub mod simengine;
pub mod tuning;

/// Symmetric sign convention used by every switching signal in the crate:
/// `sgn(0) = 0`.
///
/// The square-wave signals and the saturated control law all switch through
/// zero on a measure-zero set, but the convention must be fixed for the
/// simulator to be deterministic.
#[inline]
pub fn sgn(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::sgn;

    #[test]
    fn sign_convention_is_symmetric() {
        assert_eq!(sgn(3.5), 1.0);
        assert_eq!(sgn(-1e-300), -1.0);
        assert_eq!(sgn(0.0), 0.0);
        assert_eq!(sgn(-0.0), 0.0);
    }
}
