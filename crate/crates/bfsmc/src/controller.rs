//! The three control laws, all evaluated at sampling instants only.
//!
//! - [`bfa`]: pure barrier law `u = -x / (epsilon - |x|)`, undefined outside
//!   the barrier set. Deliberately not clamped: analysis must be able to see
//!   `|u| > c1` as a tuning failure instead of having it masked.
//! - [`bfsat`]: saturated barrier law, `-c1*sgn(x)` outside the
//!   saturation-onset radius `c1*epsilon/(c1+1)` and the barrier law inside.
//!   Total on the whole line and bounded by `c1`.
//! - [`linear_sat`]: saturated proportional baseline `clamp(-k*x, -c1, c1)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sgn;

#[derive(Debug, Error, PartialEq)]
pub enum ControlError {
    #[error("barrier law evaluated outside its domain: |x| = {x_abs} >= epsilon = {epsilon}")]
    BarrierDomain { x_abs: f64, epsilon: f64 },
}

/// Barrier half-width `epsilon > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierSpec {
    pub epsilon: f64,
}

/// Actuator capacity `c1 > 0`, the hard bound on `|u|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActuatorSpec {
    pub c1: f64,
}

/// Which control law closes the loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ControllerSpec {
    Bfa(BarrierSpec),
    Bfsat(BarrierSpec, ActuatorSpec),
    LinearSat { k: f64, actuator: ActuatorSpec },
}

impl ControllerSpec {
    /// Evaluate the law at a sampled state.
    pub fn eval(&self, x: f64) -> Result<f64, ControlError> {
        match *self {
            ControllerSpec::Bfa(b) => bfa(x, b.epsilon),
            ControllerSpec::Bfsat(b, a) => Ok(bfsat(x, b.epsilon, a.c1)),
            ControllerSpec::LinearSat { k, actuator } => Ok(linear_sat(x, k, actuator.c1)),
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match *self {
            ControllerSpec::Bfa(b) | ControllerSpec::Bfsat(b, _) => Some(b.epsilon),
            ControllerSpec::LinearSat { .. } => None,
        }
    }

    pub fn c1(&self) -> Option<f64> {
        match *self {
            ControllerSpec::Bfa(_) => None,
            ControllerSpec::Bfsat(_, a) | ControllerSpec::LinearSat { actuator: a, .. } => {
                Some(a.c1)
            }
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if let Some(eps) = self.epsilon() {
            if !(eps > 0.0) {
                v.push(format!("controller.epsilon must be positive, got {eps}"));
            }
        }
        if let Some(c1) = self.c1() {
            if !(c1 > 0.0) {
                v.push(format!("controller.c1 must be positive, got {c1}"));
            }
        }
        if let ControllerSpec::LinearSat { k, .. } = *self {
            if !(k > 0.0) {
                v.push(format!("controller.k must be positive, got {k}"));
            }
        }
        v
    }
}

/// Pure barrier law `u = -x / (epsilon - |x|)`, defined for `|x| < epsilon`.
pub fn bfa(x: f64, epsilon: f64) -> Result<f64, ControlError> {
    let a = x.abs();
    if a >= epsilon {
        return Err(ControlError::BarrierDomain { x_abs: a, epsilon });
    }
    Ok(-x / (epsilon - a))
}

/// Saturated barrier law: constant `-c1*sgn(x)` while `|x|` exceeds the
/// saturation-onset radius `x_s = c1*epsilon/(c1+1)`, barrier law inside.
///
/// The two branches agree at `x_s` (`|bfa(x_s)| = c1` exactly), so the law is
/// continuous and `|u| <= c1` everywhere.
pub fn bfsat(x: f64, epsilon: f64, c1: f64) -> f64 {
    let x_s = c1 * epsilon / (c1 + 1.0);
    if x.abs() <= x_s {
        // inside Div 3 or Div 4; never at the pole since x_s < epsilon
        -x / (epsilon - x.abs())
    } else {
        -c1 * sgn(x)
    }
}

/// Saturated proportional baseline `clamp(-k*x, -c1, c1)`.
pub fn linear_sat(x: f64, k: f64, c1: f64) -> f64 {
    (-k * x).clamp(-c1, c1)
}

/// Instantaneous adaptive gain of the barrier law, `1 / (epsilon - |x|)`,
/// so that `bfa(x) = -barrier_gain(x) * x`.
pub fn barrier_gain(x: f64, epsilon: f64) -> Result<f64, ControlError> {
    let a = x.abs();
    if a >= epsilon {
        return Err(ControlError::BarrierDomain { x_abs: a, epsilon });
    }
    Ok(1.0 / (epsilon - a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bfa_examples() {
        assert_eq!(bfa(0.0, 0.01).unwrap(), 0.0);
        assert!((bfa(0.005, 0.01).unwrap() - (-1.0)).abs() < 1e-15);
        for eps in [0.01, 0.5, 3.0] {
            assert!((bfa(-eps / 2.0, eps).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!(bfa(0.01, 0.01).is_err());
        assert!(bfa(0.02, 0.01).is_err());
    }

    #[test]
    fn bfsat_examples() {
        // |x| >= epsilon -> deep in the saturation branch
        assert_eq!(bfsat(0.2, 0.01, 5.0), -5.0);
        assert_eq!(bfsat(0.0, 0.01, 5.0), 0.0);
        // x = 0.005 is inside Div 4 (boundary 0.008148 for delta_bar = 4.4),
        // so the barrier branch applies
        assert!((bfsat(0.005, 0.01, 5.0) - (-1.0)).abs() < 1e-15);
    }

    #[test]
    fn linear_sat_examples() {
        // 17 * (7.5*0.5/8.5) = 7.5: exactly at saturation onset
        let x = 7.5 * 0.5 / 8.5;
        assert!((linear_sat(x, 17.0, 7.5) - (-7.5)).abs() < 1e-12);
        assert_eq!(linear_sat(0.0, 17.0, 7.5), 0.0);
        assert_eq!(linear_sat(-1.0, 17.0, 7.5), 7.5);
    }

    #[test]
    fn barrier_gain_examples() {
        assert!((barrier_gain(0.0, 0.5).unwrap() - 2.0).abs() < 1e-15);
        for eps in [0.01, 0.5] {
            assert!((barrier_gain(eps / 2.0, eps).unwrap() - 2.0 / eps).abs() < 1e-12);
        }
        assert!((barrier_gain(0.3, 0.5).unwrap() - 5.0).abs() < 1e-12);
        assert!(barrier_gain(0.5, 0.5).is_err());
    }

    #[test]
    fn bfsat_continuous_across_saturation_onset() {
        for (eps, c1) in [(0.01, 5.0), (0.5, 7.5), (2.0, 10.0)] {
            let x_s = c1 * eps / (c1 + 1.0);
            let inner = bfa(x_s, eps).unwrap();
            assert!(
                (inner.abs() - c1).abs() / c1 < 1e-12,
                "barrier value at x_s should equal c1: {inner} vs {c1}"
            );
            assert!((bfsat(x_s, eps, c1) - inner).abs() / c1 < 1e-12);
        }
    }

    #[test]
    fn bfsat_bounded_on_dense_grid() {
        let (eps, c1) = (0.01, 5.0);
        for i in -10_000..=10_000 {
            let x = i as f64 * (10.0 * eps) / 10_000.0;
            assert!(bfsat(x, eps, c1).abs() <= c1);
        }
    }

    proptest! {
        #[test]
        fn odd_symmetry(x in -0.009999f64..0.009999) {
            let eps = 0.01;
            prop_assert_eq!(bfa(-x, eps).unwrap(), -bfa(x, eps).unwrap());
            prop_assert_eq!(bfsat(-x, eps, 5.0), -bfsat(x, eps, 5.0));
            prop_assert_eq!(linear_sat(-x, 17.0, 7.5), -linear_sat(x, 17.0, 7.5));
        }

        #[test]
        fn bfa_opposes_the_state(x in -0.49f64..0.49) {
            prop_assert!(bfa(x, 0.5).unwrap() * x <= 0.0);
        }

        #[test]
        fn bfsat_is_bounded_everywhere(x in -1e6f64..1e6) {
            prop_assert!(bfsat(x, 0.5, 7.5).abs() <= 7.5);
        }
    }
}
