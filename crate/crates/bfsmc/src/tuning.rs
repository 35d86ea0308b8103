//! The sampling-period relation among barrier width, actuator capacity and
//! input-gain bound, and the three design tasks it solves: given two of
//! `(epsilon, tau, c1)`, find the admissible range of the third.
//!
//! Two algebraic variants of the relation are exposed:
//!
//! - `Statement`: `tau < epsilon / (g2*c1 + 1)^2` (the default; the
//!   reference parameter set `epsilon = 0.01`, `c1 = 5`, `g2 = 1.5` gives
//!   `tau_max = 1.38408e-4`, matching the sampling period used throughout
//!   the experiments),
//! - `Proof`: `tau < epsilon / (g2*(c1 + 1)^2)`, the form the derivation's
//!   intermediate steps produce.
//!
//! The two coincide at `g2 = 1` and are both exposed because neither is
//! strictly tighter for all parameters; see the README for the discrepancy
//! discussion.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TuningError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("infeasible: sqrt(epsilon/tau) <= 1, no actuator capacity admits this sampling period")]
    Infeasible,
}

/// Which algebraic form of the sampling bound to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaVariant {
    #[default]
    Statement,
    Proof,
}

/// Solutions of the three tuning tasks for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuningResult {
    pub tau_max: f64,
    pub epsilon_min: f64,
    /// Admissible actuator capacities `(delta_bar, c1_max)`, open interval.
    /// `None` when the interval is empty.
    pub c1_interval: Option<(f64, f64)>,
    pub formula_variant: FormulaVariant,
}

fn check_positive(name: &'static str, value: f64) -> Result<(), TuningError> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(TuningError::NonPositive { name, value })
    }
}

/// Maximal admissible sampling period for given barrier width and actuator
/// capacity (discretization task).
pub fn tau_max(
    epsilon: f64,
    c1: f64,
    g2: f64,
    variant: FormulaVariant,
) -> Result<f64, TuningError> {
    check_positive("epsilon", epsilon)?;
    check_positive("c1", c1)?;
    check_positive("g2", g2)?;
    Ok(match variant {
        FormulaVariant::Statement => epsilon / (g2 * c1 + 1.0).powi(2),
        FormulaVariant::Proof => epsilon / (g2 * (c1 + 1.0).powi(2)),
    })
}

/// Minimal admissible barrier width for given sampling period and actuator
/// capacity (design task); exact algebraic inverse of [`tau_max`] in
/// `epsilon`.
pub fn epsilon_min(
    tau: f64,
    c1: f64,
    g2: f64,
    variant: FormulaVariant,
) -> Result<f64, TuningError> {
    check_positive("tau", tau)?;
    check_positive("c1", c1)?;
    check_positive("g2", g2)?;
    Ok(match variant {
        FormulaVariant::Statement => tau * (g2 * c1 + 1.0).powi(2),
        FormulaVariant::Proof => tau * g2 * (c1 + 1.0).powi(2),
    })
}

/// Admissible actuator capacities for given barrier width and sampling
/// period (feasibility task).
///
/// The lower endpoint is the disturbance bound (the actuator must dominate
/// the disturbance); the sampling relation imposes the upper endpoint
/// (larger actuators demand faster sampling). Returns the open interval
/// `(delta_bar, c1_max)`, or `Err(Infeasible)` when no capacity at all can
/// satisfy the relation, and `Ok(None)` when the relation caps `c1` below
/// `delta_bar`.
pub fn c1_range(
    epsilon: f64,
    tau: f64,
    g2: f64,
    delta_bar: f64,
    variant: FormulaVariant,
) -> Result<Option<(f64, f64)>, TuningError> {
    check_positive("epsilon", epsilon)?;
    check_positive("tau", tau)?;
    check_positive("g2", g2)?;
    let c1_max = match variant {
        FormulaVariant::Statement => {
            let root = (epsilon / tau).sqrt();
            if root <= 1.0 {
                return Err(TuningError::Infeasible);
            }
            (root - 1.0) / g2
        }
        FormulaVariant::Proof => {
            let root = (epsilon / (g2 * tau)).sqrt();
            if root <= 1.0 {
                return Err(TuningError::Infeasible);
            }
            root - 1.0
        }
    };
    if delta_bar < c1_max {
        Ok(Some((delta_bar, c1_max)))
    } else {
        Ok(None)
    }
}

/// Solve all three tasks at once.
pub fn solve(
    epsilon: f64,
    tau: f64,
    c1: f64,
    g2: f64,
    delta_bar: f64,
    variant: FormulaVariant,
) -> Result<TuningResult, TuningError> {
    Ok(TuningResult {
        tau_max: tau_max(epsilon, c1, g2, variant)?,
        epsilon_min: epsilon_min(tau, c1, g2, variant)?,
        c1_interval: c1_range(epsilon, tau, g2, delta_bar, variant)?,
        formula_variant: variant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use FormulaVariant::{Proof, Statement};

    #[test]
    fn tau_max_reference_values() {
        // 0.01 / 8.5^2
        let t = tau_max(0.01, 5.0, 1.5, Statement).unwrap();
        assert!((t - 1.38408e-4).abs() / 1.38408e-4 < 1e-5, "t = {t}");
        // 0.01 / (1.5 * 36)
        let t = tau_max(0.01, 5.0, 1.5, Proof).unwrap();
        assert!((t - 1.85185e-4).abs() / 1.85185e-4 < 1e-5, "t = {t}");
        // g2 -> 0+: statement denominator -> 1
        let t = tau_max(0.01, 5.0, 1e-12, Statement).unwrap();
        assert!((t - 0.01).abs() < 1e-12);
        assert!(tau_max(0.0, 5.0, 1.5, Statement).is_err());
    }

    #[test]
    fn epsilon_min_examples() {
        let e = epsilon_min(1.38408e-4, 5.0, 1.5, Statement).unwrap();
        assert!((e - 0.01).abs() < 1e-7, "e = {e}");
        // linear-comparison parameters: 0.0062 * 72.25 = 0.448 < 0.5
        let e = epsilon_min(0.0062, 7.5, 1.0, Statement).unwrap();
        assert!((e - 0.0062 * 72.25).abs() < 1e-12);
        assert!(e < 0.5);
    }

    #[test]
    fn round_trip_is_exact() {
        for variant in [Statement, Proof] {
            for (tau, c1, g2) in [(1e-4, 5.0, 1.5), (0.0062, 7.5, 1.0), (3e-3, 2.0, 0.7)] {
                let eps = epsilon_min(tau, c1, g2, variant).unwrap();
                let t = tau_max(eps, c1, g2, variant).unwrap();
                assert!((t - tau).abs() / tau < 1e-12);
            }
        }
    }

    #[test]
    fn c1_range_examples() {
        let (lo, hi) = c1_range(0.5, 0.0062, 1.0, 3.0, Statement).unwrap().unwrap();
        assert_eq!(lo, 3.0);
        assert!((hi - 7.9803).abs() < 1e-4, "hi = {hi}");
        // the experiments' c1 = 7.5 lies inside
        assert!(lo < 7.5 && 7.5 < hi);

        let (lo, hi) = c1_range(0.01, 1.38408e-4, 1.5, 4.4, Statement).unwrap().unwrap();
        assert_eq!(lo, 4.4);
        assert!((hi - 5.0).abs() < 1e-4, "hi = {hi}");

        // tau = epsilon: sqrt(1) - 1 = 0, no feasible capacity
        assert_eq!(c1_range(0.01, 0.01, 1.0, 1.0, Statement), Err(TuningError::Infeasible));
    }

    #[test]
    fn empty_interval_when_actuator_cap_below_disturbance() {
        // c1_max = (sqrt(0.01/1e-3) - 1)/1 ~ 2.16 < delta_bar
        assert_eq!(c1_range(0.01, 1e-3, 1.0, 3.0, Statement).unwrap(), None);
    }

    #[test]
    fn monotonicity_on_grid() {
        let mut prev_c1 = f64::INFINITY;
        for i in 1..=50 {
            let c1 = 0.5 * i as f64;
            let t = tau_max(0.01, c1, 1.5, Statement).unwrap();
            assert!(t < prev_c1);
            prev_c1 = t;
        }
        let mut prev_g2 = f64::INFINITY;
        for i in 1..=50 {
            let g2 = 0.1 * i as f64;
            let t = tau_max(0.01, 5.0, g2, Statement).unwrap();
            assert!(t < prev_g2);
            prev_g2 = t;
        }
        // linear in epsilon
        let a = tau_max(0.01, 5.0, 1.5, Statement).unwrap();
        let b = tau_max(0.02, 5.0, 1.5, Statement).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-18);
    }

    #[test]
    fn variant_ordering_flips_at_unit_gain() {
        // (g2 c1 + 1)^2 - g2 (c1 + 1)^2 factors as (g2 - 1)(c1^2 g2 - 1), so
        // the statement bound is the tighter one exactly when that product is
        // nonnegative, with equality at g2 = 1 and at g2 = 1/c1^2
        for g2 in [0.2, 0.5, 0.9, 1.0, 1.2, 1.5, 3.0] {
            for c1 in [0.5, 1.0, 2.0, 5.0, 10.0] {
                let s = tau_max(0.01, c1, g2, Statement).unwrap();
                let p = tau_max(0.01, c1, g2, Proof).unwrap();
                let q = (g2 - 1.0) * (c1 * c1 * g2 - 1.0);
                if q >= 0.0 {
                    assert!(s <= p + 1e-18, "g2 = {g2}, c1 = {c1}");
                } else {
                    assert!(s >= p - 1e-18, "g2 = {g2}, c1 = {c1}");
                }
            }
        }
        // equality at unit gain
        let s = tau_max(0.01, 5.0, 1.0, Statement).unwrap();
        let p = tau_max(0.01, 5.0, 1.0, Proof).unwrap();
        assert_eq!(s, p);
    }

    #[test]
    fn admissible_tau_keeps_region_decomposition_consistent() {
        // any tau strictly inside the statement bound coexists with a valid
        // region decomposition x_F < x_S < epsilon
        for (eps, c1, g2, db) in [(0.01, 5.0, 1.5, 4.4), (0.5, 7.5, 1.0, 3.0)] {
            let t_max = tau_max(eps, c1, g2, Statement).unwrap();
            let tau = 0.99 * t_max;
            assert!(tau > 0.0);
            let b = crate::regions::bounds(eps, c1, db).unwrap();
            assert!(b.x_f < b.x_s && b.x_s < b.epsilon);
        }
    }
}
