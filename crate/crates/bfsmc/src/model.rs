//! The uncertain scalar plant `x' = g(t,x) * (delta(t,x) + u)` and its signal
//! generators.
//!
//! A plant in the raw form `x' = g*u + zeta` with `|zeta| < zeta_bar` and
//! `0 < g1 <= g <= g2` normalizes to the form above with
//! `delta = zeta / g` and worst-case magnitude `delta_bar = zeta_bar / g1`;
//! see [`normalize_plant`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sgn;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("input-gain lower bound must be positive, got g1 = {0}")]
    NonPositiveGain(f64),
}

/// Input-gain profile `g(t)`, always confined to `[g1, g2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GainProfile {
    Constant { value: f64 },
    /// Square wave switching between the two gain bounds:
    /// `g(t) = g1 + (g2 - g1) * (1 + sgn(sin(3*pi*t))) / 2`.
    PaperSquare { g1: f64, g2: f64 },
}

/// Matched-disturbance generator `delta(t)`.
///
/// All built-in variants depend on time only; the evaluation interface still
/// receives the state and the last sampled state so state-dependent variants
/// can be added without touching the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DisturbanceSpec {
    Zero,
    Constant { value: f64 },
    /// `delta(t) = delta_bar * (0.7*cos(10*(t+t_offset)) + 0.3*sgn(cos(sqrt(2)*(t+t_offset))))`.
    ///
    /// `t_offset` shifts the whole signal in time; it is the knob the phase
    /// sweeps randomize over.
    PaperMix {
        delta_bar: f64,
        #[serde(default)]
        t_offset: f64,
    },
    /// Adversarial escape disturbance of magnitude `varpi`.
    Escape {
        magnitude: f64,
        direction: EscapeDirection,
    },
    /// `delta(t) = amplitude * cos(frequency * t)`, frequency in rad/s.
    Sinusoid { amplitude: f64, frequency: f64 },
}

/// Direction rule for the escape disturbance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EscapeDirection {
    /// `delta = -varpi`, the constant direction used by the sufficiency proof.
    Negative,
    /// `delta = varpi * sgn(x_k)`, pushing away from the origin in the
    /// direction of the most recent sampled state.
    LastSampleSign,
}

impl DisturbanceSpec {
    /// Worst-case magnitude of the signal (`delta_bar` for the mixed signal,
    /// `|value|` for a constant, and so on). `None` for the escape variant,
    /// which is adversarial and not covered by the plant's disturbance bound.
    pub fn bound(&self) -> Option<f64> {
        match *self {
            DisturbanceSpec::Zero => Some(0.0),
            DisturbanceSpec::Constant { value } => Some(value.abs()),
            DisturbanceSpec::PaperMix { delta_bar, .. } => Some(delta_bar),
            DisturbanceSpec::Escape { .. } => None,
            DisturbanceSpec::Sinusoid { amplitude, .. } => Some(amplitude.abs()),
        }
    }
}

/// The normalized plant: gain bounds, a gain profile and a disturbance
/// generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSpec {
    /// Lower input-gain bound, strictly positive.
    pub g1: f64,
    /// Upper input-gain bound, `g2 >= g1`.
    pub g2: f64,
    pub gain_profile: GainProfile,
    pub disturbance: DisturbanceSpec,
}

impl PlantSpec {
    /// Check the structural invariants, returning every violation found.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.g1 > 0.0) {
            v.push(format!("plant.g1 must be positive, got {}", self.g1));
        }
        if !(self.g2 >= self.g1) {
            v.push(format!(
                "plant requires g1 <= g2, got g1 = {}, g2 = {}",
                self.g1, self.g2
            ));
        }
        match self.gain_profile {
            GainProfile::Constant { value } => {
                if !(value >= self.g1 && value <= self.g2) {
                    v.push(format!(
                        "constant gain {} outside [g1, g2] = [{}, {}]",
                        value, self.g1, self.g2
                    ));
                }
            }
            GainProfile::PaperSquare { g1, g2 } => {
                if g1 != self.g1 || g2 != self.g2 {
                    v.push(format!(
                        "square-wave gain bounds ({g1}, {g2}) disagree with plant bounds ({}, {})",
                        self.g1, self.g2
                    ));
                }
            }
        }
        match self.disturbance {
            DisturbanceSpec::PaperMix { delta_bar, .. } if delta_bar < 0.0 => {
                v.push(format!("paper_mix delta_bar must be >= 0, got {delta_bar}"));
            }
            DisturbanceSpec::Escape { magnitude, .. } if magnitude < 0.0 => {
                v.push(format!("escape magnitude must be >= 0, got {magnitude}"));
            }
            _ => {}
        }
        v
    }
}

/// Bounds of the raw (un-normalized) plant `x' = g*u + zeta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawPlantBounds {
    /// Bound on the additive disturbance, `|zeta| < zeta_bar`.
    pub zeta_bar: f64,
    /// Lower input-gain bound.
    pub g1: f64,
}

/// Normalize the raw plant bounds into the matched-disturbance magnitude
/// `delta_bar = zeta_bar / g1`.
pub fn normalize_plant(raw: RawPlantBounds) -> Result<f64, ModelError> {
    if raw.g1 <= 0.0 {
        return Err(ModelError::NonPositiveGain(raw.g1));
    }
    Ok(raw.zeta_bar / raw.g1)
}

/// Evaluate a disturbance generator at time `t`.
///
/// `last_sample_state` is the plant state at the most recent sampling
/// instant; only the escape variant's sign rule looks at it.
pub fn eval_disturbance(spec: &DisturbanceSpec, t: f64, _x: f64, last_sample_state: f64) -> f64 {
    match *spec {
        DisturbanceSpec::Zero => 0.0,
        DisturbanceSpec::Constant { value } => value,
        DisturbanceSpec::PaperMix { delta_bar, t_offset } => {
            let s = t + t_offset;
            delta_bar * (0.7 * (10.0 * s).cos() + 0.3 * sgn((std::f64::consts::SQRT_2 * s).cos()))
        }
        DisturbanceSpec::Escape { magnitude, direction } => match direction {
            EscapeDirection::Negative => -magnitude,
            EscapeDirection::LastSampleSign => magnitude * sgn(last_sample_state),
        },
        DisturbanceSpec::Sinusoid { amplitude, frequency } => amplitude * (frequency * t).cos(),
    }
}

/// Evaluate a gain profile at time `t`.
pub fn eval_gain(profile: &GainProfile, t: f64) -> f64 {
    match *profile {
        GainProfile::Constant { value } => value,
        GainProfile::PaperSquare { g1, g2 } => {
            g1 + (g2 - g1) * (1.0 + sgn((3.0 * std::f64::consts::PI * t).sin())) / 2.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_plant_examples() {
        assert_eq!(normalize_plant(RawPlantBounds { zeta_bar: 0.0, g1: 1.0 }), Ok(0.0));
        assert_eq!(normalize_plant(RawPlantBounds { zeta_bar: 4.4, g1: 1.0 }), Ok(4.4));
        // hand evaluation: 6.6 / 1.5 = 4.4
        let d = normalize_plant(RawPlantBounds { zeta_bar: 6.6, g1: 1.5 }).unwrap();
        assert!((d - 4.4).abs() < 1e-15);
        assert_eq!(
            normalize_plant(RawPlantBounds { zeta_bar: 1.0, g1: 0.0 }),
            Err(ModelError::NonPositiveGain(0.0))
        );
    }

    #[test]
    fn paper_mix_at_zero_hits_the_bound_exactly() {
        let spec = DisturbanceSpec::PaperMix { delta_bar: 4.4, t_offset: 0.0 };
        assert_eq!(eval_disturbance(&spec, 0.0, 0.0, 0.0), 4.4);
    }

    #[test]
    fn paper_mix_hand_evaluation_at_pi_over_ten() {
        // cos(pi) = -1, cos(sqrt(2)*pi/10) = cos(0.444..) > 0,
        // so delta = 4.4 * (-0.7 + 0.3) = -1.76
        let spec = DisturbanceSpec::PaperMix { delta_bar: 4.4, t_offset: 0.0 };
        let d = eval_disturbance(&spec, std::f64::consts::PI / 10.0, 0.0, 0.0);
        assert!((d - (-1.76)).abs() < 1e-12, "got {d}");
    }

    #[test]
    fn constant_disturbance() {
        let spec = DisturbanceSpec::Constant { value: -2.0 };
        assert_eq!(eval_disturbance(&spec, 0.37, 1.0, 0.0), -2.0);
    }

    #[test]
    fn gain_profile_examples() {
        let c = GainProfile::Constant { value: 1.0 };
        assert_eq!(eval_gain(&c, 123.456), 1.0);
        let sq = GainProfile::PaperSquare { g1: 1.0, g2: 1.5 };
        // sin(0.3*pi) > 0 -> upper bound
        assert_eq!(eval_gain(&sq, 0.1), 1.5);
        // sin(1.5*pi) = -1 -> lower bound
        assert_eq!(eval_gain(&sq, 0.5), 1.0);
    }

    #[test]
    fn escape_direction_rules() {
        let neg = DisturbanceSpec::Escape { magnitude: 1.5, direction: EscapeDirection::Negative };
        assert_eq!(eval_disturbance(&neg, 0.0, 0.2, 0.2), -1.5);
        let sgn_rule =
            DisturbanceSpec::Escape { magnitude: 1.5, direction: EscapeDirection::LastSampleSign };
        assert_eq!(eval_disturbance(&sgn_rule, 0.0, 0.0, -0.005), -1.5);
        assert_eq!(eval_disturbance(&sgn_rule, 0.0, 0.0, 0.005), 1.5);
    }

    #[test]
    fn plant_violations_are_itemized() {
        let p = PlantSpec {
            g1: -1.0,
            g2: -2.0,
            gain_profile: GainProfile::Constant { value: 3.0 },
            disturbance: DisturbanceSpec::Zero,
        };
        let v = p.violations();
        assert_eq!(v.len(), 3, "{v:?}");
    }

    proptest! {
        #[test]
        fn non_escape_disturbances_respect_their_bound(t in -100.0f64..100.0, which in 0usize..4) {
            let specs = [
                DisturbanceSpec::Zero,
                DisturbanceSpec::Constant { value: -2.0 },
                DisturbanceSpec::PaperMix { delta_bar: 4.4, t_offset: 0.37 },
                DisturbanceSpec::Sinusoid { amplitude: 1.5, frequency: 3.0 },
            ];
            let spec = specs[which];
            let bound = spec.bound().unwrap();
            let d = eval_disturbance(&spec, t, 0.0, 0.0);
            prop_assert!(d.abs() <= bound);
        }

        #[test]
        fn gain_stays_within_bounds(t in -100.0f64..100.0) {
            let g = eval_gain(&GainProfile::PaperSquare { g1: 1.0, g2: 1.5 }, t);
            prop_assert!((1.0..=1.5).contains(&g));
        }

        #[test]
        fn paper_mix_is_deterministic(t in -100.0f64..100.0) {
            let spec = DisturbanceSpec::PaperMix { delta_bar: 4.4, t_offset: 0.0 };
            let a = eval_disturbance(&spec, t, 0.0, 0.0);
            let b = eval_disturbance(&spec, t, 0.0, 0.0);
            prop_assert!(a.to_bits() == b.to_bits());
        }
    }
}
