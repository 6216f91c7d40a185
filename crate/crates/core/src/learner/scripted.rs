use serde::{Deserialize, Serialize};

use super::{ActionMode, Policy};
use crate::env::MAX_TORQUE;
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Fixed controllers for the pendulum (observation `(cos θ, sin θ, θ̇)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScriptedPolicy {
    /// Torque uniform in `[-2, 2]`, in both modes.
    UniformRandom,
    ZeroTorque,
    /// Bang-bang energy pumping far from upright, PD control near it.
    EnergySwingup,
}

impl Policy for ScriptedPolicy {
    fn act(&self, observation: &[f64], _mode: ActionMode, rng: &mut Rng) -> Result<Vec<f64>> {
        if observation.len() != 3 {
            return Err(Error::DimensionMismatch {
                context: "scripted policy observation",
                expected: 3,
                actual: observation.len(),
            });
        }
        let u = match self {
            ScriptedPolicy::UniformRandom => rng.uniform_range(-MAX_TORQUE, MAX_TORQUE),
            ScriptedPolicy::ZeroTorque => 0.0,
            ScriptedPolicy::EnergySwingup => {
                let (cos, sin, theta_dot) = (observation[0], observation[1], observation[2]);
                let theta = sin.atan2(cos);
                if cos > 0.85 {
                    -(10.0 * theta + 2.0 * theta_dot)
                } else {
                    // ½θ̇² + 15 cos θ is conserved for the unit-length pole
                    // and equals 15 at the upright rest point.
                    let energy = 0.5 * theta_dot * theta_dot + 15.0 * cos;
                    let push = (15.0 - energy) * theta_dot;
                    if push == 0.0 {
                        MAX_TORQUE
                    } else {
                        MAX_TORQUE * push.signum()
                    }
                }
            }
        };
        Ok(vec![u.clamp(-MAX_TORQUE, MAX_TORQUE)])
    }
}
