//! Policies: an entropy-regularised actor-critic learner and a few scripted
//! controllers used when an experiment only exercises the buffers.

mod sac;
mod scripted;

use serde::{Deserialize, Serialize};

pub use sac::{ActorCritic, ActorObjective, SacParams, UpdateStats, LOG_STD_MAX, LOG_STD_MIN};
pub use scripted::ScriptedPolicy;

use crate::env::{EnvParams, Pendulum};
use crate::error::Result;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionMode {
    Stochastic,
    Deterministic,
}

pub trait Policy {
    fn act(&self, observation: &[f64], mode: ActionMode, rng: &mut Rng) -> Result<Vec<f64>>;
}

/// Rolls out `episodes` full episodes in deterministic mode on a fresh
/// pendulum with the given parameters. Returns the mean and population
/// standard deviation of the undiscounted returns.
pub fn evaluate_policy(
    policy: &dyn Policy,
    params: EnvParams,
    episodes: usize,
    max_steps: usize,
    rng: &mut Rng,
) -> Result<(f64, f64)> {
    assert!(episodes >= 1, "evaluation needs at least one episode");
    let mut env = Pendulum::new(params, max_steps, rng);
    let mut returns = Vec::with_capacity(episodes);
    for _ in 0..episodes {
        let mut obs = env.reset(rng);
        let mut total = 0.0;
        loop {
            let action = policy.act(&obs, ActionMode::Deterministic, rng)?;
            let (next, reward, over) = env.step(action[0])?;
            total += reward;
            obs = next;
            if over {
                break;
            }
        }
        returns.push(total);
    }
    let n = returns.len() as f64;
    let mean = returns.iter().sum::<f64>() / n;
    let var = returns.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}
