use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rng::Rng;

pub const MAX_SPEED: f64 = 8.0;
pub const MAX_TORQUE: f64 = 2.0;

/// Physical constants. Only `length` varies between tasks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvParams {
    pub length: f64,
    pub mass: f64,
    pub gravity: f64,
    pub max_torque: f64,
    pub dt: f64,
}

impl EnvParams {
    pub fn with_length(length: f64) -> Self {
        Self {
            length,
            ..Self::default()
        }
    }
}

impl Default for EnvParams {
    fn default() -> Self {
        Self {
            length: 1.0,
            mass: 1.0,
            gravity: 10.0,
            max_torque: MAX_TORQUE,
            dt: 0.05,
        }
    }
}

/// `theta == 0` is upright.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumState {
    pub theta: f64,
    pub theta_dot: f64,
    pub step_in_episode: usize,
}

impl PendulumState {
    /// `(cos θ, sin θ, θ̇)`
    pub fn observation(&self) -> Vec<f64> {
        vec![self.theta.cos(), self.theta.sin(), self.theta_dot]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub next_state: PendulumState,
    pub reward: f64,
    pub observation: Vec<f64>,
}

/// Maps an angle into `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut wrapped = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if wrapped <= -PI {
        wrapped += 2.0 * PI;
    }
    wrapped
}

/// One semi-implicit Euler step. The torque is clipped to the bound first.
pub fn step(state: &PendulumState, torque: f64, params: &EnvParams) -> Result<StepOutcome> {
    if !(state.theta.is_finite() && state.theta_dot.is_finite() && torque.is_finite()) {
        return Err(Error::NonFinite("pendulum step input".into()));
    }
    if !(params.length > 0.0) {
        return Err(Error::NonFinite(format!("pendulum length {}", params.length)));
    }
    let u = torque.clamp(-params.max_torque, params.max_torque);
    let th = state.theta;
    let thdot = state.theta_dot;
    let (g, m, l, dt) = (params.gravity, params.mass, params.length, params.dt);

    let reward = -(wrap_angle(th).powi(2) + 0.1 * thdot * thdot + 0.001 * u * u);

    let theta_ddot = 3.0 * g / (2.0 * l) * th.sin() + 3.0 / (m * l * l) * u;
    let new_thdot = (thdot + theta_ddot * dt).clamp(-MAX_SPEED, MAX_SPEED);
    let new_th = th + new_thdot * dt;

    let next_state = PendulumState {
        theta: new_th,
        theta_dot: new_thdot,
        step_in_episode: state.step_in_episode + 1,
    };
    Ok(StepOutcome {
        observation: next_state.observation(),
        next_state,
        reward,
    })
}

pub fn reset(rng: &mut Rng) -> PendulumState {
    // (-π, π]
    let theta = PI - 2.0 * PI * rng.uniform();
    let theta_dot = rng.uniform_range(-1.0, 1.0);
    PendulumState {
        theta,
        theta_dot,
        step_in_episode: 0,
    }
}

/// Stateful wrapper with episode bookkeeping.
#[derive(Debug, Clone)]
pub struct Pendulum {
    pub params: EnvParams,
    pub max_steps_per_episode: usize,
    state: PendulumState,
}

impl Pendulum {
    pub fn new(params: EnvParams, max_steps_per_episode: usize, rng: &mut Rng) -> Self {
        Self {
            params,
            max_steps_per_episode,
            state: reset(rng),
        }
    }

    pub fn reset(&mut self, rng: &mut Rng) -> Vec<f64> {
        self.state = reset(rng);
        self.state.observation()
    }

    pub fn state(&self) -> &PendulumState {
        &self.state
    }

    pub fn observation(&self) -> Vec<f64> {
        self.state.observation()
    }

    /// Returns `(observation, reward, episode_over)`.
    pub fn step(&mut self, torque: f64) -> Result<(Vec<f64>, f64, bool)> {
        let out = step(&self.state, torque, &self.params)?;
        self.state = out.next_state;
        let over = self.state.step_in_episode >= self.max_steps_per_episode;
        Ok((out.observation, out.reward, over))
    }
}
