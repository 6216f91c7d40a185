//! Soft actor-critic with twin critics, target networks and a learned
//! temperature, differentiated by hand.
//!
//! The policy network maps a scaled observation to `(mean, log_std)` per
//! action dimension; `log_std` is clamped to `[LOG_STD_MIN, LOG_STD_MAX]`.
//! Actions are `bound · tanh(mean + std·ε)`. Critics see the scaled
//! observation concatenated with `action / bound`.

use super::{ActionMode, Policy};
use crate::error::{Error, Result};
use crate::nn::{Adam, Mlp, Trace};
use crate::rng::Rng;
use crate::transition::Transition;

pub const LOG_STD_MIN: f64 = -20.0;
pub const LOG_STD_MAX: f64 = 2.0;
const SQUASH_EPS: f64 = 1e-6;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, PartialEq)]
pub struct SacParams {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub gamma: f64,
    pub tau: f64,
    /// Defaults to `-action_dim`.
    pub entropy_target: Option<f64>,
    pub initial_alpha: f64,
}

impl Default for SacParams {
    fn default() -> Self {
        Self {
            hidden: vec![32, 32],
            learning_rate: 1e-3,
            gamma: 0.99,
            tau: 0.005,
            entropy_target: None,
            initial_alpha: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateStats {
    pub critic_loss: f64,
    pub actor_loss: f64,
    pub alpha: f64,
}

pub struct ActorObjective {
    pub loss: f64,
    pub mean_log_prob: f64,
    pub grads: Vec<f64>,
}

struct PolicySample {
    trace: Trace,
    noise: Vec<f64>,
    std: Vec<f64>,
    squashed: Vec<f64>,
    log_std_active: Vec<bool>,
    log_prob: f64,
}

#[derive(Debug, Clone)]
pub struct ActorCritic {
    obs_scale: Vec<f64>,
    action_dim: usize,
    action_bound: f64,
    policy: Mlp,
    policy_opt: Adam,
    critics: [Mlp; 2],
    critic_opts: [Adam; 2],
    targets: [Mlp; 2],
    log_alpha: f64,
    alpha_opt: Adam,
    gamma: f64,
    tau: f64,
    entropy_target: f64,
}

fn with_hidden(input: usize, hidden: &[usize], output: usize) -> Vec<usize> {
    let mut sizes = vec![input];
    sizes.extend_from_slice(hidden);
    sizes.push(output);
    sizes
}

impl ActorCritic {
    pub fn new(
        obs_scale: Vec<f64>,
        action_dim: usize,
        action_bound: f64,
        params: &SacParams,
        rng: &mut Rng,
    ) -> Result<Self> {
        let obs_dim = obs_scale.len();
        let policy = Mlp::new(&with_hidden(obs_dim, &params.hidden, 2 * action_dim), rng)?;
        let critic_sizes = with_hidden(obs_dim + action_dim, &params.hidden, 1);
        let critics = [Mlp::new(&critic_sizes, rng)?, Mlp::new(&critic_sizes, rng)?];
        let lr = params.learning_rate;
        Ok(Self {
            policy_opt: Adam::for_net(&policy, lr),
            critic_opts: [Adam::for_net(&critics[0], lr), Adam::for_net(&critics[1], lr)],
            targets: critics.clone(),
            critics,
            policy,
            obs_scale,
            action_dim,
            action_bound,
            log_alpha: params.initial_alpha.ln(),
            alpha_opt: Adam::new(1, lr),
            gamma: params.gamma,
            tau: params.tau,
            entropy_target: params.entropy_target.unwrap_or(-(action_dim as f64)),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.log_alpha.exp()
    }

    pub fn entropy_target(&self) -> f64 {
        self.entropy_target
    }

    pub fn policy_net(&self) -> &Mlp {
        &self.policy
    }

    pub fn policy_net_mut(&mut self) -> &mut Mlp {
        &mut self.policy
    }

    pub fn critics(&self) -> &[Mlp; 2] {
        &self.critics
    }

    pub fn critics_mut(&mut self) -> &mut [Mlp; 2] {
        &mut self.critics
    }

    pub fn targets(&self) -> &[Mlp; 2] {
        &self.targets
    }

    pub fn targets_mut(&mut self) -> &mut [Mlp; 2] {
        &mut self.targets
    }

    fn scale_obs(&self, obs: &[f64]) -> Result<Vec<f64>> {
        if obs.len() != self.obs_scale.len() {
            return Err(Error::DimensionMismatch {
                context: "policy observation",
                expected: self.obs_scale.len(),
                actual: obs.len(),
            });
        }
        Ok(obs.iter().zip(&self.obs_scale).map(|(x, k)| x / k).collect())
    }

    fn sample_policy(&self, obs_scaled: &[f64], noise: &[f64]) -> Result<PolicySample> {
        let d = self.action_dim;
        let trace = self.policy.forward_trace(obs_scaled)?;
        let out = trace.output();
        let mut std = Vec::with_capacity(d);
        let mut squashed = Vec::with_capacity(d);
        let mut log_std_active = Vec::with_capacity(d);
        let mut log_prob = 0.0;
        for j in 0..d {
            let raw = out[d + j];
            let log_std = raw.clamp(LOG_STD_MIN, LOG_STD_MAX);
            log_std_active.push(raw > LOG_STD_MIN && raw < LOG_STD_MAX);
            let s = log_std.exp();
            let u = out[j] + s * noise[j];
            let t = u.tanh();
            log_prob += -0.5 * noise[j] * noise[j] - log_std - HALF_LN_2PI
                - (1.0 - t * t + SQUASH_EPS).ln()
                - self.action_bound.ln();
            std.push(s);
            squashed.push(t);
        }
        Ok(PolicySample {
            trace,
            noise: noise.to_vec(),
            std,
            squashed,
            log_std_active,
            log_prob,
        })
    }

    fn draw_noise(&self, rng: &mut Rng) -> Vec<f64> {
        (0..self.action_dim).map(|_| rng.normal()).collect()
    }

    fn critic_input(obs_scaled: &[f64], squashed: &[f64]) -> Vec<f64> {
        [obs_scaled, squashed].concat()
    }

    pub fn select_action(&self, observation: &[f64], mode: ActionMode, rng: &mut Rng) -> Result<Vec<f64>> {
        let obs = self.scale_obs(observation)?;
        let squashed = match mode {
            ActionMode::Deterministic => {
                let out = self.policy.forward(&obs)?;
                out[..self.action_dim].iter().map(|m| m.tanh()).collect::<Vec<_>>()
            }
            ActionMode::Stochastic => {
                let noise = self.draw_noise(rng);
                self.sample_policy(&obs, &noise)?.squashed
            }
        };
        Ok(squashed
            .into_iter()
            .map(|t| (self.action_bound * t).clamp(-self.action_bound, self.action_bound))
            .collect())
    }

    /// Soft TD targets `r + γ(1−done)(min Q̄(s', a') − α log π(a'|s'))` with
    /// `a'` drawn using the given standard-normal `noise` per sample.
    pub fn td_targets(&self, batch: &[&Transition], noise: &[Vec<f64>]) -> Result<Vec<f64>> {
        let alpha = self.alpha();
        batch
            .iter()
            .zip(noise)
            .map(|(tr, eps)| {
                let next = self.scale_obs(&tr.next_state)?;
                let sample = self.sample_policy(&next, eps)?;
                let input = Self::critic_input(&next, &sample.squashed);
                let q1 = self.targets[0].forward(&input)?[0];
                let q2 = self.targets[1].forward(&input)?[0];
                let not_done = if tr.done { 0.0 } else { 1.0 };
                Ok(tr.reward + self.gamma * not_done * (q1.min(q2) - alpha * sample.log_prob))
            })
            .collect()
    }

    /// Actor loss `mean(α·log π(ã|s) − min Q(s, ã))` with reparameterised
    /// actions `ã` built from `noise`, and its gradient w.r.t. the policy
    /// parameters. Critics and `α` are held fixed.
    pub fn actor_objective(&self, batch: &[&Transition], noise: &[Vec<f64>]) -> Result<ActorObjective> {
        let n = batch.len() as f64;
        let alpha = self.alpha();
        let d = self.action_dim;
        let mut grads = vec![0.0; self.policy.num_params()];
        let mut loss = 0.0;
        let mut mean_log_prob = 0.0;
        for (tr, eps) in batch.iter().zip(noise) {
            let obs = self.scale_obs(&tr.state)?;
            let s = self.sample_policy(&obs, eps)?;
            let input = Self::critic_input(&obs, &s.squashed);
            let t1 = self.critics[0].forward_trace(&input)?;
            let t2 = self.critics[1].forward_trace(&input)?;
            let (q, critic, trace) = if t1.output()[0] <= t2.output()[0] {
                (t1.output()[0], &self.critics[0], &t1)
            } else {
                (t2.output()[0], &self.critics[1], &t2)
            };
            let mut scratch = vec![0.0; critic.num_params()];
            let dq_dinput = critic.backward(trace, &[1.0], &mut scratch)?;
            let dq_dt = &dq_dinput[obs.len()..];

            loss += (alpha * s.log_prob - q) / n;
            mean_log_prob += s.log_prob / n;

            let mut d_out = vec![0.0; 2 * d];
            for j in 0..d {
                let t = s.squashed[j];
                let one_minus = 1.0 - t * t;
                let dlogp_du = 2.0 * t * one_minus / (one_minus + SQUASH_EPS);
                let dl_du = alpha * dlogp_du - dq_dt[j] * one_minus;
                d_out[j] = dl_du / n;
                if s.log_std_active[j] {
                    d_out[d + j] = (-alpha + dl_du * s.std[j] * s.noise[j]) / n;
                }
            }
            self.policy.backward(&s.trace, &d_out, &mut grads)?;
        }
        Ok(ActorObjective {
            loss,
            mean_log_prob,
            grads,
        })
    }

    /// One gradient step each for both critics, the actor and the
    /// temperature, then Polyak-averages the target critics.
    pub fn update(&mut self, batch: &[&Transition], rng: &mut Rng) -> Result<UpdateStats> {
        if batch.is_empty() {
            return Err(Error::EmptyBuffer);
        }
        let n = batch.len() as f64;

        // critics
        let next_noise: Vec<Vec<f64>> = batch.iter().map(|_| self.draw_noise(rng)).collect();
        let targets = self.td_targets(batch, &next_noise)?;
        let mut critic_loss = 0.0;
        for c in 0..2 {
            let mut grads = vec![0.0; self.critics[c].num_params()];
            let mut loss = 0.0;
            for (tr, &y) in batch.iter().zip(&targets) {
                if tr.action.len() != self.action_dim {
                    return Err(Error::DimensionMismatch {
                        context: "transition action",
                        expected: self.action_dim,
                        actual: tr.action.len(),
                    });
                }
                let obs = self.scale_obs(&tr.state)?;
                let act: Vec<f64> = tr.action.iter().map(|a| a / self.action_bound).collect();
                let trace = self.critics[c].forward_trace(&Self::critic_input(&obs, &act))?;
                let err = trace.output()[0] - y;
                loss += err * err / n;
                self.critics[c].backward(&trace, &[2.0 * err / n], &mut grads)?;
            }
            self.critic_opts[c].step_net(&mut self.critics[c], &grads)?;
            critic_loss += 0.5 * loss;
        }

        // actor
        let noise: Vec<Vec<f64>> = batch.iter().map(|_| self.draw_noise(rng)).collect();
        let actor = self.actor_objective(batch, &noise)?;
        let (actor_loss, mean_log_prob, policy_grads) = (actor.loss, actor.mean_log_prob, actor.grads);
        self.policy_opt.step_net(&mut self.policy, &policy_grads)?;

        // temperature
        let mut log_alpha = [self.log_alpha];
        self.alpha_opt
            .step(&mut log_alpha, &[-(mean_log_prob + self.entropy_target)])?;
        self.log_alpha = log_alpha[0];

        for (target, online) in self.targets.iter_mut().zip(&self.critics) {
            target.soft_update_from(online, self.tau);
        }

        let stats = UpdateStats {
            critic_loss,
            actor_loss,
            alpha: self.alpha(),
        };
        if !(stats.critic_loss.is_finite() && stats.actor_loss.is_finite() && stats.alpha.is_finite()) {
            return Err(Error::NonFinite(format!("learner update produced {stats:?}")));
        }
        Ok(stats)
    }
}

impl Policy for ActorCritic {
    fn act(&self, observation: &[f64], mode: ActionMode, rng: &mut Rng) -> Result<Vec<f64>> {
        self.select_action(observation, mode, rng)
    }
}
