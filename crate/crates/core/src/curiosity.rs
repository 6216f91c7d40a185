//! Online curiosity: the weighted prediction error of forward, inverse and
//! reward models, averaged over an ensemble.
//!
//! For a transition `(s, a, r, s')` bundle `i` contributes
//! `w_fwd·MSE(f(s,a), s') + w_inv·MSE(g(s,s'), a) + w_rwd·(h(s,a) − r)²` and
//! the curiosity is the mean over bundles. Inputs and targets are divided by
//! fixed per-environment scales first. Heads with zero weight are never
//! built, evaluated or trained.
//!
//! The estimator trains on its own FIFO of recent transitions. `observe`
//! scores a transition *before* learning from it.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{Adam, Mlp};
use crate::rng::Rng;
use crate::transition::Transition;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuriosityWeights {
    pub forward: f64,
    pub inverse: f64,
    pub reward: f64,
}

impl CuriosityWeights {
    pub fn new(forward: f64, inverse: f64, reward: f64) -> Self {
        Self {
            forward,
            inverse,
            reward,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let w = [self.forward, self.inverse, self.reward];
        if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::ConfigInvalid("curiosity weights must be finite and non-negative".into()));
        }
        if w.iter().all(|&x| x == 0.0) {
            return Err(Error::ConfigInvalid("at least one curiosity weight must be positive".into()));
        }
        Ok(())
    }
}

/// Divisors applied to states, actions and rewards before they reach a
/// predictor.
#[derive(Debug, Clone, PartialEq)]
pub struct Scales {
    pub state: Vec<f64>,
    pub action: Vec<f64>,
    pub reward: f64,
}

impl Scales {
    pub fn unit(state_dim: usize, action_dim: usize) -> Self {
        Self {
            state: vec![1.0; state_dim],
            action: vec![1.0; action_dim],
            reward: 1.0,
        }
    }

    /// `(cos θ, sin θ, θ̇)` observations, torque in `[-2, 2]`, rewards in
    /// `[-(π² + 6.4 + 0.004), 0]`.
    pub fn pendulum() -> Self {
        Self {
            state: vec![1.0, 1.0, crate::env::MAX_SPEED],
            action: vec![crate::env::MAX_TORQUE],
            reward: std::f64::consts::PI.powi(2) + 0.1 * 64.0 + 0.001 * 4.0,
        }
    }

    fn state(&self, s: &[f64]) -> Vec<f64> {
        s.iter().zip(&self.state).map(|(x, k)| x / k).collect()
    }

    fn action(&self, a: &[f64]) -> Vec<f64> {
        a.iter().zip(&self.action).map(|(x, k)| x / k).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CuriosityParams {
    pub weights: CuriosityWeights,
    pub ensemble_size: usize,
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub fifo_capacity: usize,
}

impl Default for CuriosityParams {
    fn default() -> Self {
        Self {
            weights: CuriosityWeights::new(0.0, 1.0, 0.0),
            ensemble_size: 3,
            hidden: vec![32, 32],
            learning_rate: 3e-4,
            batch_size: 64,
            fifo_capacity: 2000,
        }
    }
}

#[derive(Debug, Clone)]
struct Head {
    net: Mlp,
    opt: Adam,
}

impl Head {
    fn new(input: usize, output: usize, hidden: &[usize], lr: f64, rng: &mut Rng) -> Result<Self> {
        let mut sizes = Vec::with_capacity(hidden.len() + 2);
        sizes.push(input);
        sizes.extend_from_slice(hidden);
        sizes.push(output);
        let net = Mlp::new(&sizes, rng)?;
        let opt = Adam::for_net(&net, lr);
        Ok(Self { net, opt })
    }
}

#[derive(Debug, Clone)]
struct Bundle {
    forward: Option<Head>,
    inverse: Option<Head>,
    reward: Option<Head>,
}

/// Pre-scaled predictor inputs and targets for one transition.
struct Sample {
    state_action: Vec<f64>,
    state_pair: Vec<f64>,
    next_state: Vec<f64>,
    action: Vec<f64>,
    reward: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct CuriosityEstimator {
    bundles: Vec<Bundle>,
    weights: CuriosityWeights,
    scales: Scales,
    state_dim: usize,
    action_dim: usize,
    batch_size: usize,
    fifo: VecDeque<Transition>,
    fifo_capacity: usize,
}

impl CuriosityEstimator {
    pub fn new(
        params: &CuriosityParams,
        state_dim: usize,
        action_dim: usize,
        scales: Scales,
        rng: &mut Rng,
    ) -> Result<Self> {
        params.weights.validate()?;
        if params.ensemble_size == 0 {
            return Err(Error::ConfigInvalid("curiosity.ensemble_size must be at least 1".into()));
        }
        if scales.state.len() != state_dim || scales.action.len() != action_dim {
            return Err(Error::DimensionMismatch {
                context: "curiosity scales",
                expected: state_dim + action_dim,
                actual: scales.state.len() + scales.action.len(),
            });
        }
        let w = params.weights;
        let lr = params.learning_rate;
        let h = &params.hidden;
        let mut bundles = Vec::with_capacity(params.ensemble_size);
        for _ in 0..params.ensemble_size {
            bundles.push(Bundle {
                forward: (w.forward > 0.0)
                    .then(|| Head::new(state_dim + action_dim, state_dim, h, lr, rng))
                    .transpose()?,
                inverse: (w.inverse > 0.0)
                    .then(|| Head::new(2 * state_dim, action_dim, h, lr, rng))
                    .transpose()?,
                reward: (w.reward > 0.0)
                    .then(|| Head::new(state_dim + action_dim, 1, h, lr, rng))
                    .transpose()?,
            });
        }
        Ok(Self {
            bundles,
            weights: w,
            scales,
            state_dim,
            action_dim,
            batch_size: params.batch_size,
            fifo: VecDeque::with_capacity(params.fifo_capacity.min(1 << 20)),
            fifo_capacity: params.fifo_capacity,
        })
    }

    pub fn weights(&self) -> CuriosityWeights {
        self.weights
    }

    pub fn ensemble_size(&self) -> usize {
        self.bundles.len()
    }

    pub fn fifo_len(&self) -> usize {
        self.fifo.len()
    }

    /// Flattened parameters of every forward / inverse / reward head, for
    /// inspecting which heads moved.
    pub fn head_params(&self) -> [Vec<f64>; 3] {
        let mut out: [Vec<f64>; 3] = Default::default();
        for b in &self.bundles {
            for (slot, head) in out.iter_mut().zip([&b.forward, &b.inverse, &b.reward]) {
                if let Some(h) = head {
                    slot.extend_from_slice(h.net.params());
                }
            }
        }
        out
    }

    /// Direct access to the networks of bundle `index` as
    /// `(forward, inverse, reward)`.
    pub fn nets_mut(&mut self, index: usize) -> (Option<&mut Mlp>, Option<&mut Mlp>, Option<&mut Mlp>) {
        let b = &mut self.bundles[index];
        (
            b.forward.as_mut().map(|h| &mut h.net),
            b.inverse.as_mut().map(|h| &mut h.net),
            b.reward.as_mut().map(|h| &mut h.net),
        )
    }

    fn prepare(&self, tr: &Transition) -> Result<Sample> {
        for (context, expected, actual) in [
            ("curiosity state", self.state_dim, tr.state.len()),
            ("curiosity next state", self.state_dim, tr.next_state.len()),
            ("curiosity action", self.action_dim, tr.action.len()),
        ] {
            if expected != actual {
                return Err(Error::DimensionMismatch {
                    context,
                    expected,
                    actual,
                });
            }
        }
        let s = self.scales.state(&tr.state);
        let s_next = self.scales.state(&tr.next_state);
        let a = self.scales.action(&tr.action);
        Ok(Sample {
            state_action: [s.as_slice(), a.as_slice()].concat(),
            state_pair: [s.as_slice(), s_next.as_slice()].concat(),
            next_state: s_next,
            action: a,
            reward: vec![tr.reward / self.scales.reward],
        })
    }

    /// Curiosity of `tr` under the current predictors. No learning happens.
    pub fn evaluate(&self, tr: &Transition) -> Result<f64> {
        let x = self.prepare(tr)?;
        let w = self.weights;
        let mut total = 0.0;
        for b in &self.bundles {
            if let Some(h) = &b.forward {
                total += w.forward * mse(&h.net.forward(&x.state_action)?, &x.next_state);
            }
            if let Some(h) = &b.inverse {
                total += w.inverse * mse(&h.net.forward(&x.state_pair)?, &x.action);
            }
            if let Some(h) = &b.reward {
                total += w.reward * mse(&h.net.forward(&x.state_action)?, &x.reward);
            }
        }
        Ok(total / self.bundles.len() as f64)
    }

    /// One optimizer step per active head of every bundle on a shared
    /// uniform batch from the training FIFO. Returns the mean pre-update
    /// loss, or `None` while the FIFO holds fewer than `batch_size` items.
    pub fn train_step(&mut self, batch_size: usize, rng: &mut Rng) -> Result<Option<f64>> {
        if batch_size == 0 || self.fifo.len() < batch_size {
            return Ok(None);
        }
        let batch: Vec<Sample> = (0..batch_size)
            .map(|_| self.prepare(&self.fifo[rng.below(self.fifo.len())]))
            .collect::<Result<_>>()?;

        let sa: Vec<&[f64]> = batch.iter().map(|s| s.state_action.as_slice()).collect();
        let pairs: Vec<&[f64]> = batch.iter().map(|s| s.state_pair.as_slice()).collect();
        let next: Vec<&[f64]> = batch.iter().map(|s| s.next_state.as_slice()).collect();
        let actions: Vec<&[f64]> = batch.iter().map(|s| s.action.as_slice()).collect();
        let rewards: Vec<&[f64]> = batch.iter().map(|s| s.reward.as_slice()).collect();

        let mut loss_sum = 0.0;
        let mut heads = 0usize;
        for b in &mut self.bundles {
            for (head, inputs, targets) in [
                (&mut b.forward, &sa, &next),
                (&mut b.inverse, &pairs, &actions),
                (&mut b.reward, &sa, &rewards),
            ] {
                if let Some(h) = head {
                    let (loss, grads) = h.net.mse_grad_batch(inputs, targets)?;
                    h.opt.step_net(&mut h.net, &grads)?;
                    loss_sum += loss;
                    heads += 1;
                }
            }
        }
        Ok(Some(loss_sum / heads as f64))
    }

    /// Adds `tr` to the training FIFO, evicting the oldest when full.
    pub fn remember(&mut self, tr: &Transition) {
        if self.fifo_capacity == 0 {
            return;
        }
        if self.fifo.len() == self.fifo_capacity {
            self.fifo.pop_front();
        }
        self.fifo.push_back(tr.clone());
    }

    /// Scores `tr`, then stores it and runs one training step. The returned
    /// value never reflects training on `tr`.
    pub fn observe(&mut self, tr: &Transition, rng: &mut Rng) -> Result<f64> {
        let c = self.evaluate(tr)?;
        self.remember(tr);
        self.train_step(self.batch_size, rng)?;
        Ok(c)
    }
}

fn mse(pred: &[f64], target: &[f64]) -> f64 {
    pred.iter().zip(target).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / pred.len() as f64
}
