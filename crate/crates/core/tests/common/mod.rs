//! Helpers shared by the integration and acceptance tests.
#![allow(dead_code)]

use replaykit::buffers::{BufferKind, MtrBuffer, ReplayBuffer};
use replaykit::config::{DetectorMode, ExperimentConfig, PolicyKind};
use replaykit::env::TaskSchedule;
use replaykit::rng::Rng;
use replaykit::transition::Transition;

pub fn tr(t: u64, label: u32) -> Transition {
    Transition::new(vec![t as f64], vec![0.0], 0.0, vec![t as f64 + 1.0], false, t, label)
}

/// Four segment levels in `[1, 6]` with consecutive levels at least 2
/// apart.
pub fn step_levels(rng: &mut Rng, segments: usize) -> Vec<f64> {
    let mut levels: Vec<f64> = Vec::with_capacity(segments);
    while levels.len() < segments {
        let candidate = rng.uniform_range(1.0, 6.0);
        if levels.last().is_none_or(|&prev: &f64| (candidate - prev).abs() >= 2.0) {
            levels.push(candidate);
        }
    }
    levels
}

/// Piecewise-constant signal: `levels[i]` on segment `i`, with Gaussian
/// noise of standard deviation `rel_noise · level`.
pub fn piecewise_signal(rng: &mut Rng, len: usize, changes: &[usize], levels: &[f64], rel_noise: f64) -> Vec<f64> {
    assert_eq!(levels.len(), changes.len() + 1);
    (0..len)
        .map(|t| {
            let seg = changes.iter().filter(|&&c| t >= c).count();
            levels[seg] * (1.0 + rel_noise * rng.normal())
        })
        .collect()
}

/// Lifetime of every item pushed into an MTR buffer, `None` for items still
/// stored at the end. Item `i` is pushed at step `i`; its lifetime is the
/// step at which it left the chain minus `i`.
pub fn mtr_lifetimes(seed: u64, capacity: usize, sub_buffers: usize, beta: f64, steps: u64) -> Vec<Option<u64>> {
    let mut rng = Rng::new(seed);
    let mut buf = MtrBuffer::new(capacity, sub_buffers, beta).unwrap();
    let mut life = vec![None; steps as usize];
    for t in 0..steps {
        if let Some(out) = buf.push(tr(t, 0), &mut rng) {
            life[out.timestep as usize] = Some(t - out.timestep);
        }
    }
    life
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, r²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope, sxy * sxy / (sxx * syy))
}

/// Brute-force top-`b` by priority, earlier arrival first among equals.
pub fn top_b(priorities: &[f64], b: usize) -> Vec<u64> {
    let mut idx: Vec<usize> = (0..priorities.len()).collect();
    idx.sort_by(|&i, &j| priorities[j].total_cmp(&priorities[i]).then(i.cmp(&j)));
    let mut out: Vec<u64> = idx.into_iter().take(b).map(|i| i as u64).collect();
    out.sort_unstable();
    out
}

/// Pendulum config driven by a scripted policy, with curiosity and
/// evaluation disabled so only the buffer matters.
pub fn scripted_config(kind: BufferKind, total_steps: u64, size: usize, mode: DetectorMode, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.schedule = TaskSchedule::prolonged_pendulum();
    cfg.buffer.kind = kind;
    cfg.buffer.size = size;
    cfg.detector.mode = mode;
    cfg.curiosity.enabled = false;
    cfg.learner.policy = PolicyKind::UniformRandom;
    cfg.harness.total_steps = total_steps;
    cfg.harness.eval_every = 0;
    cfg.harness.seed = seed;
    cfg
}

/// A short SAC run with every module active.
pub fn small_sac_config(kind: BufferKind, total_steps: u64, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.schedule = TaskSchedule::Piecewise {
        change_steps: vec![0, total_steps / 3, 2 * total_steps / 3],
        values: vec![1.0, 1.4, 1.8],
    };
    cfg.buffer.kind = kind;
    cfg.buffer.size = 1000;
    cfg.detector.n = 100;
    cfg.detector.k = 300;
    cfg.curiosity.hidden = vec![8];
    cfg.curiosity.batch_size = 16;
    cfg.learner.hidden = vec![16];
    cfg.learner.batch_size = 16;
    cfg.learner.warmup_steps = 200;
    cfg.harness.total_steps = total_steps;
    cfg.harness.eval_every = total_steps / 2;
    cfg.harness.eval_episodes = 1;
    cfg.harness.seed = seed;
    cfg.harness.snapshot_steps = vec![total_steps / 2, total_steps];
    cfg
}

/// Shannon entropy (nats) of the label distribution.
pub fn entropy(ratios: impl Iterator<Item = f64>) -> f64 {
    ratios.filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum()
}

pub fn stored_labels(buf: &dyn ReplayBuffer) -> Vec<u64> {
    let mut v: Vec<u64> = buf.iter().map(|t| t.timestep).collect();
    v.sort_unstable();
    v
}
