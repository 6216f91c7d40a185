//! Streaming task-boundary detector driven by the curiosity signal.
//!
//! Over a window of the last `n` curiosity values the detector tracks the
//! mean `μ` and the signal-to-noise ratio `snr = μ / (σ + δ)`, with `σ` the
//! population standard deviation. A step is a *candidate* when
//! `snr < m_f · μ`. The idle counter `K` counts steps since the last
//! candidate; a candidate becomes a *boundary* only if `K ≥ k` when it
//! arrives, after which `K` resets to zero.
//!
//! `K` starts at `k` so the first real change can fire immediately. The first
//! `n − 1` steps are warm-up: no candidates, `K` keeps counting.
//!
//! For `μ > 0` the candidate test reduces to `m_f · (σ + δ) > 1`, so it fires
//! on window spread in absolute units.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    /// Window length.
    pub n: usize,
    /// Idle steps required between boundaries.
    pub k: u64,
    /// Mean multiplier in the candidate test.
    pub m_f: f64,
    /// Guard added to σ.
    pub delta: f64,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self {
            n: 600,
            k: 8000,
            m_f: 1.5,
            delta: 1e-6,
        }
    }
}

impl DetectorParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::ConfigInvalid("detector.n must be at least 2".into()));
        }
        if !(self.m_f > 0.0) {
            return Err(Error::ConfigInvalid("detector.m_f must be positive".into()));
        }
        if !(self.delta > 0.0) {
            return Err(Error::ConfigInvalid("detector.delta must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorOutput {
    pub candidate: bool,
    pub boundary: bool,
    pub mu: f64,
    pub snr: f64,
}

#[derive(Debug, Clone)]
pub struct DetectorState {
    params: DetectorParams,
    window: VecDeque<f64>,
    // Sums of (x − shift) and (x − shift)² over the window. The shift is
    // re-centred on every full recomputation, which keeps cancellation error
    // small and makes a constant window produce exactly σ = 0.
    shift: f64,
    sum: f64,
    sum_sq: f64,
    since_recompute: usize,
    idle: u64,
    steps_seen: u64,
}

impl DetectorState {
    pub fn new(params: DetectorParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            window: VecDeque::with_capacity(params.n + 1),
            shift: 0.0,
            sum: 0.0,
            sum_sq: 0.0,
            since_recompute: 0,
            idle: params.k,
            steps_seen: 0,
        })
    }

    pub fn params(&self) -> &DetectorParams {
        &self.params
    }

    /// Idle counter `K`.
    pub fn idle(&self) -> u64 {
        self.idle
    }

    pub fn steps_seen(&self) -> u64 {
        self.steps_seen
    }

    pub fn window(&self) -> &VecDeque<f64> {
        &self.window
    }

    fn push(&mut self, c: f64) {
        if self.window.is_empty() {
            self.shift = c;
            self.sum = 0.0;
            self.sum_sq = 0.0;
        }
        self.window.push_back(c);
        let d = c - self.shift;
        self.sum += d;
        self.sum_sq += d * d;
        if self.window.len() > self.params.n {
            let old = self.window.pop_front().unwrap() - self.shift;
            self.sum -= old;
            self.sum_sq -= old * old;
        }
        self.since_recompute += 1;
        if self.since_recompute >= self.params.n {
            self.recompute();
        }
    }

    fn recompute(&mut self) {
        let len = self.window.len() as f64;
        let mean = self.window.iter().sum::<f64>() / len;
        // Shift to a held value near the mean so constant windows stay exact.
        self.shift = *self
            .window
            .iter()
            .min_by(|a, b| (*a - mean).abs().total_cmp(&(*b - mean).abs()))
            .unwrap();
        self.sum = 0.0;
        self.sum_sq = 0.0;
        for &x in &self.window {
            let d = x - self.shift;
            self.sum += d;
            self.sum_sq += d * d;
        }
        self.since_recompute = 0;
    }

    /// Mean of the values currently held.
    pub fn window_mean(&self) -> Result<f64> {
        if self.window.is_empty() {
            return Err(Error::EmptyWindow);
        }
        Ok(self.shift + self.sum / self.window.len() as f64)
    }

    /// Population standard deviation of the values currently held.
    pub fn window_std(&self) -> Result<f64> {
        if self.window.is_empty() {
            return Err(Error::EmptyWindow);
        }
        let len = self.window.len() as f64;
        let mean_d = self.sum / len;
        Ok((self.sum_sq / len - mean_d * mean_d).max(0.0).sqrt())
    }

    /// `μ / (σ + δ)`.
    pub fn window_snr(&self) -> Result<f64> {
        let mu = self.window_mean()?;
        let sigma = self.window_std()?;
        Ok(mu / (sigma + self.params.delta))
    }

    pub fn step(&mut self, c: f64) -> DetectorOutput {
        self.push(c);
        self.steps_seen += 1;
        let mu = self.window_mean().expect("window holds the value just pushed");
        let snr = self.window_snr().expect("window holds the value just pushed");

        if self.steps_seen < self.params.n as u64 {
            self.idle += 1;
            return DetectorOutput {
                candidate: false,
                boundary: false,
                mu,
                snr,
            };
        }

        let candidate = snr < self.params.m_f * mu;
        let boundary = candidate && self.idle >= self.params.k;
        self.idle = if candidate { 0 } else { self.idle + 1 };
        DetectorOutput {
            candidate,
            boundary,
            mu,
            snr,
        }
    }

    pub fn reset(&mut self) {
        *self = Self::new(self.params).expect("params were validated on construction");
    }
}

/// Runs a fresh detector over `values` and returns the indices flagged as
/// boundaries.
pub fn detect_offline(values: &[f64], params: DetectorParams) -> Result<Vec<usize>> {
    let mut state = DetectorState::new(params)?;
    Ok(values
        .iter()
        .enumerate()
        .filter_map(|(i, &c)| state.step(c).boundary.then_some(i))
        .collect())
}
