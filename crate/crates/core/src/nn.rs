//! Small fully connected network with hand-written backpropagation.
//!
//! Parameters live in one flat vector. Layer `i` maps `a = sizes[i]` inputs
//! to `b = sizes[i + 1]` outputs and occupies `b·a` weights (row-major, one
//! row per output unit) followed by `b` biases. Hidden layers use `tanh`; the
//! output layer is linear.
//!
//! Weights are initialised uniformly in `[-1/√fan_in, 1/√fan_in)`, giving a
//! per-entry variance of `1/(3·fan_in)`. Biases start at zero.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

/// Activations recorded by [`Mlp::forward_trace`]; `layers[0]` is the input
/// and `layers[last]` the network output.
#[derive(Debug, Clone)]
pub struct Trace {
    layers: Vec<Vec<f64>>,
}

impl Trace {
    pub fn output(&self) -> &[f64] {
        self.layers.last().expect("trace always holds the input")
    }
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.len() < 2 {
        return Err(Error::InvalidLayout(format!(
            "need at least an input and an output layer, got {sizes:?}"
        )));
    }
    if sizes.contains(&0) {
        return Err(Error::InvalidLayout(format!("zero-width layer in {sizes:?}")));
    }
    Ok(())
}

fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

impl Mlp {
    pub fn new(sizes: &[usize], rng: &mut Rng) -> Result<Self> {
        let mut net = Self::zeros(sizes)?;
        let mut offset = 0;
        for w in sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            for p in &mut net.params[offset..offset + fan_in * fan_out] {
                *p = rng.uniform_range(-bound, bound);
            }
            offset += fan_in * fan_out + fan_out;
        }
        Ok(net)
    }

    pub fn zeros(sizes: &[usize]) -> Result<Self> {
        check_sizes(sizes)?;
        Ok(Self {
            sizes: sizes.to_vec(),
            params: vec![0.0; param_count(sizes)],
        })
    }

    pub fn from_params(sizes: &[usize], params: Vec<f64>) -> Result<Self> {
        check_sizes(sizes)?;
        let expected = param_count(sizes);
        if params.len() != expected {
            return Err(Error::DimensionMismatch {
                context: "mlp parameters",
                expected,
                actual: params.len(),
            });
        }
        Ok(Self {
            sizes: sizes.to_vec(),
            params,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_size(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// `(weights, biases)` of layer `index`; weights are `out × in` row-major.
    pub fn layer(&self, index: usize) -> (&[f64], &[f64]) {
        let offset = self.layer_offset(index);
        let (a, b) = (self.sizes[index], self.sizes[index + 1]);
        (
            &self.params[offset..offset + a * b],
            &self.params[offset + a * b..offset + a * b + b],
        )
    }

    pub fn layer_mut(&mut self, index: usize) -> (&mut [f64], &mut [f64]) {
        let offset = self.layer_offset(index);
        let (a, b) = (self.sizes[index], self.sizes[index + 1]);
        let (w, rest) = self.params[offset..].split_at_mut(a * b);
        (w, &mut rest[..b])
    }

    fn layer_offset(&self, index: usize) -> usize {
        self.sizes[..=index].windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_size() {
            return Err(Error::DimensionMismatch {
                context: "mlp input",
                expected: self.input_size(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let n_layers = self.sizes.len() - 1;
        let mut current = x.to_vec();
        let mut offset = 0;
        for l in 0..n_layers {
            let (a, b) = (self.sizes[l], self.sizes[l + 1]);
            current = affine(&self.params[offset..], a, b, &current);
            if l + 1 < n_layers {
                current.iter_mut().for_each(|v| *v = v.tanh());
            }
            offset += a * b + b;
        }
        Ok(current)
    }

    pub fn forward_trace(&self, x: &[f64]) -> Result<Trace> {
        self.check_input(x)?;
        let n_layers = self.sizes.len() - 1;
        let mut layers = Vec::with_capacity(n_layers + 1);
        layers.push(x.to_vec());
        let mut offset = 0;
        for l in 0..n_layers {
            let (a, b) = (self.sizes[l], self.sizes[l + 1]);
            let mut out = affine(&self.params[offset..], a, b, &layers[l]);
            if l + 1 < n_layers {
                out.iter_mut().for_each(|v| *v = v.tanh());
            }
            layers.push(out);
            offset += a * b + b;
        }
        Ok(Trace { layers })
    }

    /// Backpropagates `d_output` (∂loss/∂output) through a recorded forward
    /// pass. Parameter gradients are *added* into `grads`; the gradient with
    /// respect to the input is returned.
    pub fn backward(&self, trace: &Trace, d_output: &[f64], grads: &mut [f64]) -> Result<Vec<f64>> {
        if d_output.len() != self.output_size() {
            return Err(Error::DimensionMismatch {
                context: "mlp output gradient",
                expected: self.output_size(),
                actual: d_output.len(),
            });
        }
        if grads.len() != self.params.len() {
            return Err(Error::DimensionMismatch {
                context: "mlp gradient buffer",
                expected: self.params.len(),
                actual: grads.len(),
            });
        }
        let n_layers = self.sizes.len() - 1;
        let mut offsets = Vec::with_capacity(n_layers);
        let mut acc = 0;
        for w in self.sizes.windows(2) {
            offsets.push(acc);
            acc += w[0] * w[1] + w[1];
        }

        let mut delta = d_output.to_vec();
        for l in (0..n_layers).rev() {
            let (a, b) = (self.sizes[l], self.sizes[l + 1]);
            let offset = offsets[l];
            let input = &trace.layers[l];
            // delta is ∂loss/∂(pre-activation) of layer l here.
            for j in 0..b {
                let dj = delta[j];
                if dj == 0.0 {
                    continue;
                }
                let row = &mut grads[offset + j * a..offset + (j + 1) * a];
                for (g, &xi) in row.iter_mut().zip(input) {
                    *g += dj * xi;
                }
                grads[offset + a * b + j] += dj;
            }
            let weights = &self.params[offset..offset + a * b];
            let mut d_input = vec![0.0; a];
            for j in 0..b {
                let dj = delta[j];
                if dj == 0.0 {
                    continue;
                }
                for (di, &w) in d_input.iter_mut().zip(&weights[j * a..(j + 1) * a]) {
                    *di += dj * w;
                }
            }
            if l > 0 {
                // input to layer l is tanh output of layer l-1
                for (di, &h) in d_input.iter_mut().zip(input) {
                    *di *= 1.0 - h * h;
                }
            }
            delta = d_input;
        }
        Ok(delta)
    }

    /// Mean squared error over output dimensions and its exact gradient.
    pub fn mse_grad(&self, x: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>)> {
        let mut grads = vec![0.0; self.params.len()];
        let loss = self.accumulate_mse(x, target, 1.0, &mut grads)?;
        Ok((loss, grads))
    }

    /// Batch mean of [`Mlp::mse_grad`].
    pub fn mse_grad_batch<X, T>(&self, inputs: &[X], targets: &[T]) -> Result<(f64, Vec<f64>)>
    where
        X: AsRef<[f64]>,
        T: AsRef<[f64]>,
    {
        if inputs.len() != targets.len() {
            return Err(Error::DimensionMismatch {
                context: "mse batch",
                expected: inputs.len(),
                actual: targets.len(),
            });
        }
        let mut grads = vec![0.0; self.params.len()];
        if inputs.is_empty() {
            return Ok((0.0, grads));
        }
        let weight = 1.0 / inputs.len() as f64;
        let mut loss = 0.0;
        for (x, t) in inputs.iter().zip(targets) {
            loss += weight * self.accumulate_mse(x.as_ref(), t.as_ref(), weight, &mut grads)?;
        }
        Ok((loss, grads))
    }

    fn accumulate_mse(&self, x: &[f64], target: &[f64], weight: f64, grads: &mut [f64]) -> Result<f64> {
        if target.len() != self.output_size() {
            return Err(Error::DimensionMismatch {
                context: "mse target",
                expected: self.output_size(),
                actual: target.len(),
            });
        }
        let trace = self.forward_trace(x)?;
        let out = trace.output();
        let k = out.len() as f64;
        let mut loss = 0.0;
        let d_out: Vec<f64> = out
            .iter()
            .zip(target)
            .map(|(o, t)| {
                let e = o - t;
                loss += e * e / k;
                weight * 2.0 * e / k
            })
            .collect();
        self.backward(&trace, &d_out, grads)?;
        Ok(loss)
    }

    /// `self ← τ·source + (1−τ)·self`
    pub fn soft_update_from(&mut self, source: &Mlp, tau: f64) {
        debug_assert_eq!(self.sizes, source.sizes);
        for (t, s) in self.params.iter_mut().zip(&source.params) {
            *t = tau * s + (1.0 - tau) * *t;
        }
    }

    pub fn all_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }

    /// Text checkpoint: a `replaykit-mlp 1` line, a `sizes` line, then one
    /// parameter per line in shortest round-trip decimal form.
    pub fn to_checkpoint(&self) -> String {
        let mut out = String::from("replaykit-mlp 1\nsizes");
        for s in &self.sizes {
            write!(out, " {s}").unwrap();
        }
        out.push('\n');
        for p in &self.params {
            writeln!(out, "{p:?}").unwrap();
        }
        out
    }

    pub fn from_checkpoint(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("replaykit-mlp 1") {
            return Err(Error::Checkpoint("missing `replaykit-mlp 1` header".into()));
        }
        let sizes_line = lines
            .next()
            .ok_or_else(|| Error::Checkpoint("missing sizes line".into()))?;
        let mut parts = sizes_line.split_whitespace();
        if parts.next() != Some("sizes") {
            return Err(Error::Checkpoint("second line must start with `sizes`".into()));
        }
        let sizes = parts
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Checkpoint(format!("bad layer size: {e}")))?;
        let params = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Checkpoint(format!("bad parameter: {e}")))?;
        Self::from_params(&sizes, params)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_checkpoint().as_bytes())
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut text = String::new();
        for line in std::io::BufReader::new(f).lines() {
            text.push_str(&line.map_err(|e| Error::io(path, e))?);
            text.push('\n');
        }
        Self::from_checkpoint(&text)
    }
}

fn affine(params: &[f64], a: usize, b: usize, x: &[f64]) -> Vec<f64> {
    let weights = &params[..a * b];
    let biases = &params[a * b..a * b + b];
    (0..b)
        .map(|j| {
            weights[j * a..(j + 1) * a]
                .iter()
                .zip(x)
                .fold(biases[j], |acc, (w, xi)| acc + w * xi)
        })
        .collect()
}

/// Adam with bias correction (β₁ = 0.9, β₂ = 0.999, ε = 1e-8).
///
/// The update is `lr · m̂ / (√v̂ + ε)`. A zero gradient therefore leaves the
/// parameters untouched only while both moment estimates are still zero
/// (e.g. on the very first step); after non-zero gradients the momentum term
/// keeps moving them.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    first_moment: Vec<f64>,
    second_moment: Vec<f64>,
    steps: u64,
}

impl Adam {
    pub fn new(num_params: usize, learning_rate: f64) -> Self {
        Self {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            first_moment: vec![0.0; num_params],
            second_moment: vec![0.0; num_params],
            steps: 0,
        }
    }

    pub fn for_net(net: &Mlp, learning_rate: f64) -> Self {
        Self::new(net.num_params(), learning_rate)
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.first_moment.len() || grads.len() != params.len() {
            return Err(Error::DimensionMismatch {
                context: "optimizer step",
                expected: self.first_moment.len(),
                actual: if params.len() != self.first_moment.len() {
                    params.len()
                } else {
                    grads.len()
                },
            });
        }
        self.steps += 1;
        let t = self.steps as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        for i in 0..params.len() {
            let g = grads[i];
            let m = &mut self.first_moment[i];
            let v = &mut self.second_moment[i];
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            params[i] -= self.learning_rate * (*m / c1) / ((*v / c2).sqrt() + self.epsilon);
        }
        Ok(())
    }

    pub fn step_net(&mut self, net: &mut Mlp, grads: &[f64]) -> Result<()> {
        self.step(net.params_mut(), grads)
    }
}
