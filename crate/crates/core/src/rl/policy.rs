//! Feed-forward softmax policy `π(a | s, θ)` with hand-written backprop.
//!
//! Hidden layers use `tanh`; the output layer produces one logit per relay.

use crate::error::{invalid, Error, Result};
use crate::rng::SimRng;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Fully connected layer, weights stored row-major as `outputs x inputs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .chunks_exact(self.inputs)
            .zip(&self.bias)
            .map(|(row, b)| row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + b)
            .collect()
    }

    fn len(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// Policy network parameters θ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    layers: Vec<Dense>,
}

/// Gradient with the same layout as [`PolicyParams`].
pub type PolicyGradient = PolicyParams;

impl PolicyParams {
    /// All-zero network (uniform policy).
    pub fn zeros(input_dim: usize, hidden: &[usize], actions: usize) -> Result<Self> {
        if input_dim == 0 || actions == 0 || hidden.contains(&0) {
            return Err(invalid("layer widths must be positive"));
        }
        let mut dims = vec![input_dim];
        dims.extend_from_slice(hidden);
        dims.push(actions);
        Ok(Self {
            layers: dims.windows(2).map(|w| Dense::zeros(w[0], w[1])).collect(),
        })
    }

    /// Zero biases, weights uniform in `[-scale, scale]`.
    pub fn init(
        input_dim: usize,
        hidden: &[usize],
        actions: usize,
        scale: f64,
        rng: &mut SimRng,
    ) -> Result<Self> {
        let mut p = Self::zeros(input_dim, hidden, actions)?;
        for layer in &mut p.layers {
            for w in &mut layer.weights {
                *w = rng.random_range(-scale..=scale);
            }
        }
        Ok(p)
    }

    pub fn from_layers(layers: Vec<Dense>) -> Result<Self> {
        if layers.is_empty() {
            return Err(invalid("network needs at least one layer"));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.weights.len() != l.inputs * l.outputs || l.bias.len() != l.outputs || l.outputs == 0 {
                return Err(Error::ShapeMismatch(format!("layer {i} has inconsistent buffers")));
            }
            if i > 0 && layers[i - 1].outputs != l.inputs {
                return Err(Error::ShapeMismatch(format!("layer {i} input width does not chain")));
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].inputs
    }

    pub fn num_actions(&self) -> usize {
        self.layers.last().map(|l| l.outputs).unwrap_or(0)
    }

    /// `[inputs, hidden..., actions]`
    pub fn shape(&self) -> Vec<usize> {
        let mut s = vec![self.input_dim()];
        s.extend(self.layers.iter().map(|l| l.outputs));
        s
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(Dense::len).sum()
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self.layers.iter().map(|l| Dense::zeros(l.inputs, l.outputs)).collect(),
        }
    }

    /// Parameters flattened layer by layer, weights before biases.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.num_params());
        for l in &self.layers {
            v.extend_from_slice(&l.weights);
            v.extend_from_slice(&l.bias);
        }
        v
    }

    pub fn set_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.num_params() {
            return Err(Error::LengthMismatch {
                expected: self.num_params(),
                actual: flat.len(),
            });
        }
        let mut it = flat.iter().copied();
        for l in &mut self.layers {
            for w in l.weights.iter_mut().chain(l.bias.iter_mut()) {
                *w = it.next().expect("length checked");
            }
        }
        Ok(())
    }

    /// `self += scale * other`
    pub fn add_scaled(&mut self, other: &PolicyParams, scale: f64) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            for (x, y) in a.weights.iter_mut().zip(&b.weights) {
                *x += scale * y;
            }
            for (x, y) in a.bias.iter_mut().zip(&b.bias) {
                *x += scale * y;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(&l.bias).all(|v| v.is_finite()))
    }

    fn check_input(&self, state: &[f64]) -> Result<()> {
        if state.len() != self.input_dim() {
            return Err(Error::LengthMismatch {
                expected: self.input_dim(),
                actual: state.len(),
            });
        }
        Ok(())
    }

    /// Activations of every layer; the last entry holds the logits.
    fn activations(&self, state: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        acts.push(state.to_vec());
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = layer.apply(acts.last().expect("non-empty"));
            if i < last {
                z.iter_mut().for_each(|v| *v = v.tanh());
            }
            acts.push(z);
        }
        acts
    }

    pub fn logits(&self, state: &[f64]) -> Result<Vec<f64>> {
        self.check_input(state)?;
        Ok(self.activations(state).pop().expect("non-empty"))
    }

    /// Action probabilities `π(· | s, θ)`.
    pub fn forward(&self, state: &[f64]) -> Result<Vec<f64>> {
        Ok(softmax(&self.logits(state)?))
    }

    /// `∇_θ ln π(action | state, θ)` by backpropagation. `action` is 0-based.
    pub fn grad_log_policy(&self, state: &[f64], action: usize) -> Result<PolicyGradient> {
        self.check_input(state)?;
        if action >= self.num_actions() {
            return Err(invalid(format!("action {action} out of range")));
        }
        let acts = self.activations(state);
        let probs = softmax(acts.last().expect("non-empty"));
        // d ln softmax_a / d logit_b = δ_ab − π_b
        let mut delta: Vec<f64> = probs.iter().map(|p| -p).collect();
        delta[action] += 1.0;

        let mut grad = self.zeros_like();
        for li in (0..self.layers.len()).rev() {
            let layer = &self.layers[li];
            let input = &acts[li];
            let g = &mut grad.layers[li];
            for (o, d) in delta.iter().enumerate() {
                g.bias[o] = *d;
                let row = &mut g.weights[o * layer.inputs..(o + 1) * layer.inputs];
                for (w, x) in row.iter_mut().zip(input) {
                    *w = d * x;
                }
            }
            if li > 0 {
                // input here is tanh output of the previous layer
                let mut back = vec![0.0; layer.inputs];
                for (o, d) in delta.iter().enumerate() {
                    let row = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (b, w) in back.iter_mut().zip(row) {
                        *b += w * d;
                    }
                }
                delta = back
                    .iter()
                    .zip(input)
                    .map(|(b, a)| b * (1.0 - a * a))
                    .collect();
            }
        }
        Ok(grad)
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|e| e / sum).collect()
}
