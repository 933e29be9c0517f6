//! REINFORCE relay selection: stochastic ranking, battery gate, reward and
//! the policy-gradient update.

use super::features::{featurize, state_dim, FeatureNormalizer, StateVector};
use super::policy::PolicyParams;
use crate::error::{invalid, Error, Result};
use crate::rng::SimRng;
use crate::selection::SelectionContext;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RlHyperParams {
    pub learning_rate: f64,
    /// Experiences gathered per update (T).
    pub batch_size: usize,
    /// λ in the reward.
    pub reward_scale: f64,
    /// μ in the reward.
    pub reward_offset: f64,
    /// β in the battery gate.
    pub beta: f64,
    pub hidden: Vec<usize>,
    pub init_scale: f64,
}

impl Default for RlHyperParams {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            batch_size: 32,
            reward_scale: 100.0,
            reward_offset: 1.0,
            beta: 0.5,
            hidden: vec![64],
            init_scale: 0.05,
        }
    }
}

/// Categorical draw; returns a 0-based index.
pub fn sample_action(probs: &[f64], rng: &mut SimRng) -> usize {
    let total: f64 = probs.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_positive = i;
        }
        acc += p;
        if u < acc {
            return i;
        }
    }
    last_positive
}

/// Relay ranking drawn by sampling without replacement from `π`.
/// The head of the ranking is an ordinary [`sample_action`] draw.
pub fn sample_ranking(probs: &[f64], rng: &mut SimRng) -> Vec<usize> {
    let mut remaining: Vec<(usize, f64)> = probs.iter().copied().enumerate().collect();
    let mut order = Vec::with_capacity(probs.len());
    while !remaining.is_empty() {
        let weights: Vec<f64> = remaining.iter().map(|&(_, p)| p).collect();
        let pick = if weights.iter().sum::<f64>() > 0.0 {
            sample_action(&weights, rng)
        } else {
            0
        };
        order.push(remaining.remove(pick).0 + 1);
    }
    order
}

/// Relays sorted by descending probability, ties by index. 1-based.
pub fn greedy_ranking(probs: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..probs.len()).collect();
    idx.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]));
    idx.into_iter().map(|i| i + 1).collect()
}

/// Walks the ranking and returns the first relay whose normalized surplus
/// `α_m = (g_m − min g) / max g` exceeds `β (max g − min g) / max g`.
///
/// Equal batteries admit the top-ranked relay. When nobody passes, the relay
/// with the most energy is returned.
pub fn battery_gate(ranked: &[usize], battery: &[f64], beta: f64) -> Result<usize> {
    let &top = ranked.first().ok_or_else(|| invalid("empty ranking"))?;
    let (lo, hi) = battery
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &g| (lo.min(g), hi.max(g)));
    if hi <= 0.0 {
        return Err(Error::NoEligibleRelay);
    }
    if hi == lo {
        return Ok(top);
    }
    let threshold = beta * (hi - lo) / hi;
    for &m in ranked {
        let alpha = (battery[m - 1] - lo) / hi;
        if alpha > threshold && battery[m - 1] > 0.0 {
            return Ok(m);
        }
    }
    // first index holding the maximum
    let mut best = 1;
    for (i, &g) in battery.iter().enumerate() {
        if g > battery[best - 1] {
            best = i + 1;
        }
    }
    Ok(best)
}

/// `−λ (SER_obt − SER_opt) + μ`
pub fn compute_reward(ser_obtained: f64, ser_optimal: f64, scale: f64, offset: f64) -> f64 {
    -scale * (ser_obtained - ser_optimal) + offset
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experience {
    pub state: StateVector,
    /// Selected relay, 1-based.
    pub action: usize,
    pub reward: f64,
}

/// On-policy experience store, emptied by every update.
#[derive(Debug, Clone, Default)]
pub struct ReplayBuffer {
    records: Vec<Experience>,
    capacity: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        Self {
            records: Vec::with_capacity(capacity),
            capacity,
        }
    }

    pub fn push(&mut self, exp: Experience) {
        self.records.push(exp);
    }

    pub fn is_full(&self) -> bool {
        self.records.len() >= self.capacity
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[Experience] {
        &self.records
    }

    pub fn mean_reward(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().map(|e| e.reward).sum::<f64>() / self.records.len() as f64
    }

    pub fn clear(&mut self) {
        self.records.clear();
    }
}

/// One REINFORCE step: `θ ← θ + α Σ_t R_t ∇ ln π(a_t | s_t, θ)`.
///
/// The buffer is flushed on success. A non-finite gradient leaves both θ
/// and the buffer untouched.
pub fn reinforce_update(
    params: &mut PolicyParams,
    batch: &mut ReplayBuffer,
    learning_rate: f64,
) -> Result<()> {
    if batch.is_empty() {
        return Err(invalid("empty experience batch"));
    }
    let mut total = params.zeros_like();
    for (t, exp) in batch.records().iter().enumerate() {
        if exp.action == 0 || exp.action > params.num_actions() {
            return Err(invalid(format!("action {} outside [1, {}]", exp.action, params.num_actions())));
        }
        let g = params.grad_log_policy(exp.state.as_slice(), exp.action - 1)?;
        if !g.is_finite() || !exp.reward.is_finite() {
            return Err(Error::Divergence(format!("non-finite score term at batch index {t}")));
        }
        total.add_scaled(&g, exp.reward);
    }
    let mut next = params.clone();
    next.add_scaled(&total, learning_rate);
    if !next.is_finite() {
        return Err(Error::Divergence("policy parameters became non-finite".into()));
    }
    *params = next;
    batch.clear();
    Ok(())
}

/// Policy network plus its feature normalizer.
#[derive(Debug, Clone, PartialEq)]
pub struct RlAgent {
    pub policy: PolicyParams,
    pub normalizer: FeatureNormalizer,
    pub hyper: RlHyperParams,
}

/// What the agent decided for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentChoice {
    pub state: StateVector,
    pub probs: Vec<f64>,
    pub ranking: Vec<usize>,
    pub relay: usize,
}

impl RlAgent {
    pub fn new(num_relays: usize, hyper: RlHyperParams, rng: &mut SimRng) -> Result<Self> {
        let policy = PolicyParams::init(
            state_dim(num_relays),
            &hyper.hidden,
            num_relays,
            hyper.init_scale,
            rng,
        )?;
        Ok(Self {
            policy,
            normalizer: FeatureNormalizer::default(),
            hyper,
        })
    }

    pub fn num_relays(&self) -> usize {
        self.policy.num_actions()
    }

    fn check(&self, ctx: &SelectionContext) -> Result<()> {
        if ctx.num_relays() != self.num_relays() {
            return Err(Error::ShapeMismatch(format!(
                "policy expects {} relays, context has {}",
                self.num_relays(),
                ctx.num_relays()
            )));
        }
        Ok(())
    }

    /// Training-time choice: sampled ranking, normalizer updated.
    pub fn choose_sampled(&mut self, ctx: &SelectionContext, rng: &mut SimRng) -> Result<AgentChoice> {
        self.check(ctx)?;
        let state = featurize(ctx, &mut self.normalizer, true);
        let probs = self.policy.forward(state.as_slice())?;
        let ranking = sample_ranking(&probs, rng);
        let relay = battery_gate(&ranking, ctx.battery(), self.hyper.beta)?;
        Ok(AgentChoice { state, probs, ranking, relay })
    }

    /// Evaluation-time choice: greedy ranking, normalizer frozen.
    pub fn choose_greedy(&self, ctx: &SelectionContext) -> Result<AgentChoice> {
        self.check(ctx)?;
        let mut norm = self.normalizer;
        let state = featurize(ctx, &mut norm, false);
        let probs = self.policy.forward(state.as_slice())?;
        let ranking = greedy_ranking(&probs);
        let relay = battery_gate(&ranking, ctx.battery(), self.hyper.beta)?;
        Ok(AgentChoice { state, probs, ranking, relay })
    }

    pub fn to_checkpoint(&self) -> Checkpoint {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            shape: self.policy.shape(),
            policy: self.policy.clone(),
            normalizer: self.normalizer,
            hyper: self.hyper.clone(),
        }
    }

    pub fn from_checkpoint(cp: Checkpoint) -> Result<Self> {
        if cp.version != CHECKPOINT_VERSION {
            return Err(Error::ShapeMismatch(format!("unsupported checkpoint version {}", cp.version)));
        }
        let policy = PolicyParams::from_layers(cp.policy.layers().to_vec())?;
        if policy.shape() != cp.shape {
            return Err(Error::ShapeMismatch("declared shape disagrees with layers".into()));
        }
        let m = policy.num_actions();
        if policy.input_dim() != state_dim(m) {
            return Err(Error::ShapeMismatch(format!(
                "input width {} does not fit {m} relays",
                policy.input_dim()
            )));
        }
        Ok(Self {
            policy,
            normalizer: cp.normalizer,
            hyper: cp.hyper,
        })
    }
}

pub const CHECKPOINT_VERSION: u32 = 1;

/// Versioned JSON policy checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub shape: Vec<usize>,
    pub policy: PolicyParams,
    pub normalizer: FeatureNormalizer,
    pub hyper: RlHyperParams,
}

impl Checkpoint {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
