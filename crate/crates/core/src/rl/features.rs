//! State featurization.
//!
//! Per relay, in index order: `[log1p|h_SR|², log1p|h_RD|², P_B, g/E₀]`,
//! followed by `log1p|h_SD|²`. Gain and bad-state features are standardized
//! with running statistics pooled per feature kind, so relays stay comparable
//! with each other. Battery levels pass through unchanged.

use crate::selection::SelectionContext;
use serde::{Deserialize, Serialize};

pub const FEATURES_PER_RELAY: usize = 4;

/// Length of the state vector for `num_relays` relays.
pub fn state_dim(num_relays: usize) -> usize {
    FEATURES_PER_RELAY * num_relays + 1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector(pub Vec<f64>);

impl StateVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Welford running mean and variance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunningStat {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl RunningStat {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// `(x - mean) / std`; identity until enough samples exist.
    pub fn standardize(&self, x: f64) -> f64 {
        let var = self.variance();
        if self.count < 2 || var < 1e-12 {
            x - if self.count > 0 { self.mean } else { 0.0 }
        } else {
            (x - self.mean) / var.sqrt()
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureNormalizer {
    pub source_relay: RunningStat,
    pub relay_destination: RunningStat,
    pub source_destination: RunningStat,
    pub bad_fraction: RunningStat,
}

/// Unstandardized features.
pub fn raw_features(ctx: &SelectionContext) -> StateVector {
    let m = ctx.num_relays();
    let mut v = Vec::with_capacity(state_dim(m));
    for r in 1..=m {
        v.push(ctx.gain_sr(r).ln_1p());
        v.push(ctx.gain_rd(r).ln_1p());
        v.push(ctx.p_bad(r));
        v.push(ctx.remaining(r) / ctx.initial_energy());
    }
    v.push(ctx.gain_sd().ln_1p());
    StateVector(v)
}

impl FeatureNormalizer {
    pub fn observe(&mut self, raw: &StateVector) {
        let m = (raw.len() - 1) / FEATURES_PER_RELAY;
        for r in 0..m {
            self.source_relay.push(raw.0[FEATURES_PER_RELAY * r]);
            self.relay_destination.push(raw.0[FEATURES_PER_RELAY * r + 1]);
            self.bad_fraction.push(raw.0[FEATURES_PER_RELAY * r + 2]);
        }
        self.source_destination.push(raw.0[raw.len() - 1]);
    }

    pub fn apply(&self, raw: &StateVector) -> StateVector {
        let m = (raw.len() - 1) / FEATURES_PER_RELAY;
        let mut v = raw.0.clone();
        for r in 0..m {
            v[FEATURES_PER_RELAY * r] = self.source_relay.standardize(v[FEATURES_PER_RELAY * r]);
            v[FEATURES_PER_RELAY * r + 1] =
                self.relay_destination.standardize(v[FEATURES_PER_RELAY * r + 1]);
            v[FEATURES_PER_RELAY * r + 2] = self.bad_fraction.standardize(v[FEATURES_PER_RELAY * r + 2]);
        }
        let last = v.len() - 1;
        v[last] = self.source_destination.standardize(v[last]);
        StateVector(v)
    }
}

/// Featurizes a context; when `learn` is set the running statistics absorb it
/// first.
pub fn featurize(ctx: &SelectionContext, normalizer: &mut FeatureNormalizer, learn: bool) -> StateVector {
    let raw = raw_features(ctx);
    if learn {
        normalizer.observe(&raw);
    }
    normalizer.apply(&raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(sr: Vec<f64>, rd: Vec<f64>, p: Vec<f64>, b: Vec<f64>) -> SelectionContext {
        SelectionContext::new(sr, rd, 0.7, p, b, 1.0).unwrap()
    }

    #[test]
    fn eight_relays_give_33_features() {
        assert_eq!(state_dim(8), 33);
        let c = ctx(vec![1.0; 8], vec![2.0; 8], vec![0.1; 8], vec![1.0; 8]);
        assert_eq!(raw_features(&c).len(), 33);
    }

    #[test]
    fn full_battery_feature_is_one() {
        let c = ctx(vec![1.0; 3], vec![2.0; 3], vec![0.1; 3], vec![1.0, 0.4, 1.0]);
        let raw = raw_features(&c);
        assert_eq!(raw.0[3], 1.0);
        assert_eq!(raw.0[7], 0.4);
    }

    #[test]
    fn relay_permutation_permutes_blocks() {
        let a = ctx(vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0], vec![0.1, 0.2, 0.3], vec![1.0, 0.5, 0.2]);
        let b = ctx(vec![3.0, 1.0, 2.0], vec![6.0, 4.0, 5.0], vec![0.3, 0.1, 0.2], vec![0.2, 1.0, 0.5]);
        let mut norm = FeatureNormalizer::default();
        for _ in 0..3 {
            norm.observe(&raw_features(&a));
        }
        let fa = featurize(&a, &mut norm, false);
        let fb = featurize(&b, &mut norm, false);
        let perm = [2usize, 0, 1];
        for (slot_b, &slot_a) in perm.iter().enumerate() {
            assert_eq!(fb.0[4 * slot_b..4 * slot_b + 4], fa.0[4 * slot_a..4 * slot_a + 4]);
        }
        assert_eq!(fa.0[12], fb.0[12]);
    }

    #[test]
    fn running_stat_matches_batch() {
        let xs = [1.0, 4.0, 2.5, -3.0, 0.5];
        let mut s = RunningStat::default();
        xs.iter().for_each(|&x| s.push(x));
        let mean = xs.iter().sum::<f64>() / 5.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        assert!((s.mean - mean).abs() < 1e-14);
        assert!((s.variance() - var).abs() < 1e-12);
    }
}
