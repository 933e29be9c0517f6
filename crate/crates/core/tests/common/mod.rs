#![allow(dead_code)]

/// Kolmogorov-Smirnov critical coefficient at significance 0.01.
pub const KS_C_001: f64 = 1.628;

/// One-sample KS statistic against a continuous CDF.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((((i + 1) as f64) / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

pub fn ks_two_sample_critical(na: usize, nb: usize) -> f64 {
    let (na, nb) = (na as f64, nb as f64);
    KS_C_001 * ((na + nb) / (na * nb)).sqrt()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

use rand::{Rng, SeedableRng};
use relaysel_core::rl::{reinforce_update, sample_action, softmax, Experience, PolicyParams, ReplayBuffer, StateVector};
use relaysel_core::SimRng;

/// ln π(a|s) from scratch, independent of the library's forward pass.
pub fn log_prob_reference(flat: &[f64], shape: &[usize], state: &[f64], action: usize) -> f64 {
    let mut x = state.to_vec();
    let mut offset = 0;
    for (li, w) in shape.windows(2).enumerate() {
        let (n_in, n_out) = (w[0], w[1]);
        let weights = &flat[offset..offset + n_in * n_out];
        let bias = &flat[offset + n_in * n_out..offset + n_in * n_out + n_out];
        offset += n_in * n_out + n_out;
        let mut z = vec![0.0; n_out];
        for o in 0..n_out {
            z[o] = bias[o] + (0..n_in).map(|i| weights[o * n_in + i] * x[i]).sum::<f64>();
        }
        if li + 2 < shape.len() {
            z.iter_mut().for_each(|v| *v = v.tanh());
        }
        x = z;
    }
    softmax(&x)[action].ln()
}

/// Worst relative disagreement between backprop and central differences
/// (ε = 1e-5) on a random network of the given shape.
pub fn finite_difference_error(shape: &[usize], seed: u64) -> f64 {
    let mut rng = SimRng::seed_from_u64(seed);
    let n = shape.len();
    let mut p = PolicyParams::init(shape[0], &shape[1..n - 1], shape[n - 1], 1.0, &mut rng).unwrap();
    let mut flat = p.to_flat();
    flat.iter_mut().for_each(|v| *v += rng.random_range(-0.3..0.3));
    p.set_flat(&flat).unwrap();

    let state: Vec<f64> = (0..shape[0]).map(|_| rng.random_range(-2.0..2.0)).collect();
    let action = rng.random_range(0..shape[n - 1]);
    let analytic = p.grad_log_policy(&state, action).unwrap().to_flat();

    let eps = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..flat.len() {
        let mut plus = flat.clone();
        plus[i] += eps;
        let mut minus = flat.clone();
        minus[i] -= eps;
        let numeric = (log_prob_reference(&plus, shape, &state, action)
            - log_prob_reference(&minus, shape, &state, action))
            / (2.0 * eps);
        let err = (numeric - analytic[i]).abs() / numeric.abs().max(analytic[i].abs()).max(1e-3);
        worst = worst.max(err);
    }
    worst
}

/// Stateless 2-action bandit, reward 1 for action 1 and 0 otherwise.
/// Returns π(action 1) before training and after every update.
pub fn bandit_curve(seed: u64, updates: usize, learning_rate: f64, batch: usize) -> Vec<f64> {
    let mut rng = SimRng::seed_from_u64(seed);
    let mut p = PolicyParams::init(1, &[16], 2, 0.05, &mut rng).unwrap();
    let s = [1.0];
    let mut buf = ReplayBuffer::new(batch);
    let mut curve = vec![p.forward(&s).unwrap()[0]];
    for _ in 0..updates {
        while !buf.is_full() {
            let a = sample_action(&p.forward(&s).unwrap(), &mut rng);
            buf.push(Experience {
                state: StateVector(s.to_vec()),
                action: a + 1,
                reward: if a == 0 { 1.0 } else { 0.0 },
            });
        }
        reinforce_update(&mut p, &mut buf, learning_rate).unwrap();
        curve.push(p.forward(&s).unwrap()[0]);
    }
    curve
}
