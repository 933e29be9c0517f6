mod common;

use common::bandit_curve;
use proptest::prelude::*;
use rand::SeedableRng;
use relaysel_core::rl::{battery_gate, sample_action, softmax, PolicyParams};
use relaysel_core::SimRng;

#[test]
fn bandit_converges_for_every_seed() {
    for seed in 0..10 {
        let curve = bandit_curve(seed, 200, 1e-3, 32);
        assert!(*curve.last().unwrap() > 0.9, "seed {seed}: {:?}", curve.last());
    }
}

#[test]
fn bandit_expected_reward_trends_upward() {
    // sign test over seeds in the small-step regime
    let seeds = 20;
    let mut up = 0;
    for seed in 100..100 + seeds {
        let curve = bandit_curve(seed, 50, 1e-4, 32);
        let steps = curve.windows(2).filter(|w| w[1] >= w[0]).count();
        if steps == curve.len() - 1 && curve.last() > curve.first() {
            up += 1;
        }
    }
    // P(X ≥ 15 | n = 20, p = 0.5) < 0.05
    assert!(up >= 15, "{up}/{seeds} seeds monotone");
}

#[test]
fn uniform_sampling_frequencies() {
    let mut rng = SimRng::seed_from_u64(51);
    let probs = [0.125; 8];
    let mut counts = [0usize; 8];
    for _ in 0..100_000 {
        counts[sample_action(&probs, &mut rng)] += 1;
    }
    for c in counts {
        let f = c as f64 / 100_000.0;
        assert!((0.115..=0.135).contains(&f), "frequency {f}");
    }
}

#[test]
fn zero_network_is_uniform() {
    let p = PolicyParams::zeros(33, &[64], 8).unwrap();
    assert!(p.forward(&[0.7; 33]).unwrap().iter().all(|&x| (x - 0.125).abs() < 1e-15));
}

#[test]
fn uniform_two_action_score_is_one_half() {
    let p = PolicyParams::zeros(3, &[], 2).unwrap();
    let g = p.grad_log_policy(&[0.0; 3], 0).unwrap();
    let bias = &g.layers()[0].bias;
    assert_eq!(bias, &vec![0.5, -0.5]);
}

proptest! {
    #[test]
    fn softmax_normalizes(logits in prop::collection::vec(-50.0f64..50.0, 1..12), c in -100.0f64..100.0) {
        let p = softmax(&logits);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(p.iter().all(|&x| x > 0.0));
        let shifted: Vec<f64> = logits.iter().map(|l| l + c).collect();
        for (a, b) in p.iter().zip(softmax(&shifted)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn random_networks_give_distributions(seed in 0u64..1000, scale in 0.01f64..3.0) {
        let mut rng = SimRng::seed_from_u64(seed);
        let p = PolicyParams::init(9, &[7], 4, scale, &mut rng).unwrap();
        let s: Vec<f64> = (0..9).map(|i| (i as f64 * 0.37 + seed as f64).sin() * 3.0).collect();
        let pi = p.forward(&s).unwrap();
        prop_assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(pi.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn gate_never_returns_a_dead_relay(
        battery in prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], 1..9),
        beta in -1.0f64..2.0,
        seed in 0u64..100,
    ) {
        prop_assume!(battery.iter().any(|&b| b > 0.0));
        let mut order: Vec<usize> = (1..=battery.len()).collect();
        let mut rng = SimRng::seed_from_u64(seed);
        use rand::seq::SliceRandom;
        order.shuffle(&mut rng);
        let pick = battery_gate(&order, &battery, beta).unwrap();
        prop_assert!(battery[pick - 1] > 0.0);
    }
}
