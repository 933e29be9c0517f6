use relaysel_core::harness::*;
use relaysel_core::rl::{PolicyParams, RlAgent, RlHyperParams};
use relaysel_core::Error;

fn small(strategy: Strategy) -> ExperimentConfig {
    ExperimentConfig {
        strategy,
        frames: Some(40),
        ebno_grid: vec![0.0, 6.0, 12.0],
        ..ExperimentConfig::default()
    }
}

fn csv_bytes(r: &SweepResult) -> Vec<u8> {
    let mut out = Vec::new();
    r.write_csv(&mut out).unwrap();
    out
}

#[test]
fn sweeps_are_bitwise_reproducible() {
    for s in [Strategy::Dt, Strategy::Maxmin, Strategy::ProposedMaxmin, Strategy::Random] {
        let a = run_ser_sweep(&small(s), None).unwrap();
        let b = run_ser_sweep(&small(s), None).unwrap();
        assert_eq!(csv_bytes(&a), csv_bytes(&b));
        let mut fa = Vec::new();
        let mut fb = Vec::new();
        a.write_frames_csv(s, &mut fa).unwrap();
        b.write_frames_csv(s, &mut fb).unwrap();
        assert_eq!(fa, fb);
    }
}

#[test]
fn seed_changes_the_outcome() {
    let a = run_ser_sweep(&small(Strategy::Random), None).unwrap();
    let b = run_ser_sweep(&ExperimentConfig { seed: 2, ..small(Strategy::Random) }, None).unwrap();
    assert_ne!(a.frames, b.frames);
}

#[test]
fn parallel_points_equal_sequential_run() {
    for s in [Strategy::Maxmin, Strategy::ProposedMaxmin] {
        let par = run_ser_sweep(&small(s), None).unwrap();
        let seq = run_ser_sweep_sequential(&small(s), None).unwrap();
        assert_eq!(par, seq);
    }
}

#[test]
fn sweep_rows_and_frame_rows() {
    let c = small(Strategy::Maxmin);
    let r = run_ser_sweep(&c, None).unwrap();
    assert_eq!(r.rows.len(), 3);
    for row in &r.rows {
        assert_eq!(row.ser, row.symbol_errors as f64 / (row.frames * c.frame_len as u64) as f64);
    }
    let mut out = Vec::new();
    r.write_frames_csv(c.strategy, &mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap().lines().count(), 1 + 40 * 3);
    assert_eq!(String::from_utf8(csv_bytes(&r)).unwrap().lines().count(), 1 + 3);
}

#[test]
fn battery_rows_are_relays_times_samples() {
    let c = small(Strategy::ProposedMaxmin);
    let run = run_battery_experiment(&c, 10.0, 100, 10, None).unwrap();
    let mut out = Vec::new();
    run.write_csv(&mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap().lines().count(), 1 + 8 * 11);

    let idle = run_battery_experiment(&c, 10.0, 0, 10, None).unwrap();
    assert!(idle.final_remaining.iter().all(|&e| e == 1.0));
    assert_eq!(idle.rows.len(), 8);
}

#[test]
fn depletion_is_reported_with_frame_index() {
    let mut c = small(Strategy::Maxmin);
    c.battery.cost_per_symbol = 1e-3;
    match run_ser_sweep(&c, None) {
        Err(Error::NetworkDepleted { frame }) => assert!(frame > 0),
        other => panic!("expected depletion, got {other:?}"),
    }
}

fn training_cfg() -> ExperimentConfig {
    let mut c = ExperimentConfig::default();
    c.training.frames = 640;
    c.training.eval_interval = 5;
    c.training.eval_frames = 20;
    c
}

#[test]
fn training_is_reproducible() {
    let a = run_training(&training_cfg()).unwrap();
    let b = run_training(&training_cfg()).unwrap();
    assert_eq!(a.curve, b.curve);
    assert_eq!(a.last, b.last);
    let mut ca = Vec::new();
    a.write_curve_csv(&mut ca).unwrap();
    assert_eq!(String::from_utf8(ca).unwrap().lines().count(), 1 + 20);
}

#[test]
fn flat_reward_leaves_policy_at_init() {
    let mut c = training_cfg();
    c.rl.reward_scale = 0.0;
    c.rl.reward_offset = 0.0;
    let trained = run_training(&c).unwrap();
    c.training.frames = 0;
    let init = run_training(&c).unwrap();
    assert_eq!(trained.last.policy, init.last.policy);
}

#[test]
fn evaluation_is_frozen() {
    let c = training_cfg();
    let agent = run_training(&c).unwrap().last;
    let a = evaluate_policy(&agent, &c, 10.0, 30).unwrap();
    let b = evaluate_policy(&agent, &c, 10.0, 30).unwrap();
    assert_eq!(a, b);
}

#[test]
fn relay_count_mismatch_is_rejected() {
    let c = ExperimentConfig::default();
    let agent = RlAgent::new(5, RlHyperParams::default(), &mut relaysel_core::substream(1, relaysel_core::Purpose::Init, 0, 0)).unwrap();
    assert!(matches!(evaluate_policy(&agent, &c, 10.0, 10), Err(Error::ShapeMismatch(_))));
}

#[test]
fn uniform_policy_matches_random_selection() {
    let c = ExperimentConfig::default();
    let layout = c.layout().unwrap();
    let env = PointEnv::new(&c, &layout, 5.0);
    let mut agent = RlAgent::new(8, RlHyperParams::default(), &mut relaysel_core::substream(1, relaysel_core::Purpose::Init, 0, 0)).unwrap();
    agent.policy = PolicyParams::zeros(33, &[64], 8).unwrap();
    let n = 3000u64;
    let mut rl = Vec::new();
    let mut rnd = Vec::new();
    run_point(&env, Strategy::Rl, n, HELD_OUT_OFFSET, Some(&agent), |v| rl.push(v.record.symbol_errors as f64)).unwrap();
    run_point(&env, Strategy::Random, n, HELD_OUT_OFFSET, None, |v| rnd.push(v.record.symbol_errors as f64)).unwrap();
    let d: Vec<f64> = rl.iter().zip(&rnd).map(|(a, b)| a - b).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = (var / n as f64).sqrt();
    assert!(mean.abs() < 3.0 * se, "paired difference {mean} ± {se}");
}
