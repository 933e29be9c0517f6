use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use relaysel_core::harness::{ExperimentConfig, PointEnv};
use relaysel_core::noise::generate_tsmg;
use relaysel_core::rl::PolicyParams;
use relaysel_core::{simulate_frame, BatteryState, SimRng, TsmgParams};

fn frame(c: &mut Criterion) {
    let cfg = ExperimentConfig::default();
    let layout = cfg.layout().unwrap();
    let env = PointEnv::new(&cfg, &layout, 10.0);
    c.bench_function("draw_frame_k1000_m8", |b| b.iter(|| env.draw(black_box(7)).unwrap()));
    let drawn = env.draw(7).unwrap();
    let trace = env.relay_trace(&drawn, 3);
    c.bench_function("simulate_frame_k1000", |b| {
        b.iter(|| {
            let mut battery = BatteryState::new(8, cfg.battery).unwrap();
            simulate_frame(&env.setup(&drawn), &trace, 3, &mut battery).unwrap()
        })
    });
}

fn noise(c: &mut Criterion) {
    let p = TsmgParams::reference(0.05);
    c.bench_function("tsmg_trace_10k", |b| {
        let mut rng = SimRng::seed_from_u64(1);
        b.iter(|| generate_tsmg(&p, 10_000, &mut rng).unwrap())
    });
}

fn policy(c: &mut Criterion) {
    let mut rng = SimRng::seed_from_u64(2);
    let p = PolicyParams::init(33, &[64], 8, 0.05, &mut rng).unwrap();
    let s: Vec<f64> = (0..33).map(|i| (i as f64).sin()).collect();
    c.bench_function("policy_forward_33_64_8", |b| b.iter(|| p.forward(black_box(&s)).unwrap()));
    c.bench_function("policy_score_gradient_33_64_8", |b| b.iter(|| p.grad_log_policy(black_box(&s), 3).unwrap()));
}

criterion_group!(benches, frame, noise, policy);
criterion_main!(benches);
