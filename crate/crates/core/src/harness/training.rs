//! REINFORCE training loop and held-out policy evaluation.

use super::config::{ExperimentConfig, Strategy};
use super::engine::{run_point, PointEnv, PointTotals, HELD_OUT_OFFSET, VALIDATION_OFFSET};
use super::sweep::SweepRow;
use crate::error::{Error, Result};
use crate::protocol::{simulate_frame, BatteryState};
use crate::rl::{compute_reward, reinforce_update, Experience, ReplayBuffer, RlAgent};
use crate::rng::{substream, Purpose};
use std::io::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub update: u64,
    pub mean_reward: f64,
    /// Validation SER, present on validation updates only.
    pub eval_ser: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainingReport {
    /// Policy with the lowest validation SER seen.
    pub best: RlAgent,
    /// Policy after the last update.
    pub last: RlAgent,
    pub best_eval_ser: f64,
    pub curve: Vec<CurvePoint>,
}

impl TrainingReport {
    pub fn write_curve_csv<W: Write>(&self, out: W) -> Result<()> {
        write_curve_csv(&self.curve, out)
    }
}

pub fn write_curve_csv<W: Write>(curve: &[CurvePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["update", "mean_batch_reward", "eval_ser"])?;
    for p in curve {
        w.write_record([
            p.update.to_string(),
            p.mean_reward.to_string(),
            p.eval_ser.map(|s| format!("{s:e}")).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn greedy_ser(agent: &RlAgent, env: &PointEnv<'_>, frames: u64, offset: u64) -> Result<PointTotals> {
    run_point(env, Strategy::Rl, frames, offset, Some(agent), |_| {})
}

/// Trains a policy at `cfg.training.ebno_db`.
///
/// Every frame: featurize, rank relays by a sample from π, apply the battery
/// gate, simulate, compare against the AWGN Max-Min shadow run, store the
/// experience. Every `T` frames the policy takes one REINFORCE step.
pub fn run_training(cfg: &ExperimentConfig) -> Result<TrainingReport> {
    cfg.validate()?;
    let layout = cfg.layout()?;
    let tc = &cfg.training;
    let env = PointEnv::new(cfg, &layout, tc.ebno_db);
    let m = layout.num_relays();
    let hyper = cfg.rl.clone();

    let mut agent = RlAgent::new(m, hyper.clone(), &mut substream(cfg.seed, Purpose::Init, 0, 0))?;
    let mut buffer = ReplayBuffer::new(hyper.batch_size);
    let mut battery = BatteryState::new(m, cfg.battery)?;
    let mut curve = Vec::new();
    let mut best: Option<(f64, RlAgent)> = None;
    let mut updates = 0u64;

    for f in 0..tc.frames {
        if tc.episode_frames > 0 && f % tc.episode_frames == 0 {
            battery = BatteryState::new(m, cfg.battery)?;
        }
        let frame = env.draw(f)?;
        let ctx = env.context(&frame, &battery).map_err(|e| match e {
            Error::NoEligibleRelay => Error::NetworkDepleted { frame: f },
            other => other,
        })?;
        let choice = agent.choose_sampled(&ctx, &mut substream(cfg.seed, Purpose::Policy, f, 0))?;
        let trace = env.relay_trace(&frame, choice.relay);
        let outcome = simulate_frame(&env.setup(&frame), &trace, choice.relay, &mut battery)?;
        let shadow = env.shadow_optimum(&frame, &ctx)?;
        let reward = compute_reward(outcome.ser(), shadow.ser(), hyper.reward_scale, hyper.reward_offset);
        buffer.push(Experience {
            state: choice.state,
            action: choice.relay,
            reward,
        });

        if buffer.is_full() {
            let mean_reward = buffer.mean_reward();
            reinforce_update(&mut agent.policy, &mut buffer, hyper.learning_rate)?;
            updates += 1;
            let eval_ser = if tc.eval_interval > 0 && updates.is_multiple_of(tc.eval_interval) {
                let ser = greedy_ser(&agent, &env, tc.eval_frames, VALIDATION_OFFSET)?.ser();
                if best.as_ref().is_none_or(|(b, _)| ser < *b) {
                    best = Some((ser, agent.clone()));
                }
                Some(ser)
            } else {
                None
            };
            curve.push(CurvePoint {
                update: updates,
                mean_reward,
                eval_ser,
            });
        }
    }

    let (best_eval_ser, best) = match best {
        Some(b) => b,
        None => {
            let ser = greedy_ser(&agent, &env, tc.eval_frames, VALIDATION_OFFSET)?.ser();
            (ser, agent.clone())
        }
    };
    Ok(TrainingReport {
        best,
        last: agent,
        best_eval_ser,
        curve,
    })
}

/// Greedy, non-learning execution of a policy on held-out frames.
pub fn evaluate_policy(
    agent: &RlAgent,
    cfg: &ExperimentConfig,
    ebno_db: f64,
    num_frames: u64,
) -> Result<SweepRow> {
    cfg.validate()?;
    let layout = cfg.layout()?;
    if agent.num_relays() != layout.num_relays() {
        return Err(Error::ShapeMismatch(format!(
            "policy was trained for {} relays, config has {}",
            agent.num_relays(),
            layout.num_relays()
        )));
    }
    let env = PointEnv::new(cfg, &layout, ebno_db);
    let totals = greedy_ser(agent, &env, num_frames, HELD_OUT_OFFSET)?;
    Ok(SweepRow {
        strategy: Strategy::Rl,
        ebno_db,
        frames: totals.frames,
        symbol_errors: totals.symbol_errors,
        ser: totals.ser(),
        seed: cfg.seed,
    })
}

/// Any non-learning strategy on the same held-out frames as [`evaluate_policy`].
pub fn evaluate_strategy(
    cfg: &ExperimentConfig,
    strategy: Strategy,
    ebno_db: f64,
    num_frames: u64,
) -> Result<SweepRow> {
    cfg.validate()?;
    let layout = cfg.layout()?;
    let env = PointEnv::new(cfg, &layout, ebno_db);
    let totals = run_point(&env, strategy, num_frames, HELD_OUT_OFFSET, None, |_| {})?;
    Ok(SweepRow {
        strategy,
        ebno_db,
        frames: totals.frames,
        symbol_errors: totals.symbol_errors,
        ser: totals.ser(),
        seed: cfg.seed,
    })
}
