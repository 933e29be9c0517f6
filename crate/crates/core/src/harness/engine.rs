//! Per-frame environment shared by every experiment.
//!
//! Frame `f` of a run draws its fading, payload, relay noise states, relay
//! noise samples and destination noise from separate child streams of the
//! root seed. Two strategies run with the same seed therefore face the same
//! channels and the same noise, and a TSMG run shares its Gaussian draws
//! with the matching AWGN run.

use super::config::{Coherence, ExperimentConfig, NoiseModel, Strategy};
use crate::channel::{draw_channels, fixed_channels, ChannelRealization, Link};
use crate::error::{Error, Result};
use crate::noise::{bad_fraction, generate_states, NoiseState, NoiseTrace, TsmgParams};
use crate::phy::SymbolFrame;
use crate::protocol::{
    direct_transmission_frame, simulate_frame, simulate_frame_unmetered, BatteryState, FrameOutcome,
    FrameSetup,
};
use crate::rl::RlAgent;
use crate::rng::{substream, Purpose};
use crate::selection::{select_conventional_maxmin, select_proposed_maxmin, select_random, SelectionContext};
use crate::topology::FieldLayout;

/// Frame index offset of the held-out evaluation frames.
pub const HELD_OUT_OFFSET: u64 = 1 << 40;
/// Frame index offset of the validation frames used during training.
pub const VALIDATION_OFFSET: u64 = 1 << 41;

const DEST_SD: u64 = 0;
const DEST_RD: u64 = 1;

/// Random draws of one frame that do not depend on the selected relay.
#[derive(Debug, Clone)]
pub struct DrawnFrame {
    pub index: u64,
    pub channels: ChannelRealization,
    pub tx: SymbolFrame,
    pub relay_states: Vec<Vec<NoiseState>>,
    pub p_bad: Vec<f64>,
    pub dest_sd: NoiseTrace,
    pub dest_rd: NoiseTrace,
}

/// One Eb/No operating point of one experiment.
#[derive(Debug, Clone)]
pub struct PointEnv<'a> {
    pub cfg: &'a ExperimentConfig,
    pub layout: &'a FieldLayout,
    pub ebno_db: f64,
    pub sigma_g2: f64,
    pub tsmg: TsmgParams,
}

impl<'a> PointEnv<'a> {
    pub fn new(cfg: &'a ExperimentConfig, layout: &'a FieldLayout, ebno_db: f64) -> Self {
        let sigma_g2 = cfg.sigma_g2(ebno_db);
        Self {
            cfg,
            layout,
            ebno_db,
            sigma_g2,
            tsmg: cfg.tsmg(sigma_g2),
        }
    }

    fn gaussian_trace(&self, purpose: Purpose, frame: u64, index: u64) -> NoiseTrace {
        let states = vec![NoiseState::Good; self.cfg.frame_len];
        NoiseTrace::from_states(states, &self.tsmg, &mut substream(self.cfg.seed, purpose, frame, index))
    }

    pub fn draw(&self, frame: u64) -> Result<DrawnFrame> {
        let cfg = self.cfg;
        let k = cfg.frame_len;
        let m = self.layout.num_relays();
        let channels = match cfg.coherence {
            Coherence::None => fixed_channels(self.layout, k)?,
            _ => draw_channels(
                self.layout,
                k,
                cfg.coherence_symbols(),
                &mut substream(cfg.seed, Purpose::Channel, frame, 0),
            )?,
        };
        let tx = SymbolFrame::random(k, &mut substream(cfg.seed, Purpose::Payload, frame, 0));
        let relay_states = (1..=m as u64)
            .map(|r| match cfg.noise {
                NoiseModel::Tsmg => generate_states(
                    &self.tsmg,
                    k,
                    &mut substream(cfg.seed, Purpose::RelayStates, frame, r),
                ),
                NoiseModel::Awgn => Ok(vec![NoiseState::Good; k]),
            })
            .collect::<Result<Vec<_>>>()?;
        let p_bad = relay_states.iter().map(|s| bad_fraction(s)).collect();
        Ok(DrawnFrame {
            index: frame,
            channels,
            tx,
            relay_states,
            p_bad,
            dest_sd: self.gaussian_trace(Purpose::DestinationNoise, frame, DEST_SD),
            dest_rd: self.gaussian_trace(Purpose::DestinationNoise, frame, DEST_RD),
        })
    }

    /// Source-relay noise of relay `m` in frame `f`.
    pub fn relay_trace(&self, frame: &DrawnFrame, relay: usize) -> NoiseTrace {
        NoiseTrace::from_states(
            frame.relay_states[relay - 1].clone(),
            &self.tsmg,
            &mut substream(self.cfg.seed, Purpose::RelaySamples, frame.index, relay as u64),
        )
    }

    pub fn setup<'f>(&self, frame: &'f DrawnFrame) -> FrameSetup<'f> {
        FrameSetup {
            channels: &frame.channels,
            tx: &frame.tx,
            dest_noise_sd: &frame.dest_sd,
            dest_noise_rd: &frame.dest_rd,
            source_power: self.cfg.source_power,
            relay_power: self.cfg.relay_power(),
        }
    }

    /// Selector inputs: frame-averaged gains, genie `P_B`, battery levels.
    pub fn context(&self, frame: &DrawnFrame, battery: &BatteryState) -> Result<SelectionContext> {
        let m = self.layout.num_relays();
        let ch = &frame.channels;
        SelectionContext::from_battery(
            (1..=m).map(|r| ch.mean_power(Link::SourceRelay(r))).collect(),
            (1..=m).map(|r| ch.mean_power(Link::RelayDestination(r))).collect(),
            ch.mean_power(Link::SourceDestination),
            frame.p_bad.clone(),
            battery,
        )
    }

    /// Conventional Max-Min on the same frame with all noise replaced by fresh
    /// Gaussian samples at `σ²_G`. No battery is debited.
    pub fn shadow_optimum(&self, frame: &DrawnFrame, ctx: &SelectionContext) -> Result<FrameOutcome> {
        let relay = select_conventional_maxmin(ctx)?;
        let relay_noise = self.gaussian_trace(Purpose::ShadowNoise, frame.index, relay as u64);
        let sd = self.gaussian_trace(Purpose::ShadowNoise, frame.index, 1000 + DEST_SD);
        let rd = self.gaussian_trace(Purpose::ShadowNoise, frame.index, 1000 + DEST_RD);
        let setup = FrameSetup {
            dest_noise_sd: &sd,
            dest_noise_rd: &rd,
            ..self.setup(frame)
        };
        simulate_frame_unmetered(&setup, &relay_noise, relay)
    }
}

/// Per-frame log entry.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub frame: u64,
    pub relay: Option<usize>,
    pub symbol_errors: usize,
    pub forwarded: usize,
    pub relay_bad_fraction: f64,
}

/// What a frame observer sees after each frame.
pub struct FrameView<'a> {
    pub record: &'a FrameRecord,
    pub context: Option<&'a SelectionContext>,
    pub battery: &'a BatteryState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PointTotals {
    pub frames: u64,
    pub symbol_errors: u64,
    pub symbols: u64,
}

impl PointTotals {
    pub fn ser(&self) -> f64 {
        if self.symbols == 0 {
            0.0
        } else {
            self.symbol_errors as f64 / self.symbols as f64
        }
    }
}

/// Runs `frames` consecutive frames starting at `offset` with a fresh battery.
pub fn run_point(
    env: &PointEnv<'_>,
    strategy: Strategy,
    frames: u64,
    offset: u64,
    agent: Option<&RlAgent>,
    mut observe: impl FnMut(FrameView<'_>),
) -> Result<PointTotals> {
    let mut battery = BatteryState::new(env.layout.num_relays(), env.cfg.battery)?;
    let mut totals = PointTotals::default();
    if strategy == Strategy::Rl && agent.is_none() {
        return Err(crate::error::invalid("the rl strategy needs a trained policy"));
    }
    for f in offset..offset + frames {
        let frame = env.draw(f)?;
        let (outcome, ctx) = if strategy == Strategy::Dt {
            (direct_transmission_frame(&env.setup(&frame))?, None)
        } else {
            let ctx = env.context(&frame, &battery).map_err(|e| match e {
                Error::NoEligibleRelay => Error::NetworkDepleted { frame: f - offset },
                other => other,
            })?;
            let relay = match strategy {
                Strategy::Maxmin => select_conventional_maxmin(&ctx)?,
                Strategy::ProposedMaxmin => select_proposed_maxmin(&ctx)?,
                Strategy::Random => {
                    select_random(&ctx, &mut substream(env.cfg.seed, Purpose::Selection, f, 0))?
                }
                Strategy::Rl => agent.expect("checked above").choose_greedy(&ctx)?.relay,
                Strategy::Dt => unreachable!(),
            };
            let trace = env.relay_trace(&frame, relay);
            let out = simulate_frame(&env.setup(&frame), &trace, relay, &mut battery)?;
            (out, Some(ctx))
        };
        let record = FrameRecord {
            frame: f - offset,
            relay: outcome.selected_relay,
            symbol_errors: outcome.symbol_errors,
            forwarded: outcome.forwarded(),
            relay_bad_fraction: outcome.relay_bad_fraction,
        };
        totals.frames += 1;
        totals.symbol_errors += outcome.symbol_errors as u64;
        totals.symbols += frame.tx.len() as u64;
        observe(FrameView {
            record: &record,
            context: ctx.as_ref(),
            battery: &battery,
        });
    }
    Ok(totals)
}
