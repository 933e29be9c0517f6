use super::config::{ExperimentConfig, Strategy};
use super::engine::{run_point, FrameRecord, PointEnv};
use crate::error::Result;
use crate::rl::RlAgent;
use rayon::prelude::*;
use std::io::Write;

/// One SER curve point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub strategy: Strategy,
    pub ebno_db: f64,
    pub frames: u64,
    pub symbol_errors: u64,
    pub ser: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// `(ebno_db, record)` per frame, in point order.
    pub frames: Vec<(f64, FrameRecord)>,
}

impl SweepResult {
    pub fn row(&self, ebno_db: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.ebno_db == ebno_db)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["strategy", "ebno_db", "frames", "symbol_errors", "ser", "seed"])?;
        for r in &self.rows {
            w.write_record([
                r.strategy.label().to_string(),
                r.ebno_db.to_string(),
                r.frames.to_string(),
                r.symbol_errors.to_string(),
                format!("{:e}", r.ser),
                r.seed.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// One row per simulated frame.
    pub fn write_frames_csv<W: Write>(&self, strategy: Strategy, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "strategy",
            "ebno_db",
            "frame",
            "relay",
            "symbol_errors",
            "forwarded",
            "relay_bad_fraction",
        ])?;
        for (ebno, r) in &self.frames {
            w.write_record([
                strategy.label().to_string(),
                ebno.to_string(),
                r.frame.to_string(),
                r.relay.map(|m| m.to_string()).unwrap_or_default(),
                r.symbol_errors.to_string(),
                r.forwarded.to_string(),
                r.relay_bad_fraction.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// SER at every grid point for the configured strategy.
///
/// Points run in parallel; each owns its battery and its streams, so the
/// result equals the sequential run bit for bit.
pub fn run_ser_sweep(cfg: &ExperimentConfig, agent: Option<&RlAgent>) -> Result<SweepResult> {
    sweep_impl(cfg, agent, 0, true)
}

pub(crate) fn sweep_impl(
    cfg: &ExperimentConfig,
    agent: Option<&RlAgent>,
    offset: u64,
    parallel: bool,
) -> Result<SweepResult> {
    cfg.validate()?;
    let layout = cfg.layout()?;
    let frames = cfg.frames_per_point();
    let point = |&ebno: &f64| -> Result<(SweepRow, Vec<(f64, FrameRecord)>)> {
        let env = PointEnv::new(cfg, &layout, ebno);
        let mut log = Vec::with_capacity(frames as usize);
        let totals = run_point(&env, cfg.strategy, frames, offset, agent, |v| {
            log.push((ebno, v.record.clone()))
        })?;
        Ok((
            SweepRow {
                strategy: cfg.strategy,
                ebno_db: ebno,
                frames: totals.frames,
                symbol_errors: totals.symbol_errors,
                ser: totals.ser(),
                seed: cfg.seed,
            },
            log,
        ))
    };
    let points: Vec<_> = if parallel {
        cfg.ebno_grid.par_iter().map(point).collect::<Result<_>>()?
    } else {
        cfg.ebno_grid.iter().map(point).collect::<Result<_>>()?
    };
    let mut result = SweepResult::default();
    for (row, log) in points {
        result.rows.push(row);
        result.frames.extend(log);
    }
    Ok(result)
}

/// Sequential reference path of [`run_ser_sweep`].
pub fn run_ser_sweep_sequential(cfg: &ExperimentConfig, agent: Option<&RlAgent>) -> Result<SweepResult> {
    sweep_impl(cfg, agent, 0, false)
}
