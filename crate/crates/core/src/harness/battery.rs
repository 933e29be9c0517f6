use super::config::ExperimentConfig;
use super::engine::{run_point, PointEnv};
use crate::error::{invalid, Result};
use crate::rl::RlAgent;
use crate::selection::candidate_set;
use std::io::Write;

/// Residual-energy trajectory of every relay over a long run.
#[derive(Debug, Clone, PartialEq)]
pub struct BatteryRun {
    /// `(frames elapsed, relay, remaining)` for every sample and relay.
    pub rows: Vec<(u64, usize, f64)>,
    pub final_remaining: Vec<f64>,
    pub selections: Vec<u64>,
    /// Relays that appeared in the low-`P_B` candidate set at least once.
    pub ever_candidate: Vec<bool>,
    pub symbol_errors: u64,
    pub frames: u64,
}

impl BatteryRun {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["frame", "relay", "remaining"])?;
        for (f, m, r) in &self.rows {
            w.write_record([f.to_string(), m.to_string(), r.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// `min / max` of the final residual energies.
    pub fn min_max_ratio(&self) -> f64 {
        let (lo, hi) = min_max(self.final_remaining.iter().copied());
        if hi <= 0.0 {
            1.0
        } else {
            lo / hi
        }
    }

    /// `(max − min) / max` over the relays that were ever candidates.
    pub fn candidate_spread(&self) -> f64 {
        let (lo, hi) = min_max(
            self.final_remaining
                .iter()
                .zip(&self.ever_candidate)
                .filter(|(_, &c)| c)
                .map(|(&r, _)| r),
        );
        if hi <= 0.0 {
            0.0
        } else {
            (hi - lo) / hi
        }
    }

    /// Coefficient of variation of the final residual energies.
    pub fn coefficient_of_variation(&self) -> f64 {
        coefficient_of_variation(&self.final_remaining)
    }
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

pub fn coefficient_of_variation(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}

/// Runs the configured strategy for `num_frames` frames at one Eb/No and
/// samples every relay's battery every `sample_every` frames (plus the
/// initial state).
pub fn run_battery_experiment(
    cfg: &ExperimentConfig,
    ebno_db: f64,
    num_frames: u64,
    sample_every: u64,
    agent: Option<&RlAgent>,
) -> Result<BatteryRun> {
    cfg.validate()?;
    if sample_every == 0 {
        return Err(invalid("sampling period must be positive"));
    }
    let layout = cfg.layout()?;
    let m = layout.num_relays();
    let env = PointEnv::new(cfg, &layout, ebno_db);
    let e0 = cfg.battery.initial;
    let mut rows: Vec<(u64, usize, f64)> = (1..=m).map(|r| (0, r, e0)).collect();
    let mut final_remaining = vec![e0; m];
    let mut selections = vec![0u64; m];
    let mut ever_candidate = vec![false; m];
    let totals = run_point(&env, cfg.strategy, num_frames, 0, agent, |v| {
        if let Some(r) = v.record.relay {
            selections[r - 1] += 1;
        }
        if let Some(ctx) = v.context {
            for r in candidate_set(ctx) {
                ever_candidate[r - 1] = true;
            }
        }
        let elapsed = v.record.frame + 1;
        final_remaining = v.battery.remaining_all();
        if elapsed % sample_every == 0 {
            rows.extend(final_remaining.iter().enumerate().map(|(i, &e)| (elapsed, i + 1, e)));
        }
    })?;
    Ok(BatteryRun {
        rows,
        final_remaining,
        selections,
        ever_candidate,
        symbol_errors: totals.symbol_errors,
        frames: totals.frames,
    })
}
