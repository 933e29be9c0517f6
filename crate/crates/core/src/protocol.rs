//! Two-slot ideal decode-and-forward frame with genie symbol discard.
//!
//! Slot 1: the source broadcasts to the destination and the relays. Slot 2:
//! the selected relay forwards only the symbols it received in a good noise
//! state and decoded correctly. The destination combines the direct and
//! relayed branches with MRC wherever the relay forwarded, and falls back to
//! the direct branch elsewhere.

use crate::channel::{ChannelRealization, Link};
use crate::error::{invalid, Error, Result};
use crate::noise::{NoiseState, NoiseTrace};
use crate::phy::{count_symbol_errors, mrc_combine, qpsk_demodulate, QpskPoint, SymbolFrame};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Battery model: `E₀` per relay, a fixed energy per forwarded symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryModel {
    pub initial: f64,
    pub cost_per_symbol: f64,
}

impl Default for BatteryModel {
    fn default() -> Self {
        Self {
            initial: 1.0,
            cost_per_symbol: 4e-7,
        }
    }
}

/// Residual energy of every relay.
///
/// Consumption is tracked as an integer count of forwarded symbols, so the
/// energy ledger is exact: a relay is depleted once it has forwarded
/// `floor(E₀ / c)` symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct BatteryState {
    model: BatteryModel,
    capacity: u64,
    spent: Vec<u64>,
}

impl BatteryState {
    pub fn new(num_relays: usize, model: BatteryModel) -> Result<Self> {
        if !(model.initial > 0.0 && model.initial.is_finite()) {
            return Err(invalid("initial battery energy must be positive"));
        }
        if !(model.cost_per_symbol >= 0.0 && model.cost_per_symbol.is_finite()) {
            return Err(invalid("per-symbol cost must be non-negative"));
        }
        let capacity = if model.cost_per_symbol == 0.0 {
            u64::MAX
        } else {
            // guard against 1/4e-7 landing a hair under the integer
            ((model.initial / model.cost_per_symbol) * (1.0 + 1e-12)).floor() as u64
        };
        Ok(Self {
            model,
            capacity,
            spent: vec![0; num_relays],
        })
    }

    /// Battery with explicit residual energies, for tests and pinned scenarios.
    pub fn with_remaining(model: BatteryModel, remaining: &[f64]) -> Result<Self> {
        let mut b = Self::new(remaining.len(), model)?;
        for (m, &r) in remaining.iter().enumerate() {
            if !(0.0..=model.initial).contains(&r) {
                return Err(invalid(format!("remaining energy {r} outside [0, E0]")));
            }
            b.spent[m] = if model.cost_per_symbol == 0.0 {
                0
            } else {
                (((model.initial - r) / model.cost_per_symbol).round() as u64).min(b.capacity)
            };
        }
        Ok(b)
    }

    pub fn model(&self) -> BatteryModel {
        self.model
    }

    pub fn num_relays(&self) -> usize {
        self.spent.len()
    }

    fn slot(&self, relay: usize) -> Result<usize> {
        if (1..=self.spent.len()).contains(&relay) {
            Ok(relay - 1)
        } else {
            Err(invalid(format!("relay {relay} does not exist")))
        }
    }

    /// Residual energy `g(R_m)` of relay `m` (1-based).
    pub fn remaining(&self, relay: usize) -> f64 {
        let s = self.spent[relay - 1];
        if s >= self.capacity {
            0.0
        } else {
            (self.model.initial - self.model.cost_per_symbol * s as f64).max(0.0)
        }
    }

    pub fn remaining_all(&self) -> Vec<f64> {
        (1..=self.spent.len()).map(|m| self.remaining(m)).collect()
    }

    pub fn is_eligible(&self, relay: usize) -> bool {
        self.spent[relay - 1] < self.capacity
    }

    pub fn eligible(&self) -> Vec<usize> {
        (1..=self.spent.len()).filter(|&m| self.is_eligible(m)).collect()
    }

    /// Symbols relay `m` can still forward.
    pub fn symbol_budget(&self, relay: usize) -> u64 {
        self.capacity.saturating_sub(self.spent[relay - 1])
    }

    pub fn symbols_forwarded(&self, relay: usize) -> u64 {
        self.spent[relay - 1]
    }

    /// Energy consumed so far by relay `m`.
    pub fn consumed(&self, relay: usize) -> f64 {
        self.model.cost_per_symbol * self.spent[relay - 1] as f64
    }

    fn debit(&mut self, relay: usize, symbols: u64) -> Result<f64> {
        let slot = self.slot(relay)?;
        if symbols > self.capacity - self.spent[slot] {
            return Err(Error::DepletedRelay(relay));
        }
        self.spent[slot] += symbols;
        Ok(self.model.cost_per_symbol * symbols as f64)
    }
}

/// Everything the air interface needs for one frame.
#[derive(Debug, Clone, Copy)]
pub struct FrameSetup<'a> {
    pub channels: &'a ChannelRealization,
    pub tx: &'a SymbolFrame,
    /// Noise at the destination on the S–D branch.
    pub dest_noise_sd: &'a NoiseTrace,
    /// Noise at the destination on the R–D branch.
    pub dest_noise_rd: &'a NoiseTrace,
    /// Source power per symbol `P_S`.
    pub source_power: f64,
    /// Relay power per symbol `P_R`.
    pub relay_power: f64,
}

impl FrameSetup<'_> {
    fn validate(&self) -> Result<usize> {
        let k = self.tx.len();
        if k == 0 {
            return Err(invalid("empty frame"));
        }
        for len in [self.channels.frame_len(), self.dest_noise_sd.len(), self.dest_noise_rd.len()] {
            if len != k {
                return Err(Error::LengthMismatch { expected: k, actual: len });
            }
        }
        if !(self.source_power > 0.0 && self.relay_power > 0.0) {
            return Err(invalid("transmit powers must be positive"));
        }
        Ok(k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameOutcome {
    /// `None` for direct transmission.
    pub selected_relay: Option<usize>,
    pub forwarded_mask: Vec<bool>,
    pub decisions: Vec<QpskPoint>,
    pub symbol_errors: usize,
    pub relay_bad_fraction: f64,
    pub energy_spent: f64,
}

impl FrameOutcome {
    pub fn ser(&self) -> f64 {
        self.symbol_errors as f64 / self.decisions.len() as f64
    }

    pub fn forwarded(&self) -> usize {
        self.forwarded_mask.iter().filter(|&&f| f).count()
    }
}

/// Relay-side slot-1 processing: which symbols may be forwarded.
///
/// A symbol is forwardable when its noise state was good and the relay's
/// hard decision matches the transmitted point. At most `budget` symbols are
/// marked, in frame order.
pub fn relay_forward_mask(
    setup: &FrameSetup<'_>,
    relay: usize,
    relay_noise: &NoiseTrace,
    budget: u64,
) -> Result<Vec<bool>> {
    let k = setup.validate()?;
    if relay_noise.len() != k {
        return Err(Error::LengthMismatch { expected: k, actual: relay_noise.len() });
    }
    let amp = setup.source_power.sqrt();
    let mut left = budget;
    let mut mask = Vec::with_capacity(k);
    for (i, (&x, &point)) in setup.tx.symbols().iter().zip(setup.tx.points()).enumerate() {
        let h = setup.channels.gain(Link::SourceRelay(relay), i);
        let y = amp * h * x + relay_noise.samples()[i];
        let good = relay_noise.states()[i] == NoiseState::Good;
        // conj(h)·y has the decision regions of h†y/|h|; h = 0 decodes by tie rule
        let correct = qpsk_demodulate(h.conj() * y) == point;
        let fwd = good && correct && left > 0;
        if fwd {
            left -= 1;
        }
        mask.push(fwd);
    }
    Ok(mask)
}

fn destination_decisions(
    setup: &FrameSetup<'_>,
    relay: Option<usize>,
    mask: &[bool],
) -> Result<Vec<QpskPoint>> {
    let a_s = setup.source_power.sqrt();
    let a_r = setup.relay_power.sqrt();
    let mut out = Vec::with_capacity(mask.len());
    for (k, &x) in setup.tx.symbols().iter().enumerate() {
        let h_sd = setup.channels.gain(Link::SourceDestination, k);
        let y_sd = a_s * h_sd * x + setup.dest_noise_sd.samples()[k];
        let z = match relay {
            Some(m) if mask[k] => {
                let h_rd = setup.channels.gain(Link::RelayDestination(m), k);
                let y_rd = a_r * h_rd * x + setup.dest_noise_rd.samples()[k];
                let w = [a_s * h_sd, a_r * h_rd];
                if w[0].norm_sqr() + w[1].norm_sqr() == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    mrc_combine(&w, &[y_sd, y_rd])?
                }
            }
            _ => h_sd.conj() * y_sd,
        };
        out.push(qpsk_demodulate(z));
    }
    Ok(out)
}

fn finish(
    setup: &FrameSetup<'_>,
    relay: Option<usize>,
    mask: Vec<bool>,
    relay_bad_fraction: f64,
    energy_spent: f64,
) -> Result<FrameOutcome> {
    let decisions = destination_decisions(setup, relay, &mask)?;
    let symbol_errors = count_symbol_errors(setup.tx, &decisions)?;
    Ok(FrameOutcome {
        selected_relay: relay,
        forwarded_mask: mask,
        decisions,
        symbol_errors,
        relay_bad_fraction,
        energy_spent,
    })
}

/// Cooperative frame through relay `selected`, debiting its battery.
pub fn simulate_frame(
    setup: &FrameSetup<'_>,
    relay_noise: &NoiseTrace,
    selected: usize,
    battery: &mut BatteryState,
) -> Result<FrameOutcome> {
    battery.slot(selected)?;
    if selected > setup.channels.num_relays() {
        return Err(invalid(format!("relay {selected} does not exist")));
    }
    if !battery.is_eligible(selected) {
        return Err(Error::DepletedRelay(selected));
    }
    let mask = relay_forward_mask(setup, selected, relay_noise, battery.symbol_budget(selected))?;
    let forwarded = mask.iter().filter(|&&f| f).count() as u64;
    let energy = battery.debit(selected, forwarded)?;
    finish(setup, Some(selected), mask, relay_noise.bad_fraction(), energy)
}

/// Cooperative frame without battery accounting (shadow evaluations).
pub fn simulate_frame_unmetered(
    setup: &FrameSetup<'_>,
    relay_noise: &NoiseTrace,
    selected: usize,
) -> Result<FrameOutcome> {
    if !(1..=setup.channels.num_relays()).contains(&selected) {
        return Err(invalid(format!("relay {selected} does not exist")));
    }
    let mask = relay_forward_mask(setup, selected, relay_noise, u64::MAX)?;
    finish(setup, Some(selected), mask, relay_noise.bad_fraction(), 0.0)
}

/// Single-slot S→D transmission, detection on the direct branch only.
pub fn direct_transmission_frame(setup: &FrameSetup<'_>) -> Result<FrameOutcome> {
    let k = setup.validate()?;
    finish(setup, None, vec![false; k], 0.0, 0.0)
}
