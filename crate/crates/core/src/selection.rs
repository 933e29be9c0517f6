//! Relay-selection strategies over a per-frame [`SelectionContext`].
//!
//! Relays are indexed `1..=M`. Every strategy skips relays whose battery is
//! empty, and every tie resolves to the lowest relay index.

use crate::error::{invalid, Error, Result};
use crate::protocol::BatteryState;
use crate::rng::SimRng;
use rand::Rng;

/// Size of the low-`P_B` candidate subset Ω.
pub const CANDIDATE_SET_SIZE: usize = 3;

/// Per-frame selector inputs under perfect CSI and genie noise-state knowledge.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionContext {
    gains_sr: Vec<f64>,
    gains_rd: Vec<f64>,
    gain_sd: f64,
    p_bad: Vec<f64>,
    battery: Vec<f64>,
    initial_energy: f64,
}

impl SelectionContext {
    pub fn new(
        gains_sr: Vec<f64>,
        gains_rd: Vec<f64>,
        gain_sd: f64,
        p_bad: Vec<f64>,
        battery: Vec<f64>,
        initial_energy: f64,
    ) -> Result<Self> {
        let m = gains_sr.len();
        if m == 0 {
            return Err(invalid("context needs at least one relay"));
        }
        for len in [gains_rd.len(), p_bad.len(), battery.len()] {
            if len != m {
                return Err(Error::LengthMismatch { expected: m, actual: len });
            }
        }
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !gains_sr.iter().chain(&gains_rd).all(|&g| finite_nonneg(g)) || !finite_nonneg(gain_sd) {
            return Err(invalid("channel gains must be finite and non-negative"));
        }
        if !p_bad.iter().all(|p| (0.0..=1.0).contains(p)) {
            return Err(invalid("bad-state fractions must lie in [0, 1]"));
        }
        if initial_energy.is_nan() || initial_energy <= 0.0 || !battery.iter().all(|&b| (0.0..=initial_energy).contains(&b)) {
            return Err(invalid("battery levels must lie in [0, E0]"));
        }
        if battery.iter().all(|&b| b <= 0.0) {
            return Err(Error::NoEligibleRelay);
        }
        Ok(Self {
            gains_sr,
            gains_rd,
            gain_sd,
            p_bad,
            battery,
            initial_energy,
        })
    }

    /// Convenience constructor reading residual energies from a live battery.
    pub fn from_battery(
        gains_sr: Vec<f64>,
        gains_rd: Vec<f64>,
        gain_sd: f64,
        p_bad: Vec<f64>,
        battery: &BatteryState,
    ) -> Result<Self> {
        Self::new(
            gains_sr,
            gains_rd,
            gain_sd,
            p_bad,
            battery.remaining_all(),
            battery.model().initial,
        )
    }

    pub fn num_relays(&self) -> usize {
        self.gains_sr.len()
    }

    pub fn gain_sr(&self, relay: usize) -> f64 {
        self.gains_sr[relay - 1]
    }

    pub fn gain_rd(&self, relay: usize) -> f64 {
        self.gains_rd[relay - 1]
    }

    pub fn gain_sd(&self) -> f64 {
        self.gain_sd
    }

    pub fn p_bad(&self, relay: usize) -> f64 {
        self.p_bad[relay - 1]
    }

    pub fn battery(&self) -> &[f64] {
        &self.battery
    }

    pub fn remaining(&self, relay: usize) -> f64 {
        self.battery[relay - 1]
    }

    pub fn initial_energy(&self) -> f64 {
        self.initial_energy
    }

    pub fn is_eligible(&self, relay: usize) -> bool {
        self.battery[relay - 1] > 0.0
    }

    pub fn eligible(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.num_relays()).filter(|&m| self.is_eligible(m))
    }

    /// Bottleneck gain `min(|h_SR|², |h_RD|²)` of a relay.
    pub fn bottleneck(&self, relay: usize) -> f64 {
        self.gain_sr(relay).min(self.gain_rd(relay))
    }
}

/// First index attaining the maximum score.
fn argmax_first(candidates: impl IntoIterator<Item = (usize, f64)>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (m, s) in candidates {
        match best {
            Some((_, b)) if s <= b => {}
            _ => best = Some((m, s)),
        }
    }
    best.map(|(m, _)| m)
}

/// Conventional Max-Min: maximize the weaker hop over eligible relays.
pub fn select_conventional_maxmin(ctx: &SelectionContext) -> Result<usize> {
    argmax_first(ctx.eligible().map(|m| (m, ctx.bottleneck(m)))).ok_or(Error::NoEligibleRelay)
}

/// Battery penalty `α_m = (g_m − min g) / (max g − min g)`, 1 when all levels match.
pub fn penalty_alpha(battery: &[f64], relay: usize) -> f64 {
    let (lo, hi) = battery
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &g| (lo.min(g), hi.max(g)));
    if hi <= lo {
        return 1.0;
    }
    (battery[relay - 1] - lo) / (hi - lo)
}

/// The up-to-three eligible relays with the lowest bad-state fraction.
pub fn candidate_set(ctx: &SelectionContext) -> Vec<usize> {
    let mut eligible: Vec<usize> = ctx.eligible().collect();
    // stable sort keeps lower indices first on equal P_B
    eligible.sort_by(|&a, &b| ctx.p_bad(a).total_cmp(&ctx.p_bad(b)));
    eligible.truncate(CANDIDATE_SET_SIZE);
    eligible
}

/// Noise-aware battery-fair Max-Min.
///
/// Restricts to the low-`P_B` subset Ω, then maximizes the bottleneck gain
/// weighted by the battery penalty. When every score in Ω is zero the raw
/// bottleneck decides.
pub fn select_proposed_maxmin(ctx: &SelectionContext) -> Result<usize> {
    let omega = candidate_set(ctx);
    if omega.is_empty() {
        return Err(Error::NoEligibleRelay);
    }
    let scores: Vec<(usize, f64)> = omega
        .iter()
        .map(|&m| (m, ctx.bottleneck(m) * penalty_alpha(ctx.battery(), m)))
        .collect();
    if scores.iter().all(|&(_, s)| s <= 0.0) {
        return argmax_first(omega.iter().map(|&m| (m, ctx.bottleneck(m)))).ok_or(Error::NoEligibleRelay);
    }
    argmax_first(scores).ok_or(Error::NoEligibleRelay)
}

/// Uniformly random eligible relay.
pub fn select_random(ctx: &SelectionContext, rng: &mut SimRng) -> Result<usize> {
    let eligible: Vec<usize> = ctx.eligible().collect();
    if eligible.is_empty() {
        return Err(Error::NoEligibleRelay);
    }
    Ok(eligible[rng.random_range(0..eligible.len())])
}
