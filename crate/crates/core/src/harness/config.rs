use crate::error::{invalid, Result};
use crate::phy::db_to_linear;
use crate::protocol::BatteryModel;
use crate::rl::RlHyperParams;
use crate::rng::{substream, Purpose};
use crate::topology::{FieldLayout, Point};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Direct transmission, no relay.
    Dt,
    /// Conventional Max-Min.
    Maxmin,
    /// Noise-aware battery-fair Max-Min.
    ProposedMaxmin,
    /// REINFORCE policy with battery gate.
    Rl,
    /// Uniformly random eligible relay.
    Random,
}

impl Strategy {
    pub fn label(self) -> &'static str {
        match self {
            Strategy::Dt => "dt",
            Strategy::Maxmin => "maxmin",
            Strategy::ProposedMaxmin => "proposed_maxmin",
            Strategy::Rl => "rl",
            Strategy::Random => "random",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Strategy {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dt" => Ok(Strategy::Dt),
            "maxmin" => Ok(Strategy::Maxmin),
            "proposed_maxmin" | "proposed" => Ok(Strategy::ProposedMaxmin),
            "rl" => Ok(Strategy::Rl),
            "random" => Ok(Strategy::Random),
            other => Err(invalid(format!("unknown strategy '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// Impulsive noise on the source-relay links.
    Tsmg,
    /// Gaussian noise everywhere.
    Awgn,
}

impl FromStr for NoiseModel {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsmg" => Ok(NoiseModel::Tsmg),
            "awgn" => Ok(NoiseModel::Awgn),
            other => Err(invalid(format!("unknown noise model '{other}'"))),
        }
    }
}

/// Fading coherence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coherence {
    /// One gain per frame (slow fading).
    Frame,
    /// One gain per symbol (fast fading).
    Symbol,
    /// No fading: gains fixed at the path-loss amplitude.
    None,
}

impl FromStr for Coherence {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frame" | "slow" => Ok(Coherence::Frame),
            "symbol" | "fast" => Ok(Coherence::Symbol),
            "none" | "off" => Ok(Coherence::None),
            other => Err(invalid(format!("unknown coherence '{other}'"))),
        }
    }
}

/// Everything an experiment depends on besides code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// Total node count including source and destination.
    pub nodes: usize,
    pub frame_len: usize,
    pub symbols_per_point: u64,
    /// Overrides `symbols_per_point / frame_len` when set.
    pub frames: Option<u64>,
    pub gamma: f64,
    pub ratio: f64,
    pub p_bad: f64,
    pub path_loss_exponent: f64,
    pub field_side: f64,
    pub coherence: Coherence,
    pub noise: NoiseModel,
    pub ebno_grid: Vec<f64>,
    pub strategy: Strategy,
    pub seed: u64,
    pub source_power: f64,
    /// Relay power; defaults to the source power.
    pub relay_power: Option<f64>,
    pub battery: BatteryModel,
    /// Pinned relay coordinates instead of random placement.
    pub relays: Option<Vec<Point>>,
    /// Pinned layout file (JSON) instead of random placement.
    pub layout_file: Option<PathBuf>,
    pub rl: RlHyperParams,
    pub training: TrainingConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingConfig {
    /// Eb/No the agent trains at.
    pub ebno_db: f64,
    pub frames: u64,
    /// Batteries are recharged every this many training frames.
    pub episode_frames: u64,
    /// Policy is validated every this many updates.
    pub eval_interval: u64,
    pub eval_frames: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            ebno_db: 10.0,
            frames: 200_000,
            episode_frames: 5_000,
            eval_interval: 50,
            eval_frames: 200,
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            nodes: 10,
            frame_len: 1000,
            symbols_per_point: 10_000 * 10,
            frames: None,
            gamma: 100.0,
            ratio: 100.0,
            p_bad: 0.1,
            path_loss_exponent: 2.0,
            field_side: 1.0,
            coherence: Coherence::Frame,
            noise: NoiseModel::Tsmg,
            ebno_grid: vec![0.0, 5.0, 10.0, 15.0, 20.0],
            strategy: Strategy::ProposedMaxmin,
            seed: 1,
            source_power: 1.0,
            relay_power: None,
            battery: BatteryModel::default(),
            relays: None,
            layout_file: None,
            rl: RlHyperParams::default(),
            training: TrainingConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg = Self::parse_json(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses without validating, for callers that apply overrides first.
    pub fn parse_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 3 {
            return Err(invalid("need at least source, destination and one relay"));
        }
        if self.frame_len == 0 {
            return Err(invalid("frame length must be positive"));
        }
        if self.frames.is_none() && !self.symbols_per_point.is_multiple_of(self.frame_len as u64) {
            return Err(invalid("symbols per point must be a multiple of the frame length"));
        }
        let positive = |p: f64| p > 0.0;
        if !positive(self.source_power) || self.relay_power.is_some_and(|p| !positive(p)) {
            return Err(invalid("transmit powers must be positive"));
        }
        if self.ebno_grid.iter().any(|e| !e.is_finite()) {
            return Err(invalid("Eb/No grid must be finite"));
        }
        if self.rl.batch_size == 0 {
            return Err(invalid("RL batch size must be positive"));
        }
        if let Some(r) = &self.relays {
            if r.len() != self.num_relays() {
                return Err(invalid(format!(
                    "{} pinned relays given for {} nodes",
                    r.len(),
                    self.nodes
                )));
            }
        }
        // TSMG parameters validated against a unit good-state power
        crate::noise::transition_matrix(&self.tsmg(1.0))?;
        crate::protocol::BatteryState::new(1, self.battery)?;
        Ok(())
    }

    pub fn num_relays(&self) -> usize {
        self.nodes - 2
    }

    pub fn frames_per_point(&self) -> u64 {
        self.frames
            .unwrap_or(self.symbols_per_point / self.frame_len as u64)
    }

    pub fn coherence_symbols(&self) -> usize {
        match self.coherence {
            Coherence::Frame | Coherence::None => self.frame_len,
            Coherence::Symbol => 1,
        }
    }

    pub fn relay_power(&self) -> f64 {
        self.relay_power.unwrap_or(self.source_power)
    }

    /// Good-state noise power `N_o` for a given Eb/No, with `E_b = P_S / 2`.
    pub fn sigma_g2(&self, ebno_db: f64) -> f64 {
        self.source_power / (2.0 * db_to_linear(ebno_db))
    }

    pub fn tsmg(&self, sigma_g2: f64) -> crate::noise::TsmgParams {
        crate::noise::TsmgParams {
            gamma: self.gamma,
            ratio: self.ratio,
            p_bad: self.p_bad,
            sigma_g2,
        }
    }

    /// Geometry for this seed: the pinned one when configured, otherwise a
    /// fresh placement from the layout stream.
    pub fn layout(&self) -> Result<FieldLayout> {
        if let Some(path) = &self.layout_file {
            let l = FieldLayout::load(path)?;
            if l.num_relays() != self.num_relays() {
                return Err(invalid(format!(
                    "layout file has {} relays, config expects {}",
                    l.num_relays(),
                    self.num_relays()
                )));
            }
            return Ok(l);
        }
        if let Some(relays) = &self.relays {
            return FieldLayout::with_relays(self.field_side, self.path_loss_exponent, relays.clone());
        }
        FieldLayout::place(
            &mut substream(self.seed, Purpose::Layout, 0, 0),
            self.num_relays(),
            self.field_side,
            self.path_loss_exponent,
        )
    }
}
