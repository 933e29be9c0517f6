use clap::{Args, Parser, Subcommand};
use relaysel_core::harness::{Coherence, ExperimentConfig, NoiseModel, Strategy};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "relaysel", version, about = "Relay selection under bursty impulsive noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// SER versus Eb/No for one strategy.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Summary CSV (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-frame CSV.
        #[arg(long)]
        frames_out: Option<PathBuf>,
        /// Policy checkpoint for `--strategy rl`.
        #[arg(long)]
        policy: Option<PathBuf>,
        /// Write the node layout used by the run.
        #[arg(long)]
        layout_out: Option<PathBuf>,
    },
    /// Residual battery trajectories.
    Battery {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10.0)]
        ebno: f64,
        #[arg(long = "num-frames", default_value_t = 10_000)]
        num_frames: u64,
        #[arg(long, default_value_t = 100)]
        sample_every: u64,
        #[arg(long)]
        policy: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a REINFORCE policy.
    Train {
        #[command(flatten)]
        common: Common,
        /// Best-validation checkpoint.
        #[arg(long, default_value = "policy.json")]
        policy_out: PathBuf,
        /// Learning curve CSV (stdout when omitted).
        #[arg(long)]
        curve_out: Option<PathBuf>,
        /// Checkpoint after the final update.
        #[arg(long)]
        last_out: Option<PathBuf>,
    },
    /// Greedy evaluation of a trained policy on held-out frames.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        policy: PathBuf,
        /// Single Eb/No point; the grid is used when omitted.
        #[arg(long)]
        ebno: Option<f64>,
        #[arg(long = "num-frames")]
        num_frames: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump a noise trace as `k,state,re,im`.
    NoiseTrace {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10.0)]
        ebno: f64,
        #[arg(long, default_value_t = 10_000)]
        len: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Experiment flags; each overrides the JSON config when given.
#[derive(Debug, Args)]
pub struct Common {
    /// JSON experiment config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub frame_len: Option<usize>,
    #[arg(long)]
    pub symbols_per_point: Option<u64>,
    /// Frames per Eb/No point, overriding symbols-per-point.
    #[arg(long)]
    pub frames: Option<u64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub p_bad: Option<f64>,
    #[arg(long)]
    pub path_loss_exponent: Option<f64>,
    #[arg(long)]
    pub field_side: Option<f64>,
    #[arg(long, value_parser = parse::<Coherence>)]
    pub coherence: Option<Coherence>,
    #[arg(long, value_parser = parse::<NoiseModel>)]
    pub noise: Option<NoiseModel>,
    /// Comma-separated Eb/No values in dB.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub ebno_grid: Option<Vec<f64>>,
    #[arg(long, value_parser = parse::<Strategy>)]
    pub strategy: Option<Strategy>,
    #[arg(long)]
    pub source_power: Option<f64>,
    #[arg(long)]
    pub relay_power: Option<f64>,
    #[arg(long)]
    pub battery_initial: Option<f64>,
    #[arg(long)]
    pub battery_cost: Option<f64>,
    /// Pinned node layout (JSON).
    #[arg(long)]
    pub layout: Option<PathBuf>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub reward_scale: Option<f64>,
    #[arg(long)]
    pub reward_offset: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub train_ebno: Option<f64>,
    #[arg(long)]
    pub train_frames: Option<u64>,
    #[arg(long)]
    pub episode_frames: Option<u64>,
    #[arg(long)]
    pub eval_interval: Option<u64>,
    #[arg(long)]
    pub eval_frames: Option<u64>,
}

fn parse<T: std::str::FromStr<Err = relaysel_core::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: relaysel_core::Error| e.to_string())
}

macro_rules! set {
    ($src:expr => $dst:expr) => {
        if let Some(v) = $src.clone() {
            $dst = v;
        }
    };
}

impl Common {
    pub fn apply(&self, c: &mut ExperimentConfig) {
        set!(self.seed => c.seed);
        set!(self.nodes => c.nodes);
        set!(self.frame_len => c.frame_len);
        set!(self.symbols_per_point => c.symbols_per_point);
        if self.frames.is_some() {
            c.frames = self.frames;
        }
        set!(self.gamma => c.gamma);
        set!(self.ratio => c.ratio);
        set!(self.p_bad => c.p_bad);
        set!(self.path_loss_exponent => c.path_loss_exponent);
        set!(self.field_side => c.field_side);
        set!(self.coherence => c.coherence);
        set!(self.noise => c.noise);
        set!(self.ebno_grid => c.ebno_grid);
        set!(self.strategy => c.strategy);
        set!(self.source_power => c.source_power);
        if self.relay_power.is_some() {
            c.relay_power = self.relay_power;
        }
        set!(self.battery_initial => c.battery.initial);
        set!(self.battery_cost => c.battery.cost_per_symbol);
        if self.layout.is_some() {
            c.layout_file = self.layout.clone();
        }
        set!(self.learning_rate => c.rl.learning_rate);
        set!(self.batch_size => c.rl.batch_size);
        set!(self.reward_scale => c.rl.reward_scale);
        set!(self.reward_offset => c.rl.reward_offset);
        set!(self.beta => c.rl.beta);
        set!(self.train_ebno => c.training.ebno_db);
        set!(self.train_frames => c.training.frames);
        set!(self.episode_frames => c.training.episode_frames);
        set!(self.eval_interval => c.training.eval_interval);
        set!(self.eval_frames => c.training.eval_frames);
    }
}
