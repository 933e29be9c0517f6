//! Link-level simulator for decode-and-forward relay selection under
//! two-state Markov-Gaussian impulsive noise.
//!
//! The crate is organized bottom-up:
//!
//! - [`topology`]: node placement and distance-derived link variances
//! - [`channel`]: block Rayleigh fading
//! - [`noise`]: TSMG impulsive noise, AWGN, genie state reporting
//! - [`phy`]: QPSK, MRC and error counting
//! - [`protocol`]: the two-slot DF frame and battery accounting
//! - [`selection`]: conventional and noise-aware battery-fair Max-Min
//! - [`rl`]: REINFORCE relay selection
//! - [`harness`]: SER sweeps, battery runs, training and evaluation

pub mod channel;
pub mod error;
pub mod harness;
pub mod noise;
pub mod phy;
pub mod protocol;
pub mod rl;
pub mod rng;
pub mod selection;
pub mod topology;

pub use channel::{draw_channels, fixed_channels, ChannelRealization, Link};
pub use error::{Error, Result};
pub use noise::{
    frame_bad_fraction, generate_awgn, generate_tsmg, transition_matrix, NoiseState, NoiseTrace,
    TransitionMatrix, TsmgParams,
};
pub use phy::{count_symbol_errors, mrc_combine, qpsk_demodulate, qpsk_modulate, QpskPoint, SymbolFrame};
pub use protocol::{
    direct_transmission_frame, simulate_frame, BatteryModel, BatteryState, FrameOutcome, FrameSetup,
};
pub use rng::{substream, Purpose, SimRng};
pub use selection::{
    penalty_alpha, select_conventional_maxmin, select_proposed_maxmin, select_random, SelectionContext,
};
pub use topology::{FieldLayout, NodeId, Point};
