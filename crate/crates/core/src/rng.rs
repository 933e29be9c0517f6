//! Seeded random-stream derivation.
//!
//! One root seed fans out into independent ChaCha streams keyed by
//! `(purpose, frame, index)`. Every strategy evaluated with the same root
//! seed therefore sees the same fading, noise and payload draws for a given
//! frame (common random numbers).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// What a derived stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Layout = 1,
    Channel = 2,
    RelayStates = 3,
    RelaySamples = 4,
    DestinationNoise = 5,
    Payload = 6,
    Policy = 7,
    ShadowNoise = 8,
    Selection = 9,
    Init = 10,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic seed for a child stream.
pub fn derive_seed(root: u64, purpose: Purpose, frame: u64, index: u64) -> u64 {
    let mut h = splitmix64(root);
    h = splitmix64(h ^ purpose as u64);
    h = splitmix64(h ^ frame);
    splitmix64(h ^ index)
}

pub fn substream(root: u64, purpose: Purpose, frame: u64, index: u64) -> SimRng {
    SimRng::seed_from_u64(derive_seed(root, purpose, frame, index))
}
