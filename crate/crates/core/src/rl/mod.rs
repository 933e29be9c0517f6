//! Policy-gradient relay selection.

pub mod features;
pub mod policy;
pub mod reinforce;

pub use features::{featurize, raw_features, state_dim, FeatureNormalizer, RunningStat, StateVector};
pub use policy::{softmax, Dense, PolicyGradient, PolicyParams};
pub use reinforce::{
    battery_gate, compute_reward, greedy_ranking, reinforce_update, sample_action, sample_ranking,
    AgentChoice, Checkpoint, Experience, ReplayBuffer, RlAgent, RlHyperParams, CHECKPOINT_VERSION,
};
