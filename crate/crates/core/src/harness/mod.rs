//! Experiment orchestration: SER sweeps, battery runs, RL training and
//! evaluation, all pure functions of an [`ExperimentConfig`].

pub mod battery;
pub mod config;
pub mod engine;
pub mod sweep;
pub mod training;

pub use battery::{coefficient_of_variation, run_battery_experiment, BatteryRun};
pub use config::{Coherence, ExperimentConfig, NoiseModel, Strategy, TrainingConfig};
pub use engine::{
    run_point, DrawnFrame, FrameRecord, FrameView, PointEnv, PointTotals, HELD_OUT_OFFSET, VALIDATION_OFFSET,
};
pub use sweep::{run_ser_sweep, run_ser_sweep_sequential, SweepResult, SweepRow};
pub use training::{evaluate_policy, evaluate_strategy, run_training, write_curve_csv, CurvePoint, TrainingReport};
