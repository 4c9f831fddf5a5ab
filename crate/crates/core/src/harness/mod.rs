//! Experiment plumbing: test potentials, the volume oracle, metrics, run
//! configuration and file outputs.

pub mod config;
pub mod experiment;
pub mod metrics;
pub mod oracle;
pub mod output;
pub mod presets;
pub mod selftest;

pub use config::ExperimentConfig;
pub use experiment::{oracle_table, run_experiment, run_reconstruction, true_potential, Manifest, RunOutcome};
pub use metrics::{compute_metrics, field_errors, frequency_residuals, FrequencyResidual, Metrics};
pub use oracle::{volume_oracle, VolumeOracle};
pub use presets::{preset_potential, Preset, SUPPORT_RADIUS};
pub use selftest::{run_selftest, Check};
