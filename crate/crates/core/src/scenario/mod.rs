//! Scenario files, figure presets and the pipelines behind the `sap-sim`
//! command line.

pub mod config;
pub mod presets;
pub mod run;

pub use config::{apply_override, EnergyGrid, Flags, Mode, Model, Numerics, Physics, Scenario, TrajectoryConfig};
pub use presets::{preset, PRESETS};
pub use run::{evaluate_crossings, run, validate, CrossingReport, RunManifest, RunSummary, TransitionRow};
