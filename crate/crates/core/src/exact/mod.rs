//! Exact two-particle dynamics and spectra on a real-space grid.

pub mod checkpoint;
pub mod eigen;
mod hamiltonian;
pub mod propagate;
pub mod sap;
pub mod spectrum;

pub use checkpoint::CheckpointPolicy;
pub use hamiltonian::TwoBodyHamiltonian;
pub use propagate::{PotentialSchedule, PropagationReport, Propagator, Scheme, WaveFunction2};
pub use sap::{run_sap, static_trap_check, SapControls, SapOutcome, StaticCheck};
pub use spectrum::{exact_dark_flow, lowest_eigenpairs, DarkFlowSettings, EigenSlice, ExactSpectrum, SpectrumControls};
