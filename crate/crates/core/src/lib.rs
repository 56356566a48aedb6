//! Spatial adiabatic passage of two contact-interacting bosons in a triple
//! well whose outer traps move along a counter-intuitive trajectory.
//!
//! Units are oscillator units, `hbar = m = omega = 1`.
//!
//! * [`trap`] - trap positions over time and the triple-well potential.
//! * [`busch`] - the exact energy/interaction relation for a pair in one well
//!   and discrete pair ground states.
//! * [`exact`] - grid Hamiltonian, Chebyshev and split-step propagation,
//!   eigensolver and full passage runs.
//! * [`hubbard`] - tunneling rates and the six-/nine-state Bose and Fermi
//!   Hubbard models.
//! * [`spectral`] - band tracking, crossing detection and transition
//!   estimates.
//! * [`scenario`] - configuration, presets and mode dispatch behind the
//!   `sap-sim` binary.

pub mod busch;
pub mod error;
pub mod exact;
pub mod grid;
pub mod hubbard;
pub mod linalg;
pub mod scenario;
pub mod spectral;
pub mod trap;

pub use error::{Error, Result};
