//! Three-site Bose- and Fermi-Hubbard reductions of the two-particle problem:
//! tunneling rates from localised orbitals and pair states, Fock bases,
//! matrix assembly, time evolution and dark-state continuation.

pub mod compare;
pub mod dark;
pub mod evolve;
pub mod fock;
pub mod model;
pub mod rates;
pub mod spline;

pub use compare::{band_deviation, exact_offset, BandDeviation};
pub use dark::{dark_state_of, DarkStateReport, HubbardSpectrum};
pub use evolve::{evolve_hubbard, PopulationSeries};
pub use model::{
    bose_hamiltonian, build_bose_matrix, build_fermi_matrix, fermi_hamiltonian, HubbardFlags,
    HubbardSystem, ModelKind, RateSet, RateSign,
};
pub use rates::{
    cotunneling_rate, excited_band_rate, single_particle_rate, RateRow, RateTable, RateTableSpec,
};
