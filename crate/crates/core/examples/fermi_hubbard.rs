//! The nine-state Fermi-Hubbard model (two bands, fermionised hard-core
//! bosons): instantaneous levels along the protocol and the transfer.
//!
//! `cargo run --release --example fermi_hubbard -- [E_g] [T]`

use std::sync::Arc;

use sap_sim::busch::InteractionPoint;
use sap_sim::hubbard::{evolve_hubbard, HubbardFlags, HubbardSystem, ModelKind, RateTable, RateTableSpec};
use sap_sim::linalg::sorted_eigh;
use sap_sim::trap::TrajectoryParams;

fn main() -> sap_sim::Result<()> {
    let mut args = std::env::args().skip(1);
    let energy: f64 = args.next().map_or(Ok(1.6), |a| a.parse()).expect("E_g must be a number");
    let total: f64 = args.next().map_or(Ok(4000.0), |a| a.parse()).expect("T must be a number");

    let table = Arc::new(RateTable::build(InteractionPoint::from_energy(energy)?, &RateTableSpec::default())?);
    let system = HubbardSystem::new(ModelKind::Fermi, TrajectoryParams::new(total)?, HubbardFlags::default(), table)?;
    println!("basis: {}", system.labels().join(" "));
    for k in 0..=10 {
        let t = total * k as f64 / 10.0;
        let (levels, _) = sorted_eigh(&system.hamiltonian_at(t)?)?;
        let shown: Vec<String> = levels.iter().map(|e| format!("{e:.4}")).collect();
        println!("t = {t:>7.1}: {}", shown.join(" "));
    }
    let psi0 = system.basis_vector(system.pair_index(0));
    let series = evolve_hubbard(&system, &psi0, 0.1, 1000)?;
    let target = series.final_populations()[system.pair_index(2)];
    println!("final weight on the right pair state: {target:.4} (norm drift {:.1e})", series.norm_drift);
    Ok(())
}
