//! Pair transfer in the six-state Bose-Hubbard model, with and without
//! co-tunneling, plus the dark-state continuation of each.
//!
//! `cargo run --release --example bose_hubbard_sap -- [E_g] [T]`

use std::sync::Arc;

use sap_sim::busch::InteractionPoint;
use sap_sim::hubbard::{dark_state_of, evolve_hubbard, HubbardFlags, HubbardSystem, ModelKind, RateTable, RateTableSpec};
use sap_sim::trap::TrajectoryParams;

fn main() -> sap_sim::Result<()> {
    let mut args = std::env::args().skip(1);
    let energy: f64 = args.next().map_or(Ok(1.25), |a| a.parse()).expect("E_g must be a number");
    let total: f64 = args.next().map_or(Ok(4000.0), |a| a.parse()).expect("T must be a number");

    let table = Arc::new(RateTable::build(InteractionPoint::from_energy(energy)?, &RateTableSpec::default())?);
    let traj = TrajectoryParams::new(total)?;
    for cotunneling in [true, false] {
        let flags = HubbardFlags {
            cotunneling,
            ..HubbardFlags::default()
        };
        let system = HubbardSystem::new(ModelKind::Bose, traj, flags, table.clone())?;
        let psi0 = system.basis_vector(system.pair_index(0));
        let series = evolve_hubbard(&system, &psi0, 0.1, 200)?;
        let fin = series.final_populations();
        let dark = dark_state_of(&system)?;
        println!("co-tunneling {}:", if cotunneling { "on" } else { "off" });
        for (label, p) in series.labels.iter().zip(fin) {
            println!("  {label:>3} {p:.5}");
        }
        println!(
            "  norm drift {:.1e}; dark track {} starts with |L> weight {:.4}, ends with |R> weight {:.4} (reaches target: {})",
            series.norm_drift, dark.track, dark.initial_weight, dark.target_weight, dark.reaches_target
        );
    }
    Ok(())
}
