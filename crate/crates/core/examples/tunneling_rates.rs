//! Tunneling rates between neighbouring wells versus separation: the two
//! single-particle bands and pair co-tunneling.
//!
//! `cargo run --release --example tunneling_rates -- [E_g]`

use sap_sim::busch::InteractionPoint;
use sap_sim::hubbard::{RateTable, RateTableSpec};

fn main() -> sap_sim::Result<()> {
    let energy: f64 = std::env::args().nth(1).map_or(Ok(1.25), |a| a.parse()).expect("E_g must be a number");
    let ip = InteractionPoint::from_energy(energy)?;
    let table = RateTable::build(ip, &RateTableSpec::default())?;
    let (lo, hi) = table.domain();
    println!("E_g = {energy}, g = {:.5}, table over d in [{lo}, {hi}]", ip.g);
    println!("{:>6} {:>13} {:>13} {:>13}", "d", "Omega_0", "Omega_1", "Omega_co");
    let mut d = lo;
    while d <= hi + 1e-9 {
        let r = table.at(d)?;
        println!("{d:>6.2} {:>13.5e} {:>13.5e} {:>13.5e}", r.omega0, r.omega1, r.omega_co);
        d += 0.5;
    }
    Ok(())
}
