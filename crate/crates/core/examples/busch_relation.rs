//! The pair energy in one harmonic well as a function of the contact
//! strength, and its inverse.
//!
//! `cargo run --release --example busch_relation`

use sap_sim::busch::{energy_from_g, g_from_energy};

fn main() -> sap_sim::Result<()> {
    println!("{:>7} {:>14} {:>12}", "E_g", "g", "roundtrip");
    for k in 0..=19 {
        let e = 1.0 + 0.05 * k as f64;
        let e = if k == 0 { 1.0 } else { e.min(1.999) };
        let g = g_from_energy(e)?;
        let back = energy_from_g(g)?;
        println!("{e:>7.3} {g:>14.8} {:>12.1e}", (back - e).abs());
    }
    // Approaching E_g = 2 the strength diverges (hard-core limit).
    for e in [1.99, 1.999, 1.9999] {
        println!("E_g = {e}: g = {:.3}", g_from_energy(e)?);
    }
    Ok(())
}
