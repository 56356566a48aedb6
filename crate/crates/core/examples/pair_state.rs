//! Discrete pair ground state of one well on the two-particle grid,
//! compared with the continuum energy.
//!
//! `cargo run --release --example pair_state -- [n] [half_width]`

use sap_sim::busch::{energy_from_g, pair_energy_tolerance, pair_ground_state};
use sap_sim::grid::Grid2D;

fn main() -> sap_sim::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(128), |a| a.parse()).expect("n must be an integer");
    let half: f64 = args.next().map_or(Ok(8.0), |a| a.parse()).expect("half_width must be a number");
    let grid = Grid2D::symmetric(half, n)?;
    let tol = pair_energy_tolerance(grid.h());
    println!("grid n = {n}, h = {:.4}, tolerance {tol:.2e}", grid.h());
    for g in [0.0, 0.5, 1.0, 2.0, 5.0] {
        let pair = pair_ground_state(g, 0.0, &grid)?;
        let exact = energy_from_g(g)?;
        let dev = (pair.energy - exact).abs();
        println!(
            "g = {g:>4}: grid {:.6}  continuum {exact:.6}  |diff| {dev:.2e} {}",
            pair.energy,
            if dev <= tol { "ok" } else { "outside tolerance" }
        );
    }
    Ok(())
}
