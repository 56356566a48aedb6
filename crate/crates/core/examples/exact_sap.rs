//! Full grid propagation of the pair through the moving triple well and
//! the final fidelity with the right-trap pair state.
//!
//! `cargo run --release --example exact_sap -- [E_g] [T] [n]`
//!
//! The defaults (`E_g = 1.25`, `T = 2000`, `n = 128`) take about a minute;
//! the production grid is `n = 256`-`300`.

use sap_sim::busch::InteractionPoint;
use sap_sim::exact::{run_sap, SapControls, Scheme};
use sap_sim::grid::Grid2D;
use sap_sim::trap::TrajectoryParams;

fn main() -> sap_sim::Result<()> {
    let mut args = std::env::args().skip(1);
    let energy: f64 = args.next().map_or(Ok(1.25), |a| a.parse()).expect("E_g must be a number");
    let total: f64 = args.next().map_or(Ok(2000.0), |a| a.parse()).expect("T must be a number");
    let n: usize = args.next().map_or(Ok(128), |a| a.parse()).expect("n must be an integer");

    let scheme = Scheme::ExponentialMidpoint;
    let controls = SapControls {
        grid: Grid2D::symmetric(15.0, n)?,
        dt: scheme.default_dt(),
        scheme,
        trajectory: TrajectoryParams::new(total)?,
        checkpoint: None,
    };
    let out = run_sap(InteractionPoint::from_energy(energy)?, &controls)?;
    println!("E_g = {energy}, g = {:.5}, T = {total}, n = {n}", out.g);
    println!("initial pair energy {:.6}", out.initial_energy);
    println!("fidelity F = {:.6}", out.fidelity);
    println!(
        "{} steps of dt = {}, norm drift {:.1e}, exchange-symmetry violation {:.1e}, {:.1}s",
        out.report.steps, out.report.dt, out.report.norm_drift, out.report.symmetry_violation, out.runtime_seconds
    );
    Ok(())
}
