//! Adaptive exact flow of the dark track for one interaction energy, its
//! avoided crossings, and the transition probability at each for several
//! protocol durations.
//!
//! `cargo run --release --example transition_map -- [E_g] [n] [--refine]`
//!
//! At `n = 256` a flow takes a few minutes and refinement tens of minutes.

use sap_sim::busch::InteractionPoint;
use sap_sim::exact::{exact_dark_flow, DarkFlowSettings};
use sap_sim::grid::Grid2D;
use sap_sim::scenario::evaluate_crossings;
use sap_sim::spectral::RefineSettings;
use sap_sim::trap::TrajectoryParams;

fn main() -> sap_sim::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let refine = args.iter().any(|a| a == "--refine");
    let mut pos = args.iter().filter(|a| !a.starts_with("--"));
    let energy: f64 = pos.next().map_or(Ok(1.6), |a| a.parse()).expect("E_g must be a number");
    let n: usize = pos.next().map_or(Ok(160), |a| a.parse()).expect("n must be an integer");

    let ip = InteractionPoint::from_energy(energy)?;
    let grid = Grid2D::symmetric(15.0, n)?;
    let traj = TrajectoryParams::new(4000.0)?;
    let (dark, mut spec) = exact_dark_flow(ip, grid, traj, &DarkFlowSettings::default())?;
    println!("flow: {} slices, {} continuation warnings", dark.flow.len(), dark.flow.events.len());

    let totals = [1000.0, 4000.0, 12000.0, 40000.0];
    let settings = RefineSettings::default();
    let reports = evaluate_crossings(&mut spec, energy, &dark, &totals, refine.then_some(&settings))?;
    if reports.is_empty() {
        println!("no avoided crossings below the gap threshold");
    }
    for r in &reports {
        println!(
            "crossing {} with track {}: t_c/T = {:.4}, gap {:.3e}, window [{:.1}, {:.1}]",
            r.crossing,
            r.event.partner,
            r.event.time / r.flow_total_time,
            r.event.gap,
            r.event.window.0,
            r.event.window.1
        );
        for c in &r.cells {
            match (c.p, &c.failure) {
                (Some(p), _) => println!("  T = {:>7}: p = {p:.5}", c.total_time),
                (None, Some(why)) => println!("  T = {:>7}: {why}", c.total_time),
                _ => {}
            }
        }
    }
    Ok(())
}
