//! Time-sliced low-lying spectrum of the grid Hamiltonian, tracked through
//! the protocol and sorted into the separated, pair and excited bands.
//!
//! `cargo run --release --example exact_spectrum -- [E_g] [slices] [n]`

use sap_sim::busch::{pair_ground_state, InteractionPoint};
use sap_sim::exact::{ExactSpectrum, SpectrumControls};
use sap_sim::grid::Grid2D;
use sap_sim::spectral::{track_bands, BandLabel};
use sap_sim::trap::TrajectoryParams;

fn main() -> sap_sim::Result<()> {
    let mut args = std::env::args().skip(1);
    let energy: f64 = args.next().map_or(Ok(1.25), |a| a.parse()).expect("E_g must be a number");
    let slices: usize = args.next().map_or(Ok(10), |a| a.parse()).expect("slices must be an integer");
    let n: usize = args.next().map_or(Ok(128), |a| a.parse()).expect("n must be an integer");

    let ip = InteractionPoint::from_energy(energy)?;
    let grid = Grid2D::symmetric(15.0, n)?;
    let traj = TrajectoryParams::new(4000.0)?;
    let mut spec = ExactSpectrum::new(SpectrumControls::new(grid, ip.g, traj, 12));
    let mut data = Vec::with_capacity(slices + 1);
    for s in 0..=slices {
        let t = traj.total_time * s as f64 / slices as f64;
        data.push(sap_sim::spectral::SliceSource::slice(&mut spec, t)?);
    }
    let refs: Vec<Vec<f64>> = traj
        .positions_at(0.0)?
        .centres()
        .iter()
        .map(|&c| pair_ground_state(ip.g, c, &grid).map(|p| p.amplitudes))
        .collect::<sap_sim::Result<_>>()?;
    let mut flow = track_bands(data, grid.dv(), Some(&refs))?;
    flow.label_bands(energy, 0.05);

    for (t, levels) in flow.times.iter().zip(&flow.energies) {
        let shown: Vec<String> = levels.iter().map(|e| format!("{e:.4}")).collect();
        println!("{t:>7.1} {}", shown.join(" "));
    }
    for label in [BandLabel::Separated, BandLabel::Pair, BandLabel::Excited] {
        println!("{label:?}: tracks {:?}", flow.tracks_in(label));
    }
    Ok(())
}
