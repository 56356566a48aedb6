//! The transition estimator on an analytic two-level avoided crossing,
//! against the Landau-Zener formula.
//!
//! `cargo run --release --example landau_zener`

use sap_sim::spectral::LandauZener;

fn main() -> sap_sim::Result<()> {
    let delta = 0.1;
    println!("{:>6} {:>10} {:>10} {:>10} {:>7}", "p_LZ", "alpha", "estimate", "edge", "ratio");
    for p in [0.05, 0.1, 0.2, 0.35, 0.5, 0.65, 0.8, 0.9, 0.95] {
        let lz = LandauZener::with_probability(p, delta)?;
        let est = lz.estimate()?;
        println!(
            "{p:>6.2} {:>10.4e} {:>10.5} {:>10.1e} {:>7.3}",
            lz.alpha,
            est.p,
            est.edge_ratio,
            est.p / lz.exact_probability()
        );
    }
    Ok(())
}
