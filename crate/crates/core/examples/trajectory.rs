//! Prints the counter-intuitive trap schedule: positions of the three
//! minima and the two separations over the protocol.
//!
//! `cargo run --release --example trajectory -- [T] [samples]`

use sap_sim::trap::TrajectoryParams;

fn main() -> sap_sim::Result<()> {
    let mut args = std::env::args().skip(1);
    let total: f64 = args.next().map_or(Ok(4000.0), |a| a.parse()).expect("T must be a number");
    let samples: usize = args.next().map_or(Ok(21), |a| a.parse()).expect("samples must be an integer");

    let traj = TrajectoryParams::new(total)?;
    println!(
        "T = {total}, d_min = {}, d_max = {}, delay = {}, pulse = {:.1}",
        traj.d_min,
        traj.d_max,
        traj.delay,
        traj.pulse_duration()
    );
    println!("{:>9} {:>8} {:>8} {:>8} {:>7} {:>7}", "t", "L", "M", "R", "d_LM", "d_MR");
    for (t, lay) in traj.sample(samples)? {
        println!(
            "{t:>9.1} {:>8.3} {:>8.3} {:>8.3} {:>7.3} {:>7.3}",
            lay.left,
            lay.middle,
            lay.right,
            lay.sep_lm(),
            lay.sep_mr()
        );
    }
    Ok(())
}
