//! A scenario described in TOML, with command-line style overrides, run
//! through the same pipeline as the `sap-sim` binary.
//!
//! `cargo run --release --example scenario_run -- [out_dir]`

use sap_sim::scenario::{run, Mode, Scenario};

const SCENARIO: &str = r#"
name = "rates-demo"
mode = "rates"

[physics]
energy = 1.25

[trajectory]
d_min = 3.0
d_max = 9.0
"#;

fn main() -> sap_sim::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out/rates-demo".into());
    let scenario = Scenario::from_toml(SCENARIO, &["numerics.rate_step=0.25".to_string()])?;
    let summary = run(&scenario, Mode::Rates, out.as_ref(), 1)?;
    println!("scenario {}", summary.manifest.scenario_hash);
    for file in &summary.manifest.outputs {
        println!("wrote {}", summary.out_dir.join(file).display());
    }
    Ok(())
}
