//! `sap-sim <mode> --config FILE [--set key=value]... [--workers N] [--out DIR]`

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use sap_sim::scenario::{self, Mode, Scenario};
use sap_sim::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "sap-sim", version, about = "Two-boson spatial adiabatic passage in a moving triple well")]
struct Cli {
    /// trajectory, rates, hubbard-run, spectrum, sweep-fidelity, transitions or validate.
    mode: String,
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario instead of a file (fig1, fig2-T4000, ..., fig9).
    #[arg(long)]
    preset: Option<String>,
    /// Override a scenario value, e.g. `--set physics.energy=1.3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Worker threads for independent cells.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// With `validate`: also run quick probes (rate spot values, one eigenslice).
    #[arg(long)]
    probe: bool,
}

fn load(cli: &Cli) -> Result<Scenario> {
    match (&cli.config, &cli.preset) {
        (Some(path), _) => Scenario::from_file(path, &cli.overrides),
        (None, Some(name)) => scenario::preset(name, &cli.overrides),
        (None, None) => Err(Error::Config("give --config FILE or --preset NAME".into())),
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let scenario = load(cli)?;
    if cli.mode == "validate" {
        let mode = scenario.resolve_mode(None)?;
        let report = scenario::validate(&scenario, mode, cli.probe)?;
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(());
    }
    let mode = scenario.resolve_mode(Some(Mode::parse(&cli.mode)?))?;
    let out = cli
        .out
        .clone()
        .or_else(|| scenario.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(scenario.name.as_deref().unwrap_or(mode.name())));
    let summary = scenario::run(&scenario, mode, &out, cli.workers)?;
    println!(
        "{} -> {} ({} files, scenario {})",
        mode.name(),
        summary.out_dir.display(),
        summary.manifest.outputs.len(),
        &summary.manifest.scenario_hash[..12]
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sap-sim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
