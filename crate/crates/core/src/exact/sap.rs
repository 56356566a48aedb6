//! Full adiabatic-passage run: prepare the pair in the left trap, move the
//! traps, and measure the overlap with the pair state of the right trap.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::busch::{pair_ground_state, InteractionPoint};
use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::trap::TrajectoryParams;

use super::checkpoint::{self, CheckpointMeta, CheckpointPolicy};
use super::hamiltonian::TwoBodyHamiltonian;
use super::propagate::{PotentialSchedule, PropagationReport, Propagator, Scheme, WaveFunction2};

#[derive(Debug, Clone)]
pub struct SapControls {
    pub grid: Grid2D,
    pub dt: f64,
    pub scheme: Scheme,
    pub trajectory: TrajectoryParams,
    pub checkpoint: Option<CheckpointPolicy>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SapOutcome {
    pub energy: f64,
    pub g: f64,
    pub total_time: f64,
    /// `|<Phi_R|psi(T)>|^2`.
    pub fidelity: f64,
    pub report: PropagationReport,
    /// Discrete energy of the prepared pair state.
    pub initial_energy: f64,
    pub runtime_seconds: f64,
    /// Time at which the run resumed from a checkpoint, if it did.
    pub resumed_from: Option<f64>,
}

/// Runs the protocol for one interaction strength.
pub fn run_sap(interaction: InteractionPoint, controls: &SapControls) -> Result<SapOutcome> {
    let started = Instant::now();
    let traj = controls.trajectory;
    traj.validate()?;
    let grid = controls.grid;
    let start = traj.positions_at(0.0)?;
    let end = traj.positions_at(traj.total_time)?;
    let initial = pair_ground_state(interaction.g, start.left, &grid)?;
    let target = if grid.is_mirror_symmetric() && (end.right + start.left).abs() < 1e-12 {
        initial.mirrored()?
    } else {
        pair_ground_state(interaction.g, end.right, &grid)?
    };

    let mut psi = WaveFunction2::from_real(grid, 0.0, &initial.amplitudes)?;
    let mut resumed_from = None;
    if let Some(policy) = &controls.checkpoint {
        if let Some(state) = try_resume(policy, &grid, interaction.energy, traj.total_time)? {
            resumed_from = Some(state.time);
            psi = state;
        }
    }

    let mut prop = Propagator::new(
        grid,
        interaction.g,
        PotentialSchedule::Moving(traj),
        controls.scheme,
        controls.dt,
    )?;
    let report = match &controls.checkpoint {
        Some(policy) => {
            let meta_base = CheckpointMeta {
                format: String::from_utf8_lossy(checkpoint::MAGIC).into_owned(),
                scenario_hash: policy.scenario_hash.clone(),
                time: 0.0,
                n: grid.n(),
                x_min: grid.x_min(),
                x_max: grid.x_max(),
                energy: interaction.energy,
                total_time: traj.total_time,
            };
            let path = policy.data_path();
            prop.propagate_observed(&mut psi, traj.total_time, policy.interval, &mut |state| {
                let meta = CheckpointMeta {
                    time: state.time,
                    ..meta_base.clone()
                };
                checkpoint::write(&path, state, &meta)
            })?
        }
        None => prop.propagate(&mut psi, traj.total_time)?,
    };
    let fidelity = psi.overlap_real(&target.amplitudes).norm_sqr();
    if !fidelity.is_finite() {
        return Err(Error::Numerical("fidelity is not finite".into()));
    }
    Ok(SapOutcome {
        energy: interaction.energy,
        g: interaction.g,
        total_time: traj.total_time,
        fidelity,
        report,
        initial_energy: initial.energy,
        runtime_seconds: started.elapsed().as_secs_f64(),
        resumed_from,
    })
}

fn try_resume(
    policy: &CheckpointPolicy,
    grid: &Grid2D,
    energy: f64,
    total_time: f64,
) -> Result<Option<WaveFunction2>> {
    let path = policy.data_path();
    if !path.exists() {
        return Ok(None);
    }
    let (psi, meta) = checkpoint::read(&path)?;
    let matches = meta.scenario_hash == policy.scenario_hash
        && psi.grid == *grid
        && meta.energy == energy
        && meta.total_time == total_time
        && psi.time <= total_time;
    Ok(matches.then_some(psi))
}

/// Energy conservation probe with frozen traps.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StaticCheck {
    pub duration: f64,
    pub initial_energy: f64,
    /// `|<H>(duration) - <H>(0)|`.
    pub energy_drift: f64,
    pub report: PropagationReport,
}

/// Propagates the left-trap pair state in the static initial layout, where
/// `<H>` must stay constant.
pub fn static_trap_check(interaction: InteractionPoint, controls: &SapControls, duration: f64) -> Result<StaticCheck> {
    let layout = controls.trajectory.positions_at(0.0)?;
    let grid = controls.grid;
    let initial = pair_ground_state(interaction.g, layout.left, &grid)?;
    let ham = TwoBodyHamiltonian::for_layout(grid, &layout, interaction.g)?;
    let mut psi = WaveFunction2::from_real(grid, 0.0, &initial.amplitudes)?;
    let e0 = ham.expectation_c(&psi.amplitudes);
    let mut prop = Propagator::new(grid, interaction.g, PotentialSchedule::Static(layout), controls.scheme, controls.dt)?;
    let report = prop.propagate(&mut psi, duration)?;
    let e1 = ham.expectation_c(&psi.amplitudes);
    Ok(StaticCheck {
        duration,
        initial_energy: e0,
        energy_drift: (e1 - e0).abs(),
        report,
    })
}
