//! Instantaneous low-lying spectrum of the two-particle Hamiltonian.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::busch::{pair_ground_state, InteractionPoint};
use crate::spectral::crossing::CrossingCriteria;
use crate::spectral::flow::{build_adaptive_flow, AdaptiveSettings, SliceData, SliceSource};
use crate::spectral::map::DarkFlow;
use crate::grid::Grid2D;
use crate::trap::TrajectoryParams;

use super::eigen::{self, EigenSettings};
use super::TwoBodyHamiltonian;

/// Eigenpairs at one instant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenSlice {
    pub time: f64,
    /// Ascending energies.
    pub energies: Vec<f64>,
    /// Eigenvectors in the same order; omitted when not retained.
    #[serde(skip)]
    pub states: Option<Vec<Vec<f64>>>,
    pub residuals: Vec<f64>,
}

/// Everything needed to diagonalise the Hamiltonian along a trajectory.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumControls {
    pub grid: Grid2D,
    pub g: f64,
    pub trajectory: TrajectoryParams,
    pub eigen: EigenSettings,
}

impl SpectrumControls {
    pub fn new(grid: Grid2D, g: f64, trajectory: TrajectoryParams, count: usize) -> Self {
        SpectrumControls {
            grid,
            g,
            trajectory,
            eigen: EigenSettings {
                tolerance: 1e-8,
                ..EigenSettings::for_count(count)
            },
        }
    }

    pub fn hamiltonian_at(&self, t: f64) -> Result<TwoBodyHamiltonian> {
        let layout = self.trajectory.positions_at(t)?;
        TwoBodyHamiltonian::for_layout(self.grid, &layout, self.g)
    }
}

/// Lowest `k` eigenpairs of the symmetric sector at time `t`.
pub fn lowest_eigenpairs(t: f64, k: usize, controls: &SpectrumControls) -> Result<EigenSlice> {
    let mut c = *controls;
    c.eigen.count = k;
    c.eigen.block = c.eigen.block.max(k + 4);
    ExactSpectrum::new(c).slice(t)
}

/// Sequential diagonaliser that warm-starts each slice from the previous one.
#[derive(Debug, Clone)]
pub struct ExactSpectrum {
    controls: SpectrumControls,
    warm: Option<Vec<Vec<f64>>>,
}

impl ExactSpectrum {
    pub fn new(controls: SpectrumControls) -> Self {
        ExactSpectrum {
            controls,
            warm: None,
        }
    }

    pub fn controls(&self) -> &SpectrumControls {
        &self.controls
    }

    /// Diagonalises at `t`; the returned slice keeps its eigenvectors.
    pub fn slice(&mut self, t: f64) -> Result<EigenSlice> {
        let ham = self.controls.hamiltonian_at(t)?;
        let res = eigen::lowest_eigenpairs(&ham, &self.controls.eigen, self.warm.as_deref())?;
        self.warm = Some(res.vectors.clone());
        Ok(EigenSlice {
            time: t,
            energies: res.values,
            states: Some(res.vectors),
            residuals: res.residuals,
        })
    }
}

impl SliceSource for ExactSpectrum {
    fn slice(&mut self, t: f64) -> Result<SliceData> {
        let s = ExactSpectrum::slice(self, t)?;
        Ok(SliceData {
            time: s.time,
            energies: s.energies,
            vectors: s.states.unwrap_or_default(),
        })
    }

    fn weight(&self) -> f64 {
        self.controls.grid.dv()
    }
}

/// Settings of [`exact_dark_flow`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DarkFlowSettings {
    /// Number of tracked eigenpairs.
    pub count: usize,
    /// Largest step as a fraction of the protocol.
    pub max_step_fraction: f64,
    pub epsilon: f64,
    pub crossing_floor: f64,
    /// Crossings with a gap above this are ignored.
    pub gap_threshold: f64,
}

impl Default for DarkFlowSettings {
    fn default() -> Self {
        DarkFlowSettings {
            count: 12,
            max_step_fraction: 1.0 / 80.0,
            epsilon: 0.02,
            crossing_floor: 1e-5,
            gap_threshold: 0.05,
        }
    }
}

/// Adaptive exact flow over the whole protocol whose track 0 starts as the
/// pair in the left trap (tracks 1 and 2 start in the middle and right
/// traps). Steps are gated on those three tracks and refined wherever
/// track 0 would step over a crossing.
pub fn exact_dark_flow(
    interaction: InteractionPoint,
    grid: Grid2D,
    trajectory: TrajectoryParams,
    settings: &DarkFlowSettings,
) -> Result<(DarkFlow, ExactSpectrum)> {
    let start = trajectory.positions_at(0.0)?;
    let refs: Vec<Vec<f64>> = start
        .centres()
        .iter()
        .map(|&c| pair_ground_state(interaction.g, c, &grid).map(|p| p.amplitudes))
        .collect::<Result<_>>()?;
    let total = trajectory.total_time;
    let mut spec = ExactSpectrum::new(SpectrumControls::new(grid, interaction.g, trajectory, settings.count));
    let mut adaptive = AdaptiveSettings::for_span(total);
    adaptive.max_step = total * settings.max_step_fraction;
    adaptive.initial_step = adaptive.max_step;
    adaptive.epsilon = settings.epsilon;
    adaptive.gate = vec![0, 1, 2];
    adaptive.resolve = vec![0];
    adaptive.crossing_floor = settings.crossing_floor;
    let mut flow = build_adaptive_flow(&mut spec, 0.0, total, Some(&refs), &adaptive)?;
    flow.label_bands(interaction.energy, 0.05);
    Ok((
        DarkFlow {
            flow,
            track: 0,
            total_time: total,
            criteria: CrossingCriteria::new(settings.gap_threshold),
        },
        spec,
    ))
}
