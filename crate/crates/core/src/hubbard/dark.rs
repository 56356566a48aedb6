//! Dark-state continuation through the Hubbard spectrum.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::sorted_eigh;
use crate::spectral::flow::{
    build_adaptive_flow, AdaptiveSettings, ContinuationEvent, SliceData, SliceSource, SpectralFlow,
};

use super::model::HubbardSystem;

/// Weight on `|R>` above which the continued state counts as reaching it.
pub const TARGET_WEIGHT: f64 = 0.9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DarkStateReport {
    /// Track continuously connected to `|L>` at `t = 0`.
    pub track: usize,
    /// Eigenvector of that track at `t = 0`, in the model basis.
    pub initial_state: Vec<f64>,
    /// Its eigenvector at `t = T`.
    pub final_state: Vec<f64>,
    /// `|<L|dark(0)>|^2`.
    pub initial_weight: f64,
    /// `|<R|dark(T)>|^2`.
    pub target_weight: f64,
    pub reaches_target: bool,
    /// Steps where continuation was ambiguous or weak.
    pub warnings: Vec<ContinuationEvent>,
    pub flow: SpectralFlow,
}

/// Instantaneous diagonalisation of a Hubbard model.
pub struct HubbardSpectrum<'a> {
    pub system: &'a HubbardSystem,
}

impl SliceSource for HubbardSpectrum<'_> {
    fn slice(&mut self, t: f64) -> Result<SliceData> {
        let (energies, vecs) = sorted_eigh(&self.system.hamiltonian_at(t)?)?;
        let vectors = (0..energies.len()).map(|c| vecs.column(c).iter().copied().collect()).collect();
        Ok(SliceData {
            time: t,
            energies,
            vectors,
        })
    }
}

/// Tracks every eigenstate over the protocol, starting from the Fock basis,
/// and reports the track that begins as the pair in the left well.
pub fn dark_state_of(system: &HubbardSystem) -> Result<DarkStateReport> {
    let total = system.trajectory.total_time;
    let dim = system.dim();
    let refs: Vec<Vec<f64>> = (0..dim).map(|k| system.basis_vector(k)).collect();
    let mut settings = AdaptiveSettings::for_span(total);
    settings.max_step = total / 200.0;
    settings.initial_step = settings.max_step;
    settings.epsilon = 0.01;
    let mut src = HubbardSpectrum { system };
    let flow = build_adaptive_flow(&mut src, 0.0, total, Some(&refs), &settings)?;
    let left = system.pair_index(0);
    let right = system.pair_index(2);
    // Track `a` starts on the state closest to reference `a`.
    let track = left;
    let initial_state = flow.first_vectors[track].clone();
    let final_state = flow.last_vectors[track].clone();
    let target_weight = final_state[right].powi(2);
    Ok(DarkStateReport {
        track,
        initial_weight: initial_state[left].powi(2),
        target_weight,
        reaches_target: target_weight > TARGET_WEIGHT,
        warnings: flow.events.clone(),
        initial_state,
        final_state,
        flow,
    })
}
