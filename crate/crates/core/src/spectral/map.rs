//! Transition probabilities over a grid of interaction energies and
//! protocol durations.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::crossing::{detect_crossings, CrossingCriteria};
use super::flow::SpectralFlow;
use super::transition::crossing_probability;

/// A flow built for one interaction energy, with the track to follow.
#[derive(Debug, Clone)]
pub struct DarkFlow {
    pub flow: SpectralFlow,
    pub track: usize,
    /// Protocol duration the flow times refer to.
    pub total_time: f64,
    pub criteria: CrossingCriteria,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionCell {
    pub energy: f64,
    pub total_time: f64,
    /// Crossing index in time order (0 is the first).
    pub crossing: usize,
    pub partner: usize,
    /// Crossing time as a fraction of the protocol.
    pub fraction: f64,
    pub gap: f64,
    pub p: Option<f64>,
    pub numerator: Option<f64>,
    pub denominator: Option<f64>,
    /// Why no estimate was produced, if it was not.
    pub failure: Option<String>,
}

/// Evaluates every crossing of the followed track for each `(E_g, T)` cell.
///
/// `flow_for` is called once per energy; the resulting flow is rescaled to
/// every requested duration. Energies are processed in parallel.
pub fn scan_transition_map<F>(energies: &[f64], totals: &[f64], flow_for: F) -> Result<Vec<TransitionCell>>
where
    F: Fn(f64) -> Result<DarkFlow> + Sync,
{
    let per_energy: Result<Vec<Vec<TransitionCell>>> = energies
        .par_iter()
        .map(|&e| {
            let dark = flow_for(e)?;
            let mut cells = Vec::new();
            for &total in totals {
                let flow = dark.flow.rescaled(dark.total_time, total)?;
                let events = detect_crossings(&flow, dark.track, dark.criteria)?;
                for (c, ev) in events.iter().enumerate() {
                    let base = TransitionCell {
                        energy: e,
                        total_time: total,
                        crossing: c,
                        partner: ev.partner,
                        fraction: ev.time / total,
                        gap: ev.gap,
                        p: None,
                        numerator: None,
                        denominator: None,
                        failure: None,
                    };
                    cells.push(match crossing_probability(&flow, ev, total) {
                        Ok(est) => TransitionCell {
                            p: Some(est.p),
                            numerator: Some(est.numerator),
                            denominator: Some(est.denominator),
                            ..base
                        },
                        Err(err) => TransitionCell {
                            failure: Some(err.to_string()),
                            ..base
                        },
                    });
                }
            }
            Ok(cells)
        })
        .collect();
    Ok(per_energy?.into_iter().flatten().collect())
}
