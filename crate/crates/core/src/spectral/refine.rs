//! Local re-slicing around one crossing until the transition estimate is
//! converged in the slice density.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::crossing::{detect_crossings, CrossingCriteria, CrossingEvent};
use super::flow::{build_adaptive_flow, AdaptiveSettings, SliceSource, SpectralFlow};
use super::transition::{transition_probability, TransitionEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineSettings {
    /// Overlap tolerance of the first local flow; divided by four per level.
    pub initial_epsilon: f64,
    /// Largest change of `p` between levels accepted as converged.
    pub tolerance: f64,
    pub max_levels: usize,
    /// Extra span on each side of the window, as a fraction of its width.
    pub padding: f64,
    pub crossing_floor: f64,
    pub criteria: CrossingCriteria,
}

impl Default for RefineSettings {
    fn default() -> Self {
        RefineSettings {
            initial_epsilon: 4e-3,
            tolerance: 1e-3,
            max_levels: 4,
            padding: 0.25,
            crossing_floor: 1e-5,
            criteria: CrossingCriteria::new(0.05),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefinementLevel {
    pub epsilon: f64,
    pub slices: usize,
    /// One estimate per requested duration.
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefinedCrossing {
    /// The crossing as seen on the finest local flow, in source time.
    pub event: CrossingEvent,
    /// Finest-level estimates, one per requested duration.
    pub estimates: Vec<TransitionEstimate>,
    pub levels: Vec<RefinementLevel>,
    pub converged: bool,
    /// Finest local flow; track 0 is the followed track, track 1 its partner.
    pub flow: SpectralFlow,
}

fn interpolate(flow: &SpectralFlow, track: usize, t: f64) -> f64 {
    let n = flow.len();
    let s = flow.times.partition_point(|&x| x <= t).clamp(1, n - 1);
    let (t0, t1) = (flow.times[s - 1], flow.times[s]);
    let u = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
    flow.energies[s - 1][track] * (1.0 - u) + flow.energies[s][track] * u
}

/// Rebuilds the flow around `event` at increasing slice density and
/// evaluates the estimator for every duration in `totals`.
///
/// `flow` and `source` share the time axis of a protocol of duration
/// `source_total`; estimates for other durations use the time rescaling.
/// Refinement stops once every estimate changes by less than
/// `settings.tolerance` between levels.
pub fn refine_crossing<S: SliceSource + ?Sized>(
    source: &mut S,
    flow: &SpectralFlow,
    event: &CrossingEvent,
    source_total: f64,
    totals: &[f64],
    settings: &RefineSettings,
) -> Result<RefinedCrossing> {
    if totals.is_empty() {
        return Err(Error::Contract("no durations requested".into()));
    }
    let (t_a, t_b) = event.window;
    let pad = settings.padding * (t_b - t_a);
    let lo = (t_a - pad).max(flow.times[0]);
    let hi = (t_b + pad).min(flow.times[flow.len() - 1]);

    let first = source.slice(lo)?;
    let nearest = |e: f64| {
        (0..first.energies.len())
            .min_by(|&x, &y| (first.energies[x] - e).abs().total_cmp(&(first.energies[y] - e).abs()))
            .unwrap()
    };
    let a = nearest(interpolate(flow, event.track, lo));
    let b = nearest(interpolate(flow, event.partner, lo));
    if a == b {
        return Err(Error::Numerical(format!(
            "tracks {} and {} are not distinguishable at t = {lo}",
            event.track, event.partner
        )));
    }
    let refs = vec![first.vectors[a].clone(), first.vectors[b].clone()];

    let mut levels: Vec<RefinementLevel> = Vec::new();
    let mut epsilon = settings.initial_epsilon;
    let mut converged = false;
    let mut finest = None;
    for _ in 0..settings.max_levels.max(1) {
        let mut adaptive = AdaptiveSettings::for_span(hi - lo);
        adaptive.max_step = (hi - lo) / 20.0;
        adaptive.initial_step = adaptive.max_step;
        adaptive.epsilon = epsilon;
        adaptive.gate = vec![0, 1];
        adaptive.resolve = vec![0];
        adaptive.crossing_floor = settings.crossing_floor;
        let local = build_adaptive_flow(source, lo, hi, Some(&refs), &adaptive)?;
        let ev = detect_crossings(&local, 0, settings.criteria)?
            .into_iter()
            .filter(|e| e.partner == 1)
            .min_by(|x, y| (x.time - event.time).abs().total_cmp(&(y.time - event.time).abs()))
            .ok_or_else(|| Error::Numerical(format!("crossing near t = {} lost on refinement", event.time)))?;
        let estimates: Vec<TransitionEstimate> = totals
            .iter()
            .map(|&total| {
                let f = total / source_total;
                let scaled = local.rescaled(source_total, total)?;
                transition_probability(&scaled, 0, 1, (ev.window.0 * f, ev.window.1 * f), total)
            })
            .collect::<Result<_>>()?;
        let p: Vec<f64> = estimates.iter().map(|e| e.p).collect();
        if let Some(prev) = levels.last() {
            converged = prev.p.iter().zip(&p).all(|(x, y)| (x - y).abs() < settings.tolerance);
        }
        levels.push(RefinementLevel {
            epsilon,
            slices: local.len(),
            p,
        });
        finest = Some((ev, estimates, local));
        if converged {
            break;
        }
        epsilon *= 0.25;
    }
    let (event, estimates, flow) = finest.expect("at least one level");
    Ok(RefinedCrossing {
        event,
        estimates,
        levels,
        converged,
        flow,
    })
}
