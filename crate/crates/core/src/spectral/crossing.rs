//! Avoided-crossing detection on a tracked flow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::flow::SpectralFlow;
use super::transition::coupling_series;

/// Fraction of the peak coupling at which a window edge is accepted.
pub const WINDOW_DECAY: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingEvent {
    /// Time of the minimum gap (parabolic refinement of the sampled minimum).
    pub time: f64,
    pub gap: f64,
    /// Track followed through the crossing (the dark track).
    pub track: usize,
    pub partner: usize,
    /// Slice index of the sampled minimum.
    pub index: usize,
    /// Analysis window `[t_a, t_b]`, and the slice range enclosing it.
    pub window: (f64, f64),
    pub window_index: (usize, usize),
}

fn refine_min(t: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    // Vertex of the parabola through three (possibly unequal) samples.
    let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
    let d1 = (y[1] - y[0]) / h1;
    let d2 = (y[2] - y[1]) / h2;
    let curv = (d2 - d1) / (h1 + h2);
    if curv <= 0.0 {
        return (t[1], y[1]);
    }
    let slope_mid = (d1 * h2 + d2 * h1) / (h1 + h2);
    let shift = -slope_mid / (2.0 * curv);
    let shift = shift.clamp(-h1, h2);
    let value = y[1] + slope_mid * shift + curv * shift * shift;
    (t[1] + shift, value.max(0.0))
}

/// Selection of gap minima.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingCriteria {
    /// Only minima below this gap are reported.
    pub gap_threshold: f64,
    /// On both sides the gap must rise by at least this much above the
    /// minimum before dropping back, which rejects jitter inside
    /// near-degenerate groups.
    pub min_rise: f64,
}

impl CrossingCriteria {
    pub fn new(gap_threshold: f64) -> Self {
        CrossingCriteria {
            gap_threshold,
            min_rise: 1e-3,
        }
    }
}

/// Whether the gap rises by `rise` on both sides of `s` before it falls
/// below `gap[s]` again.
fn is_prominent(gap: &[f64], s: usize, rise: f64) -> bool {
    let level = gap[s] + rise;
    let side = |iter: &mut dyn Iterator<Item = usize>| {
        for q in iter {
            if gap[q] < gap[s] {
                return false;
            }
            if gap[q] >= level {
                return true;
            }
        }
        false
    };
    side(&mut (0..s).rev()) && side(&mut (s + 1..gap.len()))
}

/// Walks from `start` towards `bound` and returns the first time at which the
/// coupling has decayed below `limit` or passed through zero, with the index
/// of the enclosing slice. A zero is located by linear interpolation, which
/// is the model the quadrature uses between slices.
fn window_edge(times: &[f64], coupling: &[f64], start: usize, bound: usize, limit: f64, sign: f64, forward: bool) -> (f64, usize) {
    let mut q = start;
    while q != bound {
        let next = if forward { q + 1 } else { q - 1 };
        let (c0, c1) = (coupling[q], coupling[next]);
        if c1.abs() < limit {
            return (times[next], next);
        }
        if c1.signum() != sign {
            let u = c0 / (c0 - c1);
            return (times[q] + u * (times[next] - times[q]), next);
        }
        q = next;
    }
    (times[bound], bound)
}

/// Prominent interior local minima of `|E_track - E_other|`, sorted by time,
/// each with an analysis window.
pub fn detect_crossings(flow: &SpectralFlow, track: usize, criteria: CrossingCriteria) -> Result<Vec<CrossingEvent>> {
    let k = flow.track_count();
    if track >= k {
        return Err(Error::Contract(format!("track {track} out of range ({k} tracks)")));
    }
    let n = flow.len();
    let mut events = Vec::new();
    for other in (0..k).filter(|&o| o != track) {
        let gap: Vec<f64> = flow.energies.iter().map(|e| (e[track] - e[other]).abs()).collect();
        let mut minima = Vec::new();
        for s in 1..n.saturating_sub(1) {
            if gap[s] <= gap[s - 1] && gap[s] < gap[s + 1] && gap[s] < criteria.gap_threshold
                && is_prominent(&gap, s, criteria.min_rise)
            {
                minima.push(s);
            }
        }
        if minima.is_empty() {
            continue;
        }
        let coupling = coupling_series(flow, track, other)?;
        let magnitude: Vec<f64> = coupling.iter().map(|a| a.abs()).collect();
        // Neighbouring crossings of the same pair split the axis at the
        // weakest coupling between them; each peak is sought in its part.
        let mut bounds = vec![0usize];
        for w in minima.windows(2) {
            let (a, b) = (w[0], w[1]);
            let cut = (a..=b).min_by(|&x, &y| magnitude[x].total_cmp(&magnitude[y])).unwrap();
            bounds.push(cut);
        }
        bounds.push(n - 1);
        for (m, &s) in minima.iter().enumerate() {
            let (lo, hi) = (bounds[m], bounds[m + 1]);
            let peak_idx = (lo..=hi).max_by(|&x, &y| magnitude[x].total_cmp(&magnitude[y])).unwrap();
            let limit = WINDOW_DECAY * magnitude[peak_idx];
            let sign = coupling[peak_idx].signum();
            // Edges may pass the cut, but never the neighbouring minima.
            let walk_lo = if m == 0 { 0 } else { minima[m - 1] };
            let walk_hi = minima.get(m + 1).copied().unwrap_or(n - 1);
            let (t_a, a) = window_edge(&flow.times, &coupling, peak_idx.min(s), walk_lo, limit, sign, false);
            let (t_b, b) = window_edge(&flow.times, &coupling, peak_idx.max(s), walk_hi, limit, sign, true);
            let (tc, gc) = refine_min(
                [flow.times[s - 1], flow.times[s], flow.times[s + 1]],
                [gap[s - 1], gap[s], gap[s + 1]],
            );
            events.push(CrossingEvent {
                time: tc,
                gap: gc,
                track,
                partner: other,
                index: s,
                window: (t_a, t_b),
                window_index: (a, b),
            });
        }
    }
    events.sort_by(|x, y| x.time.total_cmp(&y.time));
    Ok(events)
}
