//! Non-adiabatic couplings and the normalised transition estimator
//!
//! `p_{i->j} = |int A_ji e^{i phi}|^2 / |int A_ji|^2`,
//! `A_ji = <j|d/dt|i>`, `phi(t) = int_{t0}^t (E_j - E_i)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::crossing::{CrossingEvent, WINDOW_DECAY};
use super::flow::SpectralFlow;

/// Gaps below this make the coupling singular.
pub const SINGULAR_GAP: f64 = 1e-12;

/// Largest phase advance per quadrature sub-interval.
const MAX_PHASE_STEP: f64 = 0.05;

/// `<j(t_s)|d/dt|i(t_s)>` at every slice of the flow.
///
/// Interior slices use the three-point derivative on the non-uniform grid
/// (second order); the two end slices use one-sided differences.
pub fn coupling_series(flow: &SpectralFlow, i: usize, j: usize) -> Result<Vec<f64>> {
    let k = flow.track_count();
    if i >= k || j >= k {
        return Err(Error::Contract(format!("tracks ({i}, {j}) out of range ({k} tracks)")));
    }
    let n = flow.len();
    if flow.overlaps.len() + 1 != n || n < 2 {
        return Err(Error::Contract("flow has no step overlaps (eigenvectors were not retained)".into()));
    }
    let t = &flow.times;
    let mut out = vec![0.0; n];
    out[0] = flow.overlaps[0][(j, i)] / (t[1] - t[0]);
    out[n - 1] = -flow.overlaps[n - 2][(i, j)] / (t[n - 1] - t[n - 2]);
    for s in 1..n - 1 {
        let hm = t[s] - t[s - 1];
        let hp = t[s + 1] - t[s];
        let fwd = flow.overlaps[s][(j, i)];
        let bwd = flow.overlaps[s - 1][(i, j)];
        out[s] = (hm * hm * fwd - hp * hp * bwd) / (hm * hp * (hm + hp));
    }
    Ok(out)
}

/// Coupling at an arbitrary time, linearly interpolated between slices.
pub fn nonadiabatic_coupling(flow: &SpectralFlow, i: usize, j: usize, t: f64) -> Result<f64> {
    let n = flow.len();
    let times = &flow.times;
    if n < 2 || t < times[0] || t > times[n - 1] {
        return Err(Error::Domain(format!("t = {t} outside the flow")));
    }
    let s = times.partition_point(|&x| x <= t).clamp(1, n - 1);
    let a = coupling_series(flow, i, j)?;
    let gap = |q: usize| (flow.energies[q][i] - flow.energies[q][j]).abs();
    let u = (t - times[s - 1]) / (times[s] - times[s - 1]);
    let g = gap(s - 1) * (1.0 - u) + gap(s) * u;
    if g < SINGULAR_GAP {
        return Err(Error::Singularity { time: t, gap: g });
    }
    Ok(a[s - 1] * (1.0 - u) + a[s] * u)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionEstimate {
    pub p: f64,
    /// `|int A e^{i phi}|^2`.
    pub numerator: f64,
    /// `|int A|^2`.
    pub denominator: f64,
    pub window: (f64, f64),
    pub total_time: f64,
    /// Largest endpoint coupling relative to the peak inside the window.
    pub edge_ratio: f64,
    /// Set when quadrature noise pushed `p` above one and it was clamped.
    pub clamped: bool,
}

/// `int_0^h (a0 + (a1 - a0) u/h) e^{i (phi0 + w u)} du` for linear data.
fn filon_segment(h: f64, a0: f64, a1: f64, phi0: f64, w: f64) -> Complex64 {
    let x = w * h;
    // Moments m0 = int_0^1 e^{ixs} ds, m1 = int_0^1 s e^{ixs} ds.
    let (m0, m1) = if x.abs() < 1e-3 {
        let i = Complex64::i();
        let x2 = x * x;
        (
            Complex64::new(1.0 - x2 / 6.0, 0.0) + i * (x / 2.0 - x2 * x / 24.0),
            Complex64::new(0.5 - x2 / 8.0, 0.0) + i * (x / 3.0 - x2 * x / 30.0),
        )
    } else {
        let e = Complex64::from_polar(1.0, x);
        let i = Complex64::i();
        let m0 = (e - 1.0) / (i * x);
        let m1 = e / (i * x) + (e - 1.0) / (x * x);
        (m0, m1)
    };
    Complex64::from_polar(h, phi0) * (m0 * a0 + m1 * (a1 - a0))
}

/// Evaluates the estimator on the time window `[t_a, t_b]` of the flow,
/// failing when the coupling has not decayed at both window edges.
pub fn transition_probability(
    flow: &SpectralFlow,
    i: usize,
    j: usize,
    window: (f64, f64),
    total_time: f64,
) -> Result<TransitionEstimate> {
    let est = window_estimate(flow, i, j, window, total_time)?;
    if !(est.edge_ratio < WINDOW_DECAY) {
        return Err(Error::WindowTooNarrow {
            start: est.window.0,
            end: est.window.1,
            ratio: est.edge_ratio,
        });
    }
    Ok(est)
}

/// Linear interpolation of a per-slice series at `t`, inside slice interval `s`.
fn lerp(times: &[f64], values: &[f64], s: usize, t: f64) -> f64 {
    let u = (t - times[s]) / (times[s + 1] - times[s]);
    values[s] + (values[s + 1] - values[s]) * u
}

/// The estimator on `[t_a, t_b]` without the edge-decay requirement; the
/// ratio is reported in [`TransitionEstimate::edge_ratio`]. Coupling and gap
/// are linear between slices, so the edges need not fall on slices.
pub fn window_estimate(
    flow: &SpectralFlow,
    i: usize,
    j: usize,
    window: (f64, f64),
    total_time: f64,
) -> Result<TransitionEstimate> {
    let (t_a, t_b) = window;
    let times = &flow.times;
    let n = flow.len();
    if n < 2 || !(t_a < t_b && t_a >= times[0] && t_b <= times[n - 1]) {
        return Err(Error::Contract(format!("window [{t_a}, {t_b}] not inside the flow")));
    }
    let coupling = coupling_series(flow, i, j)?;
    let diff: Vec<f64> = flow.energies.iter().map(|e| e[j] - e[i]).collect();
    let interval = |t: f64| times.partition_point(|&x| x <= t).clamp(1, n - 1) - 1;
    let (sa, sb) = (interval(t_a), interval(t_b));
    // Nodes: both edges and every slice strictly between them.
    let mut nodes = vec![(t_a, lerp(times, &coupling, sa, t_a), lerp(times, &diff, sa, t_a))];
    for s in sa + 1..=sb {
        if times[s] > t_a && times[s] < t_b {
            nodes.push((times[s], coupling[s], diff[s]));
        }
    }
    nodes.push((t_b, lerp(times, &coupling, sb, t_b), lerp(times, &diff, sb, t_b)));

    let peak = nodes.iter().fold(0.0f64, |m, v| m.max(v.1.abs()));
    let edge = nodes[0].1.abs().max(nodes[nodes.len() - 1].1.abs());
    let edge_ratio = if peak > 0.0 { edge / peak } else { 1.0 };
    for &(t, _, d) in &nodes {
        if d.abs() < SINGULAR_GAP {
            return Err(Error::Singularity { time: t, gap: d.abs() });
        }
    }
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    let mut phi = 0.0;
    for w in nodes.windows(2) {
        let ((t0, a0, d0), (t1, a1, d1)) = (w[0], w[1]);
        let h = t1 - t0;
        den += 0.5 * h * (a0 + a1);
        // Sub-intervals keep the phase advance small, so that the linear
        // phase model inside each of them is accurate.
        let advance = 0.5 * (d0.abs() + d1.abs()) * h;
        let m = ((advance / MAX_PHASE_STEP).ceil() as usize).max(1);
        let hs = h / m as f64;
        for q in 0..m {
            let u0 = q as f64 / m as f64;
            let u1 = (q + 1) as f64 / m as f64;
            let c0 = a0 + (a1 - a0) * u0;
            let c1 = a0 + (a1 - a0) * u1;
            let e0 = d0 + (d1 - d0) * u0;
            let e1 = d0 + (d1 - d0) * u1;
            let w = 0.5 * (e0 + e1);
            num += filon_segment(hs, c0, c1, phi, w);
            phi += w * hs;
        }
    }
    let numerator = num.norm_sqr();
    let denominator = den * den;
    if !(denominator > 0.0) {
        return Err(Error::Numerical("vanishing coupling integral".into()));
    }
    let raw = numerator / denominator;
    let clamped = raw > 1.0;
    Ok(TransitionEstimate {
        p: raw.min(1.0),
        numerator,
        denominator,
        window,
        total_time,
        edge_ratio,
        clamped,
    })
}

/// Estimate for a detected crossing, between the followed track and its
/// partner.
pub fn crossing_probability(flow: &SpectralFlow, event: &CrossingEvent, total_time: f64) -> Result<TransitionEstimate> {
    transition_probability(flow, event.track, event.partner, event.window, total_time)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filon_matches_fine_trapezoid() {
        let (h, a0, a1, phi0, w) = (0.7, 0.3, -1.1, 0.4, 9.0);
        let exact = filon_segment(h, a0, a1, phi0, w);
        let n = 200_000;
        let mut acc = Complex64::new(0.0, 0.0);
        for q in 0..=n {
            let u = h * q as f64 / n as f64;
            let f = (a0 + (a1 - a0) * u / h) * Complex64::from_polar(1.0, phi0 + w * u);
            let wq = if q == 0 || q == n { 0.5 } else { 1.0 };
            acc += f * wq * (h / n as f64);
        }
        assert!((exact - acc).norm() < 1e-9);
        let small = filon_segment(h, a0, a1, phi0, 1e-5);
        let plain = Complex64::from_polar(1.0, phi0) * (0.5 * h * (a0 + a1));
        assert!((small - plain).norm() < 1e-5);
    }
}
