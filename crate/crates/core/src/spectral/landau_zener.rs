//! Two-level Landau-Zener sweep, `H(t) = [[alpha t / 2, delta], [delta, -alpha t / 2]]`,
//! used as an analytic reference for the tracker and the estimator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::crossing::{detect_crossings, CrossingCriteria};
use super::flow::{build_adaptive_flow, AdaptiveSettings, SliceData, SpectralFlow};
use super::transition::{crossing_probability, TransitionEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandauZener {
    /// Sweep rate of the diabatic energy difference.
    pub alpha: f64,
    /// Half the minimum gap.
    pub delta: f64,
}

impl LandauZener {
    pub fn new(alpha: f64, delta: f64) -> Result<Self> {
        if !(alpha > 0.0 && delta > 0.0 && alpha.is_finite() && delta.is_finite()) {
            return Err(Error::Domain(format!("Landau-Zener model needs alpha, delta > 0, got {alpha}, {delta}")));
        }
        Ok(LandauZener { alpha, delta })
    }

    /// Sweep rate giving diabatic probability `p`.
    pub fn with_probability(p: f64, delta: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("probability {p} not in (0, 1)")));
        }
        Self::new(-2.0 * std::f64::consts::PI * delta * delta / p.ln(), delta)
    }

    /// `exp(-2 pi delta^2 / alpha)`.
    pub fn exact_probability(&self) -> f64 {
        (-2.0 * std::f64::consts::PI * self.delta * self.delta / self.alpha).exp()
    }

    /// Width of the coupling peak, `2 delta / alpha`.
    pub fn crossing_width(&self) -> f64 {
        2.0 * self.delta / self.alpha
    }

    /// Analytic eigenpairs at `t`, sign-continuous in `t`.
    pub fn slice(&self, t: f64) -> SliceData {
        let b = 0.5 * self.alpha * t;
        let r = b.hypot(self.delta);
        // Mixing angle theta in (0, pi/2): ground = (sin, -cos)... written so
        // that both vectors vary smoothly through t = 0.
        let theta = 0.5 * self.delta.atan2(b);
        let (s, c) = theta.sin_cos();
        SliceData {
            time: t,
            energies: vec![-r, r],
            vectors: vec![vec![-s, c], vec![c, s]],
        }
    }

    /// Flow over `[-span, span]` with `span = reach * width`.
    pub fn flow(&self, reach: f64) -> Result<SpectralFlow> {
        let span = reach * self.crossing_width();
        let mut settings = AdaptiveSettings::for_span(2.0 * span);
        settings.epsilon = 1e-3;
        let mut src = |t: f64| Ok(self.slice(t));
        build_adaptive_flow(&mut src, -span, span, None, &settings)
    }

    /// Estimator evaluated on the synthetic flow.
    pub fn estimate(&self) -> Result<TransitionEstimate> {
        let flow = self.flow(200.0)?;
        let events = detect_crossings(&flow, 0, CrossingCriteria { gap_threshold: f64::INFINITY, min_rise: self.delta })?;
        let ev = events
            .first()
            .ok_or_else(|| Error::Numerical("no crossing found in the Landau-Zener flow".into()))?;
        crossing_probability(&flow, ev, 2.0 * 200.0 * self.crossing_width())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slice_is_an_eigenbasis() {
        let lz = LandauZener::new(0.3, 0.2).unwrap();
        for &t in &[-5.0, -0.1, 0.0, 0.7, 4.0] {
            let s = lz.slice(t);
            let h = [[0.15 * t, 0.2], [0.2, -0.15 * t]];
            for k in 0..2 {
                let v = &s.vectors[k];
                for r in 0..2 {
                    let hv = h[r][0] * v[0] + h[r][1] * v[1];
                    assert!((hv - s.energies[k] * v[r]).abs() < 1e-14);
                }
            }
        }
    }
}
