//! Triple-well geometry and the counter-intuitive trap trajectory.
//!
//! Three harmonic traps with unit frequency sit at `d_L < d_M < d_R`. The
//! middle trap is fixed at the origin. The right trap approaches and recedes
//! first, the left trap follows after a delay, so the left/middle separation
//! `sep_LM` and the middle/right separation `sep_MR` are two overlapping
//! pulses with `sep_MR` leading. The potential is the minimum of the three
//! parabolas.
//!
//! Each separation pulse is a raised cosine,
//! `sep(t) = d_max - (d_max - d_min) sin^2(pi (t - start) / duration)`
//! inside its window and `d_max` outside. The profile is C1 at the window
//! edges and at the point of closest approach.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Positions of the three trap minima at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapLayout {
    pub left: f64,
    pub middle: f64,
    pub right: f64,
}

impl TrapLayout {
    /// Layout with the middle trap at the origin.
    pub fn from_separations(sep_lm: f64, sep_mr: f64) -> Self {
        TrapLayout {
            left: -sep_lm,
            middle: 0.0,
            right: sep_mr,
        }
    }

    pub fn sep_lm(&self) -> f64 {
        self.middle - self.left
    }

    pub fn sep_mr(&self) -> f64 {
        self.right - self.middle
    }

    /// Trap centres in left, middle, right order.
    pub fn centres(&self) -> [f64; 3] {
        [self.left, self.middle, self.right]
    }

    /// Image under `x -> -x`, which swaps the roles of the outer traps.
    pub fn mirrored(&self) -> Self {
        TrapLayout {
            left: -self.right,
            middle: -self.middle,
            right: -self.left,
        }
    }

    /// Triple-well potential `min_j (x - d_j)^2 / 2`.
    pub fn potential(&self, x: f64) -> f64 {
        self.centres()
            .iter()
            .map(|c| 0.5 * (x - c) * (x - c))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Shape of each separation pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Ramp {
    #[default]
    RaisedCosine,
}

impl Ramp {
    /// Pulse depth in `[0, 1]` at fractional position `u` of its window.
    fn profile(self, u: f64) -> f64 {
        match self {
            Ramp::RaisedCosine => {
                let s = (PI * u).sin();
                s * s
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Ramp::RaisedCosine => "raised-cosine",
        }
    }
}

/// Counter-intuitive trajectory of the outer traps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryParams {
    pub total_time: f64,
    pub d_max: f64,
    pub d_min: f64,
    /// Offset between the two pulses.
    pub delay: f64,
    #[serde(default)]
    pub ramp: Ramp,
}

impl TrajectoryParams {
    /// Default protocol: `d_max = 9`, `d_min = 3`, delay `T / 10`.
    pub fn new(total_time: f64) -> Result<Self> {
        let p = TrajectoryParams {
            total_time,
            d_max: 9.0,
            d_min: 3.0,
            delay: 0.1 * total_time,
            ramp: Ramp::RaisedCosine,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_separations(mut self, d_min: f64, d_max: f64) -> Result<Self> {
        self.d_min = d_min;
        self.d_max = d_max;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.total_time, self.d_max, self.d_min, self.delay]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Geometry("non-finite trajectory parameter".into()));
        }
        if self.total_time <= 0.0 {
            return Err(Error::Geometry(format!(
                "total time must be positive, got {}",
                self.total_time
            )));
        }
        if !(self.d_min > 0.0 && self.d_min < self.d_max) {
            return Err(Error::Geometry(format!(
                "need 0 < d_min < d_max, got d_min = {}, d_max = {}",
                self.d_min, self.d_max
            )));
        }
        if !(self.delay > 0.0 && self.delay < 0.5 * self.total_time) {
            return Err(Error::Geometry(format!(
                "delay must lie in (0, T/2), got {} for T = {}",
                self.delay, self.total_time
            )));
        }
        Ok(())
    }

    /// Length of each separation pulse.
    pub fn pulse_duration(&self) -> f64 {
        self.total_time - self.delay
    }

    fn pulse(&self, t: f64, start: f64) -> f64 {
        let dur = self.pulse_duration();
        let u = (t - start) / dur;
        if !(0.0..=1.0).contains(&u) {
            return self.d_max;
        }
        self.d_max - (self.d_max - self.d_min) * self.ramp.profile(u)
    }

    fn check_time(&self, t: f64) -> Result<f64> {
        let slack = 1e-9 * self.total_time;
        if !t.is_finite() || t < -slack || t > self.total_time + slack {
            return Err(Error::Domain(format!(
                "time {t} outside protocol [0, {}]",
                self.total_time
            )));
        }
        Ok(t.clamp(0.0, self.total_time))
    }

    /// `(sep_LM, sep_MR)` at time `t`.
    pub fn separations_at(&self, t: f64) -> Result<(f64, f64)> {
        let t = self.check_time(t)?;
        Ok((self.pulse(t, self.delay), self.pulse(t, 0.0)))
    }

    pub fn positions_at(&self, t: f64) -> Result<TrapLayout> {
        let (lm, mr) = self.separations_at(t)?;
        Ok(TrapLayout::from_separations(lm, mr))
    }

    /// Uniformly sampled table `(t, d_L, d_M, d_R)` with `samples` rows.
    pub fn sample(&self, samples: usize) -> Result<Vec<(f64, TrapLayout)>> {
        if samples < 2 {
            return Err(Error::Contract("need at least two trajectory samples".into()));
        }
        (0..samples)
            .map(|k| {
                let t = self.total_time * k as f64 / (samples - 1) as f64;
                self.positions_at(t).map(|l| (t, l))
            })
            .collect()
    }

    /// Same protocol with all times scaled to a new total duration.
    pub fn rescaled(&self, total_time: f64) -> Result<Self> {
        let mut p = *self;
        p.delay = self.delay / self.total_time * total_time;
        p.total_time = total_time;
        p.validate()?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_far_apart() {
        let p = TrajectoryParams::new(1000.0).unwrap();
        for t in [0.0, 1000.0] {
            let l = p.positions_at(t).unwrap();
            assert_eq!(l.sep_lm(), 9.0);
            assert_eq!(l.sep_mr(), 9.0);
        }
    }

    #[test]
    fn right_pulse_leads() {
        let p = TrajectoryParams::new(1000.0).unwrap();
        let (lm, mr) = p.separations_at(200.0).unwrap();
        assert!(mr < lm);
        let (lm, mr) = p.separations_at(800.0).unwrap();
        assert!(lm < mr);
        let (_, mr) = p.separations_at(450.0).unwrap();
        assert!((mr - 3.0).abs() < 1e-12);
        let (lm, _) = p.separations_at(550.0).unwrap();
        assert!((lm - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let p = TrajectoryParams::new(100.0).unwrap();
        assert!(matches!(p.positions_at(-1.0), Err(Error::Domain(_))));
        assert!(matches!(p.positions_at(100.5), Err(Error::Domain(_))));
        assert!(matches!(
            p.with_separations(5.0, 4.0),
            Err(Error::Geometry(_))
        ));
        assert!(TrajectoryParams::new(-1.0).is_err());
    }

    #[test]
    fn potential_is_min_of_parabolas() {
        let l = TrapLayout::from_separations(4.0, 6.0);
        assert_eq!(l.potential(0.0), 0.0);
        assert_eq!(l.potential(-4.0), 0.0);
        assert!((l.potential(1.0) - 0.5).abs() < 1e-15);
        assert!((l.potential(4.0) - 2.0).abs() < 1e-15);
    }
}
