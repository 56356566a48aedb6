//! Time propagation of the two-particle wave function.
//!
//! Two unitary second-order schemes are available, both acting on the same
//! discrete Hamiltonian the eigensolver diagonalises:
//!
//! * [`Scheme::ExponentialMidpoint`] (default): each step applies
//!   `exp(-i H(t + dt/2) dt)`, evaluated by a Chebyshev expansion converged
//!   to machine precision. For frozen traps this is the exact discrete
//!   propagator, so energy is conserved to round-off.
//! * [`Scheme::SplitStep`]: Strang splitting
//!   `e^{-iK dt/2} e^{-iV(t+dt/2) dt} e^{-iK dt/2}` with the kinetic factor
//!   applied in Fourier space, where the periodic finite-difference Laplacian
//!   has per-axis symbol `(1 - cos(2 pi m / n)) / h^2`. Cheap per step, but
//!   the splitting error around the contact line is large at finite `g`.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{transpose_into, Grid2D};
use crate::trap::{TrajectoryParams, TrapLayout};

use super::TwoBodyHamiltonian;

/// Two-particle wave function at a given time.
#[derive(Debug, Clone)]
pub struct WaveFunction2 {
    pub grid: Grid2D,
    pub time: f64,
    pub amplitudes: Vec<Complex64>,
}

impl WaveFunction2 {
    pub fn from_real(grid: Grid2D, time: f64, amplitudes: &[f64]) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::Contract(format!(
                "state has {} amplitudes, grid has {} points",
                amplitudes.len(),
                grid.len()
            )));
        }
        Ok(WaveFunction2 {
            grid,
            time,
            amplitudes: amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        })
    }

    pub fn norm(&self) -> f64 {
        self.grid.norm_c(&self.amplitudes)
    }

    /// `<phi|psi>` for a real reference state `phi`.
    pub fn overlap_real(&self, phi: &[f64]) -> Complex64 {
        self.grid.inner_rc(phi, &self.amplitudes)
    }

    pub fn symmetry_violation(&self) -> f64 {
        self.grid.symmetry_violation(&self.amplitudes)
    }
}

/// Trap positions as a function of time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PotentialSchedule {
    Static(TrapLayout),
    Moving(TrajectoryParams),
}

impl PotentialSchedule {
    pub fn layout_at(&self, t: f64) -> Result<TrapLayout> {
        match self {
            PotentialSchedule::Static(l) => Ok(*l),
            PotentialSchedule::Moving(p) => p.positions_at(t),
        }
    }
}

/// Summary of one propagation call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PropagationReport {
    pub steps: usize,
    pub dt: f64,
    /// Largest `|norm - norm_0|` observed at the check points.
    pub norm_drift: f64,
    /// Largest exchange-antisymmetric component observed.
    pub symmetry_violation: f64,
}

/// Propagation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    ExponentialMidpoint,
    SplitStep,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::ExponentialMidpoint => "exponential-midpoint",
            Scheme::SplitStep => "split-step",
        }
    }

    /// Default time step for the scheme.
    pub fn default_dt(self) -> f64 {
        match self {
            Scheme::ExponentialMidpoint => 0.25,
            Scheme::SplitStep => 0.005,
        }
    }
}

/// Norm drift allowed per thousand steps before a step-size failure.
pub const NORM_DRIFT_PER_1000_STEPS: f64 = 1e-6;

/// Steps between norm and symmetry checks.
const CHECK_EVERY: usize = 500;

trait StepKernel {
    /// Advances `count` steps of size `dt` starting at `t0`.
    fn advance(&mut self, a: &mut [Complex64], t0: f64, dt: f64, count: usize) -> Result<()>;
}

/// Time stepper for one grid, interaction strength and trap schedule.
pub struct Propagator {
    grid: Grid2D,
    scheme: Scheme,
    dt: f64,
    kernel: Box<dyn StepKernel + Send>,
}

impl std::fmt::Debug for Propagator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Propagator")
            .field("grid", &self.grid)
            .field("scheme", &self.scheme)
            .field("dt", &self.dt)
            .finish()
    }
}

impl Propagator {
    /// Propagator with target step `dt`; each call uses the largest step
    /// `<= dt` that divides its interval evenly.
    pub fn new(grid: Grid2D, g: f64, schedule: PotentialSchedule, scheme: Scheme, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Config(format!("time step must be positive, got {dt}")));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::Domain(format!("invalid interaction strength {g}")));
        }
        let kernel: Box<dyn StepKernel + Send> = match scheme {
            Scheme::ExponentialMidpoint => Box::new(ChebyshevKernel::new(grid, g, schedule)),
            Scheme::SplitStep => Box::new(SplitStepKernel::new(grid, g, schedule)),
        };
        Ok(Propagator {
            grid,
            scheme,
            dt,
            kernel,
        })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `psi` from `psi.time` to `t_end`.
    pub fn propagate(&mut self, psi: &mut WaveFunction2, t_end: f64) -> Result<PropagationReport> {
        self.propagate_observed(psi, t_end, f64::INFINITY, &mut |_| Ok(()))
    }

    /// Like [`propagate`](Self::propagate), calling `observer` about every
    /// `observe_interval` time units and at the end.
    pub fn propagate_observed(
        &mut self,
        psi: &mut WaveFunction2,
        t_end: f64,
        observe_interval: f64,
        observer: &mut dyn FnMut(&WaveFunction2) -> Result<()>,
    ) -> Result<PropagationReport> {
        if psi.grid != self.grid {
            return Err(Error::Contract("wave function lives on a different grid".into()));
        }
        let span = t_end - psi.time;
        if span < 0.0 {
            return Err(Error::Contract(format!(
                "cannot propagate backwards from {} to {t_end}",
                psi.time
            )));
        }
        let mut report = PropagationReport::default();
        if span == 0.0 {
            return Ok(report);
        }
        let steps = (span / self.dt - 1e-9).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        report.dt = dt;
        let chunk = if observe_interval.is_finite() {
            ((observe_interval / dt).round() as usize).clamp(1, CHECK_EVERY)
        } else {
            CHECK_EVERY
        };
        let norm0 = psi.norm();
        let t0 = psi.time;
        let mut done = 0usize;
        let mut since_observe = 0.0;
        while done < steps {
            let count = chunk.min(steps - done);
            self.kernel
                .advance(&mut psi.amplitudes, t0 + done as f64 * dt, dt, count)?;
            done += count;
            psi.time = if done == steps { t_end } else { t0 + done as f64 * dt };
            let drift = (psi.norm() - norm0).abs();
            if !drift.is_finite() {
                return Err(Error::Numerical("wave function became non-finite".into()));
            }
            report.steps += count;
            report.norm_drift = report.norm_drift.max(drift);
            report.symmetry_violation = report.symmetry_violation.max(psi.symmetry_violation());
            let allowed = NORM_DRIFT_PER_1000_STEPS * (done as f64 / 1000.0).max(1.0);
            if drift > allowed {
                return Err(Error::StepSize(format!(
                    "norm drifted by {drift:.3e} after {done} steps of {dt} (allowed {allowed:.1e})"
                )));
            }
            since_observe += count as f64 * dt;
            if since_observe >= observe_interval - 0.5 * dt || done == steps {
                since_observe = 0.0;
                observer(psi)?;
            }
        }
        Ok(report)
    }
}

struct ChebyshevKernel {
    grid: Grid2D,
    g: f64,
    schedule: PotentialSchedule,
    phi0: Vec<Complex64>,
    phi1: Vec<Complex64>,
    acc: Vec<Complex64>,
}

/// Relative size below which Chebyshev terms are dropped.
const CHEBYSHEV_CUTOFF: f64 = 1e-17;

impl ChebyshevKernel {
    fn new(grid: Grid2D, g: f64, schedule: PotentialSchedule) -> Self {
        let n = grid.len();
        ChebyshevKernel {
            grid,
            g,
            schedule,
            phi0: vec![Complex64::default(); n],
            phi1: vec![Complex64::default(); n],
            acc: vec![Complex64::default(); n],
        }
    }

    fn step(&mut self, a: &mut [Complex64], ham: &TwoBodyHamiltonian, dt: f64) {
        let lo = ham.spectral_lower_bound();
        let hi = ham.spectral_upper_bound();
        let centre = 0.5 * (hi + lo);
        let half = 0.5 * (hi - lo);
        let coeffs = chebyshev_coefficients(half * dt);
        // Scaled operator Hn = (H - centre) / half with spectrum in [-1, 1].
        let s = 1.0 / half;
        let r = -centre / half;
        self.phi0.copy_from_slice(a);
        self.phi1.iter_mut().for_each(|z| *z = Complex64::default());
        ham.apply_recurrence(&self.phi0, &mut self.phi1, s, r);
        for (o, (p0, p1)) in self.acc.iter_mut().zip(self.phi0.iter().zip(&self.phi1)) {
            *o = p0 * coeffs[0] + p1 * coeffs[1];
        }
        for c in coeffs.iter().skip(2) {
            // phi0 <- 2 Hn phi1 - phi0, then swap so phi1 is the newest term.
            ham.apply_recurrence(&self.phi1, &mut self.phi0, 2.0 * s, 2.0 * r);
            std::mem::swap(&mut self.phi0, &mut self.phi1);
            for (o, p) in self.acc.iter_mut().zip(&self.phi1) {
                *o += p * c;
            }
        }
        let phase = Complex64::from_polar(1.0, -centre * dt);
        for (z, o) in a.iter_mut().zip(&self.acc) {
            *z = o * phase;
        }
    }
}

impl StepKernel for ChebyshevKernel {
    fn advance(&mut self, a: &mut [Complex64], t0: f64, dt: f64, count: usize) -> Result<()> {
        let mut cache: Option<(TrapLayout, TwoBodyHamiltonian)> = None;
        for s in 0..count {
            let layout = self.schedule.layout_at(t0 + (s as f64 + 0.5) * dt)?;
            let fresh = match &cache {
                Some((l, _)) => *l != layout,
                None => true,
            };
            if fresh {
                cache = Some((layout, TwoBodyHamiltonian::for_layout(self.grid, &layout, self.g)?));
            }
            let ham = &cache.as_ref().expect("hamiltonian cached above").1;
            self.step(a, ham, dt);
        }
        Ok(())
    }
}

/// Coefficients `c_k = (2 - delta_k0) (-i)^k J_k(x)` of `exp(-i x y)` in
/// Chebyshev polynomials `T_k(y)`, truncated once the tail is negligible.
pub(crate) fn chebyshev_coefficients(x: f64) -> Vec<Complex64> {
    let j = bessel_j_sequence(x);
    let mut last = j.len();
    while last > 2 && j[last - 1].abs() < CHEBYSHEV_CUTOFF && j[last - 2].abs() < CHEBYSHEV_CUTOFF {
        last -= 1;
    }
    let mut ik = Complex64::new(1.0, 0.0);
    let minus_i = Complex64::new(0.0, -1.0);
    j.iter()
        .take(last)
        .enumerate()
        .map(|(k, &jk)| {
            let c = ik * if k == 0 { jk } else { 2.0 * jk };
            ik *= minus_i;
            c
        })
        .collect()
}

/// `J_0(x), ..., J_N(x)` for `x >= 0` by Miller's backward recurrence,
/// with `N` large enough that the remaining terms are below `1e-17`.
pub(crate) fn bessel_j_sequence(x: f64) -> Vec<f64> {
    let x = x.abs();
    if x < 1e-300 {
        return vec![1.0, 0.0];
    }
    let needed = (x + 12.0 * x.cbrt() + 30.0).ceil() as usize;
    let start = needed + 30 + (x.sqrt() as usize);
    let mut j = vec![0.0; start + 2];
    j[start] = 1e-300;
    for k in (1..=start).rev() {
        j[k - 1] = 2.0 * k as f64 / x * j[k] - j[k + 1];
        if j[k - 1].abs() > 1e250 {
            for v in j.iter_mut().skip(k - 1) {
                *v *= 1e-250;
            }
        }
    }
    let mut norm = j[0];
    for k in (2..=start).step_by(2) {
        norm += 2.0 * j[k];
    }
    j.truncate(needed + 1);
    j.iter_mut().for_each(|v| *v /= norm);
    j
}

struct SplitStepKernel {
    grid: Grid2D,
    g: f64,
    schedule: PotentialSchedule,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    dispersion: Vec<f64>,
    scratch: Vec<Complex64>,
    buffer: Vec<Complex64>,
}

impl SplitStepKernel {
    fn new(grid: Grid2D, g: f64, schedule: PotentialSchedule) -> Self {
        let n = grid.n();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        let h = grid.h();
        let dispersion = (0..n)
            .map(|m| (1.0 - (2.0 * std::f64::consts::PI * m as f64 / n as f64).cos()) / (h * h))
            .collect();
        let scratch_len = fft.get_inplace_scratch_len().max(ifft.get_inplace_scratch_len());
        SplitStepKernel {
            grid,
            g,
            schedule,
            fft,
            ifft,
            dispersion,
            scratch: vec![Complex64::default(); scratch_len],
            buffer: vec![Complex64::default(); n * n],
        }
    }

    fn potential(&self, a: &mut [Complex64], layout: &TrapLayout, dt: f64) {
        let n = self.grid.n();
        let phase: Vec<Complex64> = self
            .grid
            .points()
            .map(|x| Complex64::from_polar(1.0, -layout.potential(x) * dt))
            .collect();
        let contact = Complex64::from_polar(1.0, -self.g / self.grid.h() * dt);
        for i in 0..n {
            let pi = phase[i];
            let row = &mut a[i * n..(i + 1) * n];
            for (v, pj) in row.iter_mut().zip(&phase) {
                *v *= pi * pj;
            }
            row[i] *= contact;
        }
    }

    fn kinetic(&mut self, a: &mut [Complex64], tau: f64) {
        let n = self.grid.n();
        let norm = 1.0 / (n * n) as f64;
        let factor: Vec<Complex64> = self
            .dispersion
            .iter()
            .map(|d| Complex64::from_polar(1.0, -d * tau))
            .collect();
        self.fft.process_with_scratch(a, &mut self.scratch);
        transpose_into(a, &mut self.buffer, n);
        self.fft.process_with_scratch(&mut self.buffer, &mut self.scratch);
        // The spectrum is stored transposed; the symbol is symmetric in the
        // two axes so the layout does not matter.
        for i in 0..n {
            let fi = factor[i] * norm;
            for (v, fj) in self.buffer[i * n..(i + 1) * n].iter_mut().zip(&factor) {
                *v *= fi * fj;
            }
        }
        self.ifft.process_with_scratch(&mut self.buffer, &mut self.scratch);
        transpose_into(&self.buffer, a, n);
        self.ifft.process_with_scratch(a, &mut self.scratch);
    }
}

impl StepKernel for SplitStepKernel {
    fn advance(&mut self, a: &mut [Complex64], t0: f64, dt: f64, count: usize) -> Result<()> {
        self.kinetic(a, 0.5 * dt);
        for s in 0..count {
            let layout = self.schedule.layout_at(t0 + (s as f64 + 0.5) * dt)?;
            self.potential(a, &layout, dt);
            let tau = if s + 1 == count { 0.5 * dt } else { dt };
            self.kinetic(a, tau);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Integral representation `J_k(x) = (1/pi) int_0^pi cos(k t - x sin t) dt`,
    /// evaluated with the trapezoid rule (spectrally accurate here).
    fn bessel_oracle(k: usize, x: f64) -> f64 {
        let m = 4096;
        let h = std::f64::consts::PI / m as f64;
        let f = |t: f64| (k as f64 * t - x * t.sin()).cos();
        let mut s = 0.5 * (f(0.0) + f(std::f64::consts::PI));
        for i in 1..m {
            s += f(i as f64 * h);
        }
        s * h / std::f64::consts::PI
    }

    #[test]
    fn bessel_sequence_matches_integral() {
        for x in [0.3, 2.0, 17.5, 60.0] {
            let j = bessel_j_sequence(x);
            for k in [0usize, 1, 2, 5, 13, 40] {
                if k < j.len() {
                    assert!((j[k] - bessel_oracle(k, x)).abs() < 1e-13, "k={k} x={x}");
                }
            }
        }
    }

    #[test]
    fn chebyshev_expansion_of_scalar_exponential() {
        // exp(-i x y) at y = cos(theta) equals sum c_k cos(k theta).
        let x = 23.0;
        let c = chebyshev_coefficients(x);
        for y in [-0.9, -0.2, 0.4, 1.0] {
            let th = f64::acos(y);
            let s: Complex64 = c.iter().enumerate().map(|(k, ck)| ck * (k as f64 * th).cos()).sum();
            let e = Complex64::from_polar(1.0, -x * y);
            assert!((s - e).norm() < 1e-13);
        }
    }
}
