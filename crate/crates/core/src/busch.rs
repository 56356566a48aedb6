//! Two particles with a contact interaction in one harmonic well.
//!
//! In the relative coordinate the pair feels `g delta(x1 - x2)` on top of a
//! unit-frequency oscillator. Eigenenergies of even relative states
//! (centre-of-mass ground state included, so the pair energy is `E`) obey
//!
//! `g = -2 sqrt(2) Gamma(1 - E/2) / Gamma((1 - E)/2)`.
//!
//! The ground branch maps `g in [0, inf)` monotonically onto `E in [1, 2)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::exact::{eigen, TwoBodyHamiltonian};
use crate::grid::Grid2D;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for real arguments, any sign; poles return `inf`/`nan`.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        let s = (PI * x).sin();
        if s == 0.0 {
            return f64::NAN;
        }
        PI / (s * gamma(1.0 - x))
    } else {
        lanczos(x)
    }
}

/// `1 / Gamma(x)`, an entire function: exactly zero at the poles of Gamma.
pub fn rgamma(x: f64) -> f64 {
    if x < 0.5 {
        (PI * x).sin() * gamma(1.0 - x) / PI
    } else {
        1.0 / lanczos(x)
    }
}

fn lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a
}

/// Interaction strength that gives pair ground energy `energy`.
///
/// Defined on `[1, 2)`; `g_from_energy(1.0)` is exactly zero.
pub fn g_from_energy(energy: f64) -> Result<f64> {
    if !(1.0..2.0).contains(&energy) {
        return Err(Error::Domain(format!(
            "pair ground energy must lie in [1, 2), got {energy}"
        )));
    }
    let g = -2.0 * SQRT_2 * gamma(1.0 - 0.5 * energy) * rgamma(0.5 * (1.0 - energy));
    if !g.is_finite() {
        return Err(Error::Numerical(format!(
            "interaction strength overflowed at E = {energy}"
        )));
    }
    // rgamma(-0.0) is -0.0; report a clean zero.
    Ok(if g == 0.0 { 0.0 } else { g })
}

/// Pair ground energy for interaction strength `g >= 0`.
pub fn energy_from_g(g: f64) -> Result<f64> {
    if !(g.is_finite() && g >= 0.0) {
        return Err(Error::Domain(format!(
            "interaction strength must be finite and non-negative, got {g}"
        )));
    }
    if g == 0.0 {
        return Ok(1.0);
    }
    let mut lo = 1.0_f64;
    let mut hi = 2.0_f64;
    // Largest representable energy below 2.
    let top = f64::from_bits(hi.to_bits() - 1);
    if g_from_energy(top)? < g {
        return Err(Error::Domain(format!(
            "interaction strength {g} exceeds the representable range"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g_from_energy(mid)? < g {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Pick whichever bracket end reproduces g better.
    let candidates = [lo, hi.min(top)];
    let best = candidates
        .iter()
        .copied()
        .min_by(|a, b| {
            let ea = (g_from_energy(*a).unwrap_or(f64::INFINITY) - g).abs();
            let eb = (g_from_energy(*b).unwrap_or(f64::INFINITY) - g).abs();
            ea.total_cmp(&eb)
        })
        .ok_or_else(|| Error::Numerical("empty bisection bracket".into()))?;
    Ok(best)
}

/// An interaction working point, specified through either coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionPoint {
    pub energy: f64,
    pub g: f64,
}

impl InteractionPoint {
    pub fn from_energy(energy: f64) -> Result<Self> {
        Ok(InteractionPoint {
            energy,
            g: g_from_energy(energy)?,
        })
    }

    pub fn from_g(g: f64) -> Result<Self> {
        Ok(InteractionPoint {
            energy: energy_from_g(g)?,
            g,
        })
    }
}

/// Minimum distance between a well centre and the grid edge.
pub const PAIR_STATE_MARGIN: f64 = 6.0;

/// Constant in the discretisation tolerance `max(1e-4, C h^2)` on pair energies.
pub const PAIR_ENERGY_H2_COEFF: f64 = 0.25;

/// Discretisation tolerance on the pair ground energy for spacing `h`.
pub fn pair_energy_tolerance(h: f64) -> f64 {
    (PAIR_ENERGY_H2_COEFF * h * h).max(1e-4)
}

/// Bosonic pair ground state of one isolated harmonic well on a grid.
#[derive(Debug, Clone)]
pub struct PairState {
    pub centre: f64,
    pub interaction: InteractionPoint,
    pub grid: Grid2D,
    /// Discrete energy of the state.
    pub energy: f64,
    /// Normalised real amplitudes, row-major over `(x1, x2)`.
    pub amplitudes: Vec<f64>,
}

impl PairState {
    /// Same state translated by mirror reflection `x -> -x`.
    pub fn mirrored(&self) -> Result<PairState> {
        if !self.grid.is_mirror_symmetric() {
            return Err(Error::Contract("grid is not mirror symmetric".into()));
        }
        Ok(PairState {
            centre: -self.centre,
            interaction: self.interaction,
            grid: self.grid,
            energy: self.energy,
            amplitudes: self.grid.mirror(&self.amplitudes),
        })
    }
}

/// Ground state of two bosons in a single well centred at `centre`.
///
/// The energy is checked against the exact pair energy to within the
/// discretisation tolerance; a coarser grid yields [`Error::Resolution`].
pub fn pair_ground_state(g: f64, centre: f64, grid: &Grid2D) -> Result<PairState> {
    let interaction = InteractionPoint::from_g(g)?;
    let margin = (centre - grid.x_min()).min(grid.x_max() - centre);
    if margin < PAIR_STATE_MARGIN {
        return Err(Error::Geometry(format!(
            "well at {centre} is only {margin:.2} from the grid edge (need {PAIR_STATE_MARGIN})"
        )));
    }
    let potential: Vec<f64> = grid
        .points()
        .map(|x| 0.5 * (x - centre) * (x - centre))
        .collect();
    let ham = TwoBodyHamiltonian::new(*grid, potential, g)?;
    let settings = eigen::EigenSettings {
        count: 1,
        block: 4,
        tolerance: 1e-10,
        ..eigen::EigenSettings::default()
    };
    let seed = gaussian_pair_guess(grid, centre);
    let res = eigen::lowest_eigenpairs(&ham, &settings, Some(std::slice::from_ref(&seed)))?;
    let energy = res.values[0];
    let tol = pair_energy_tolerance(grid.h());
    if (energy - interaction.energy).abs() > tol {
        return Err(Error::Resolution(format!(
            "pair energy {energy:.6} deviates from {:.6} by more than {tol:.2e} at h = {:.4}",
            interaction.energy,
            grid.h()
        )));
    }
    let mut amplitudes = res.vectors.into_iter().next().unwrap_or_default();
    // Fix the sign so the state is positive at its maximum.
    let peak = amplitudes
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    if peak < 0.0 {
        amplitudes.iter_mut().for_each(|a| *a = -*a);
    }
    Ok(PairState {
        centre,
        interaction,
        grid: *grid,
        energy,
        amplitudes,
    })
}

/// Non-interacting pair ground state, used as a starting guess.
pub(crate) fn gaussian_pair_guess(grid: &Grid2D, centre: f64) -> Vec<f64> {
    let phi: Vec<f64> = grid
        .points()
        .map(|x| (-0.5 * (x - centre) * (x - centre)).exp())
        .collect();
    let mut v = grid.outer(&phi, &phi);
    grid.normalize(&mut v);
    v
}
