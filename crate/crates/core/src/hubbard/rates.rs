//! Tunneling and co-tunneling rates between two neighbouring wells.
//!
//! Rates come from Gram-Schmidt orthogonalisation of localised states: the
//! left state is kept, the right one is orthogonalised against it, and the
//! rate is the matrix element of the two-well Hamiltonian between them,
//! `Omega = (<R|H|L> - S <L|H|L>) / sqrt(1 - S^2)` with `S = <L|R>`. Values
//! are returned with their natural sign; the Hubbard models decide how signs
//! enter. The two-well potential is `min((x + d/2)^2, (x - d/2)^2) / 2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use crate::busch::{pair_ground_state, InteractionPoint};
use crate::error::{Error, Result};
use crate::exact::TwoBodyHamiltonian;
use crate::grid::Grid2D;

use super::spline::RateSpline;

/// Single-particle band of the harmonic well used for localised orbitals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Band {
    Ground,
    Excited,
}

impl Band {
    /// Oscillator eigenfunction at distance `y` from the well centre.
    fn orbital(self, y: f64) -> f64 {
        let g = PI.powf(-0.25) * (-0.5 * y * y).exp();
        match self {
            Band::Ground => g,
            Band::Excited => std::f64::consts::SQRT_2 * y * g,
        }
    }
}

/// Overlap above which two localised states are considered indistinct.
pub const MAX_OVERLAP: f64 = 0.999;

const QUAD_EXTENT: f64 = 12.0;
const QUAD_INTERVALS: usize = 4000;

/// Tunneling rate of one band between wells at `-d/2` and `d/2`.
///
/// Uses the exact oscillator orbitals. Since `h phi_L = e phi_L` wherever
/// the left parabola is the active branch, only the region `x > 0`, where
/// the potential differs by `-x d`, contributes.
pub fn orbital_rate(d: f64, band: Band) -> Result<f64> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Geometry(format!("well separation must be positive, got {d}")));
    }
    let phi_l = |x: f64| band.orbital(x + 0.5 * d);
    let phi_r = |x: f64| band.orbital(x - 0.5 * d);
    let upper = 0.5 * d + QUAD_EXTENT;
    let s = simpson(|x| phi_l(x) * phi_r(x), -upper, upper, 2 * QUAD_INTERVALS);
    if s.abs() > MAX_OVERLAP {
        return Err(Error::Geometry(format!(
            "orbitals at separation {d} overlap by {s:.4}; Gram-Schmidt is ill-conditioned"
        )));
    }
    let i_rl = simpson(|x| -x * d * phi_r(x) * phi_l(x), 0.0, upper, QUAD_INTERVALS);
    let i_ll = simpson(|x| -x * d * phi_l(x) * phi_l(x), 0.0, upper, QUAD_INTERVALS);
    Ok((i_rl - s * i_ll) / (1.0 - s * s).sqrt())
}

/// Ground-band tunneling rate `Omega^0(d)`.
pub fn single_particle_rate(d: f64) -> Result<f64> {
    orbital_rate(d, Band::Ground)
}

/// Excited-band tunneling rate `Omega^1(d)`.
pub fn excited_band_rate(d: f64) -> Result<f64> {
    orbital_rate(d, Band::Excited)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Grid used for the two-particle patch in co-tunneling calculations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatchResolution {
    /// Target grid spacing.
    pub spacing: f64,
    /// Distance from each well to the nearer patch edge.
    pub margin: f64,
}

impl Default for PatchResolution {
    fn default() -> Self {
        PatchResolution {
            spacing: 0.1,
            margin: 7.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CotunnelingRate {
    pub value: f64,
    /// Overlap of the two localised pair states.
    pub overlap: f64,
    /// Discrete energy of the isolated pair state.
    pub pair_energy: f64,
}

/// Pair (co-)tunneling rate `Omega_co(d)` at interaction strength `g`.
///
/// The localised states are the numerical pair ground states of each well;
/// the right one is the mirror image of the left one.
pub fn cotunneling_rate(d: f64, g: f64, resolution: &PatchResolution) -> Result<CotunnelingRate> {
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Geometry(format!("well separation must be positive, got {d}")));
    }
    let grid = Grid2D::with_spacing(0.5 * d + resolution.margin, resolution.spacing)?;
    let left = pair_ground_state(g, -0.5 * d, &grid)?;
    let right = grid.mirror(&left.amplitudes);
    let s = grid.inner(&left.amplitudes, &right);
    if s.abs() > MAX_OVERLAP {
        return Err(Error::Geometry(format!(
            "pair states at separation {d} overlap by {s:.4}"
        )));
    }
    let potential = grid
        .points()
        .map(|x| {
            let a = x + 0.5 * d;
            let b = x - 0.5 * d;
            0.5 * (a * a).min(b * b)
        })
        .collect();
    let ham = TwoBodyHamiltonian::new(grid, potential, g)?;
    let mut hl = vec![0.0; grid.len()];
    ham.apply_into(&left.amplitudes, &mut hl);
    let h_rl = grid.inner(&right, &hl);
    let h_ll = grid.inner(&left.amplitudes, &hl);
    Ok(CotunnelingRate {
        value: (h_rl - s * h_ll) / (1.0 - s * s).sqrt(),
        overlap: s,
        pair_energy: left.energy,
    })
}

/// Sampling of the separation axis for rate tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTableSpec {
    pub d_min: f64,
    pub d_max: f64,
    pub step: f64,
    pub patch: PatchResolution,
}

impl Default for RateTableSpec {
    fn default() -> Self {
        RateTableSpec {
            d_min: 3.0,
            d_max: 9.0,
            step: 0.05,
            patch: PatchResolution::default(),
        }
    }
}

impl RateTableSpec {
    pub fn separations(&self) -> Result<Vec<f64>> {
        if !(self.d_min > 0.0 && self.d_max > self.d_min && self.step > 0.0) {
            return Err(Error::Config(format!(
                "rate table needs 0 < d_min < d_max and a positive step, got [{}, {}] step {}",
                self.d_min, self.d_max, self.step
            )));
        }
        let count = ((self.d_max - self.d_min) / self.step).round() as usize;
        if count < 3 {
            return Err(Error::Config("rate table needs at least four separations".into()));
        }
        Ok((0..=count)
            .map(|i| self.d_min + (self.d_max - self.d_min) * i as f64 / count as f64)
            .collect())
    }
}

/// Row of a rate table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub separation: f64,
    pub omega0: f64,
    pub omega1: f64,
    pub omega_co: f64,
}

/// Rates sampled on a separation grid and interpolated by splines.
#[derive(Debug, Clone)]
pub struct RateTable {
    pub interaction: InteractionPoint,
    pub rows: Vec<RateRow>,
    omega0: RateSpline,
    omega1: RateSpline,
    omega_co: RateSpline,
}

impl RateTable {
    /// Computes every row; rows are evaluated in parallel on the current
    /// rayon pool but assembled in separation order.
    pub fn build(interaction: InteractionPoint, spec: &RateTableSpec) -> Result<Self> {
        let ds = spec.separations()?;
        let rows: Result<Vec<RateRow>> = ds
            .par_iter()
            .map(|&d| {
                Ok(RateRow {
                    separation: d,
                    omega0: single_particle_rate(d)?,
                    omega1: excited_band_rate(d)?,
                    omega_co: cotunneling_rate(d, interaction.g, &spec.patch)?.value,
                })
            })
            .collect();
        Self::from_rows(interaction, rows?)
    }

    pub fn from_rows(interaction: InteractionPoint, rows: Vec<RateRow>) -> Result<Self> {
        let x: Vec<f64> = rows.iter().map(|r| r.separation).collect();
        let col = |f: fn(&RateRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
        Ok(RateTable {
            interaction,
            omega0: RateSpline::new(x.clone(), col(|r| r.omega0))?,
            omega1: RateSpline::new(x.clone(), col(|r| r.omega1))?,
            omega_co: RateSpline::new(x, col(|r| r.omega_co))?,
            rows,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        self.omega0.domain()
    }

    fn check(&self, d: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        let slack = 1e-9 * (hi - lo);
        if !(d >= lo - slack && d <= hi + slack) {
            return Err(Error::Domain(format!(
                "separation {d} outside the tabulated range [{lo}, {hi}]"
            )));
        }
        Ok(())
    }

    /// Interpolated `(Omega^0, Omega^1, Omega_co)` at separation `d`.
    pub fn at(&self, d: f64) -> Result<RateRow> {
        self.check(d)?;
        Ok(RateRow {
            separation: d,
            omega0: self.omega0.eval(d),
            omega1: self.omega1.eval(d),
            omega_co: self.omega_co.eval(d),
        })
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Serialization(format!("{other:?}")),
        })?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    pub fn read_csv(interaction: InteractionPoint, path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Serialization(format!("{other:?}")),
        })?;
        let rows: std::result::Result<Vec<RateRow>, _> = r.deserialize().collect();
        Self::from_rows(interaction, rows?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_overlap_matches_closed_form() {
        // With S = exp(-d^2/4) the rate is finite and negative.
        let d = 3.0;
        let r = single_particle_rate(d).unwrap();
        assert!(r < 0.0 && r > -0.2);
    }

    #[test]
    fn rejects_coincident_wells() {
        assert!(matches!(single_particle_rate(1e-3), Err(Error::Geometry(_))));
        assert!(matches!(single_particle_rate(-1.0), Err(Error::Geometry(_))));
    }
}
