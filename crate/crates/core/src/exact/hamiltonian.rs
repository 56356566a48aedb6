//! Finite-difference two-body Hamiltonian.
//!
//! `H = -1/2 (d1^2 + d2^2) + V(x1) + V(x2) + g delta(x1 - x2)`, discretised
//! with the periodic five-point Laplacian. The contact term becomes the
//! diagonal potential `g / h` on the grid points with `x1 = x2`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid2D;
use crate::trap::TrapLayout;

use super::eigen::SymmetricOperator;

#[derive(Debug, Clone)]
pub struct TwoBodyHamiltonian {
    grid: Grid2D,
    potential: Vec<f64>,
    g: f64,
}

impl TwoBodyHamiltonian {
    /// Hamiltonian with single-particle potential sampled at the grid points.
    pub fn new(grid: Grid2D, potential: Vec<f64>, g: f64) -> Result<Self> {
        if potential.len() != grid.n() {
            return Err(Error::Contract(format!(
                "potential has {} samples, grid has {} points per axis",
                potential.len(),
                grid.n()
            )));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::Domain(format!("invalid interaction strength {g}")));
        }
        Ok(TwoBodyHamiltonian { grid, potential, g })
    }

    pub fn for_layout(grid: Grid2D, layout: &TrapLayout, g: f64) -> Result<Self> {
        let potential = grid.points().map(|x| layout.potential(x)).collect();
        Self::new(grid, potential, g)
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Diagonal contact potential on the `x1 = x2` line.
    pub fn contact(&self) -> f64 {
        self.g / self.grid.h()
    }

    /// Applies `H` to `psi`, writing into `out`.
    pub fn apply_into<T>(&self, psi: &[T], out: &mut [T])
    where
        T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    {
        self.stencil(psi, out, 1.0, 0.0, false);
    }

    /// Chebyshev recurrence kernel: `y <- s H x + r x - y`.
    pub fn apply_recurrence<T>(&self, x: &[T], y: &mut [T], s: f64, r: f64)
    where
        T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    {
        self.stencil(x, y, s, r, true);
    }

    /// `y <- s H x + r x` (minus the old `y` when `subtract` is set).
    fn stencil<T>(&self, x: &[T], y: &mut [T], s: f64, r: f64, subtract: bool)
    where
        T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    {
        let n = self.grid.n();
        assert!(x.len() == n * n && y.len() == n * n);
        let h = self.grid.h();
        let kin = 0.5 / (h * h);
        let c = kin * s;
        let base = 4.0 * kin;
        let contact = s * self.contact();
        let v = &self.potential[..n];
        for i in 0..n {
            let up = if i == 0 { n - 1 } else { i - 1 };
            let dn = if i + 1 == n { 0 } else { i + 1 };
            let xu = &x[up * n..up * n + n];
            let xd = &x[dn * n..dn * n + n];
            let xc = &x[i * n..i * n + n];
            let yr = &mut y[i * n..i * n + n];
            let vi = v[i];
            // Pairwise sums keep the result bitwise exchange-symmetric.
            let value = |j: usize, l: usize, rr: usize| {
                let d = s * (base + (vi + v[j])) + r;
                xc[j] * d - ((xu[j] + xd[j]) + (xc[l] + xc[rr])) * c
            };
            let first = value(0, n - 1, 1);
            let last = value(n - 1, n - 2, 0);
            if subtract {
                yr[0] = first - yr[0];
                yr[n - 1] = last - yr[n - 1];
                for j in 1..n - 1 {
                    yr[j] = value(j, j - 1, j + 1) - yr[j];
                }
            } else {
                yr[0] = first;
                yr[n - 1] = last;
                for j in 1..n - 1 {
                    yr[j] = value(j, j - 1, j + 1);
                }
            }
            yr[i] = yr[i] + xc[i] * contact;
        }
    }

    /// `<psi|H|psi>` for a real field.
    pub fn expectation(&self, psi: &[f64]) -> f64 {
        let mut tmp = vec![0.0; psi.len()];
        self.apply_into(psi, &mut tmp);
        self.grid.inner(psi, &tmp) / self.grid.inner(psi, psi)
    }

    /// `<psi|H|psi> / <psi|psi>` for a complex field.
    pub fn expectation_c(&self, psi: &[Complex64]) -> f64 {
        let mut tmp = vec![Complex64::new(0.0, 0.0); psi.len()];
        self.apply_into(psi, &mut tmp);
        self.grid.inner_c(psi, &tmp).re / self.grid.inner_c(psi, psi).re
    }

    /// Upper bound on the spectrum: kinetic maximum plus potential maxima.
    pub fn spectral_upper_bound(&self) -> f64 {
        let h = self.grid.h();
        let vmax = self.potential.iter().copied().fold(f64::MIN, f64::max);
        let vmin = self.potential.iter().copied().fold(f64::MAX, f64::min);
        4.0 / (h * h) + 2.0 * vmax + self.contact() - 2.0 * vmin.min(0.0)
    }

    /// Lower bound: twice the potential minimum.
    pub fn spectral_lower_bound(&self) -> f64 {
        2.0 * self.potential.iter().copied().fold(f64::MAX, f64::min)
    }
}

impl SymmetricOperator for TwoBodyHamiltonian {
    fn dim(&self) -> usize {
        self.grid.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.apply_into(x, y);
    }

    fn upper_bound(&self) -> f64 {
        self.spectral_upper_bound()
    }

    fn project(&self, x: &mut [f64]) {
        self.grid.symmetrize(x);
    }

    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.grid.inner(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_is_symmetric() {
        let grid = Grid2D::symmetric(3.0, 12).unwrap();
        let layout = TrapLayout::from_separations(1.0, 1.5);
        let h = TwoBodyHamiltonian::for_layout(grid, &layout, 2.0).unwrap();
        let a: Vec<f64> = (0..144).map(|k| ((k * 7 % 13) as f64).cos()).collect();
        let b: Vec<f64> = (0..144).map(|k| ((k * 5 % 11) as f64).sin()).collect();
        let mut ha = vec![0.0; 144];
        let mut hb = vec![0.0; 144];
        h.apply_into(&a, &mut ha);
        h.apply_into(&b, &mut hb);
        let l = grid.inner(&b, &ha);
        let r = grid.inner(&a, &hb);
        assert!((l - r).abs() < 1e-10 * l.abs().max(1.0));
    }
}
