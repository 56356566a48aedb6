//! Uniform two-particle grid.
//!
//! Each coordinate is sampled at `x_i = x_min + i h`, `i = 0..n`, with
//! `h = (x_max - x_min) / (n - 1)`. The grid closes periodically: the point
//! after `x_max` is `x_min`, again at distance `h`. Fields are stored
//! row-major with the first particle coordinate as the row index.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid2D {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::Config(format!(
                "grid bounds must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n < 8 {
            return Err(Error::Config(format!("grid needs at least 8 points, got {n}")));
        }
        Ok(Grid2D { x_min, x_max, n })
    }

    /// Symmetric grid `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    /// Symmetric grid with spacing close to `h`.
    pub fn with_spacing(half_width: f64, h: f64) -> Result<Self> {
        let n = ((2.0 * half_width / h).round() as usize + 1).max(8);
        Self::symmetric(half_width, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    /// Area element.
    pub fn dv(&self) -> f64 {
        let h = self.h();
        h * h
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.h()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    pub fn is_mirror_symmetric(&self) -> bool {
        (self.x_min + self.x_max).abs() <= 1e-12 * (self.x_max - self.x_min)
    }

    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        dot(a, b) * self.dv()
    }

    pub fn inner_c(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>() * self.dv()
    }

    /// Overlap of a complex field with a real one, `<a|b>` with `a` real.
    pub fn inner_rc(&self, a: &[f64], b: &[Complex64]) -> Complex64 {
        a.iter().zip(b).map(|(x, y)| y * *x).sum::<Complex64>() * self.dv()
    }

    pub fn norm(&self, a: &[f64]) -> f64 {
        self.inner(a, a).sqrt()
    }

    pub fn norm_c(&self, a: &[Complex64]) -> f64 {
        (a.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.dv()).sqrt()
    }

    pub fn normalize(&self, a: &mut [f64]) {
        let s = self.norm(a);
        if s > 0.0 {
            a.iter_mut().for_each(|v| *v /= s);
        }
    }

    /// Product state `f(x1) g(x2)` sampled on the grid.
    pub fn outer(&self, f: &[f64], g: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for fi in f {
            out.extend(g.iter().map(|gj| fi * gj));
        }
        out
    }

    /// Field with particle coordinates swapped.
    pub fn transpose<T: Copy + Default>(&self, a: &[T]) -> Vec<T> {
        let n = self.n;
        let mut out = vec![T::default(); n * n];
        transpose_into(a, &mut out, n);
        out
    }

    /// Project onto the exchange-symmetric sector, `(psi + psi^T) / 2`.
    pub fn symmetrize<T>(&self, a: &mut [T])
    where
        T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                let s = (a[i * n + j] + a[j * n + i]) * 0.5;
                a[i * n + j] = s;
                a[j * n + i] = s;
            }
        }
    }

    /// Largest `|psi(x1,x2) - psi(x2,x1)|`, scaled to an L2-like measure.
    pub fn symmetry_violation(&self, a: &[Complex64]) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                acc += (a[i * n + j] - a[j * n + i]).norm_sqr();
            }
        }
        (2.0 * acc * self.dv()).sqrt()
    }

    /// Image under `x -> -x` for both particles (requires a symmetric grid).
    pub fn mirror<T: Copy>(&self, a: &[T]) -> Vec<T> {
        a.iter().rev().copied().collect()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Blocked out-of-place transpose of an `n x n` row-major matrix.
pub(crate) fn transpose_into<T: Copy>(src: &[T], dst: &mut [T], n: usize) {
    const B: usize = 32;
    for ib in (0..n).step_by(B) {
        for jb in (0..n).step_by(B) {
            for i in ib..(ib + B).min(n) {
                for j in jb..(jb + B).min(n) {
                    dst[j * n + i] = src[i * n + j];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_points() {
        let g = Grid2D::symmetric(5.0, 11).unwrap();
        assert!((g.h() - 1.0).abs() < 1e-15);
        assert_eq!(g.x(0), -5.0);
        assert_eq!(g.x(10), 5.0);
        assert!(g.is_mirror_symmetric());
    }

    #[test]
    fn mirror_reverses_both_axes() {
        let g = Grid2D::symmetric(1.0, 8).unwrap();
        let f: Vec<f64> = g.points().map(|x| x + 2.0).collect();
        let one = vec![1.0; 8];
        let a = g.outer(&f, &one);
        let m = g.mirror(&a);
        for i in 0..8 {
            let expected = -g.x(i) + 2.0;
            assert!((m[i * 8 + 3] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetrize_is_projection() {
        let g = Grid2D::symmetric(1.0, 8).unwrap();
        let mut a: Vec<f64> = (0..64).map(|k| (k as f64).sin()).collect();
        g.symmetrize(&mut a);
        let t = g.transpose(&a);
        assert_eq!(a, t);
    }
}
