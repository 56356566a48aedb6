//! Chebyshev-filtered subspace iteration for the lowest eigenpairs of a large
//! sparse symmetric operator.
//!
//! Each outer iteration performs a Rayleigh-Ritz step on the current block,
//! then damps the unwanted part of the spectrum with a Chebyshev polynomial
//! on `[theta_max, upper_bound]` and re-orthonormalises. A previous solution
//! can be supplied as a warm start, which makes sweeps over nearby
//! Hamiltonians cheap.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::dot;
use crate::linalg::sorted_eigh;

/// Real symmetric operator accessible through matrix-vector products.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// Any upper bound on the spectrum.
    fn upper_bound(&self) -> f64;
    /// Projection onto the sector of interest (identity by default).
    fn project(&self, _x: &mut [f64]) {}
    /// Inner product used to normalise returned vectors.
    fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        dot(a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSettings {
    /// Number of wanted eigenpairs.
    pub count: usize,
    /// Block size (`>= count`; a few extra vectors speed up convergence).
    pub block: usize,
    /// Chebyshev polynomial degree per outer iteration.
    pub degree: usize,
    /// Absolute residual tolerance `|H v - lambda v|` for unit `v`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Seed for random fill vectors.
    pub seed: u64,
}

impl Default for EigenSettings {
    fn default() -> Self {
        EigenSettings {
            count: 1,
            block: 4,
            degree: 40,
            tolerance: 1e-9,
            max_iterations: 500,
            seed: 0x5eed,
        }
    }
}

impl EigenSettings {
    pub fn for_count(count: usize) -> Self {
        EigenSettings {
            count,
            block: count + count.div_ceil(2).max(4),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Eigenvectors, normalised in the operator's inner product.
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub matvecs: usize,
}

/// Lowest `settings.count` eigenpairs of `op`.
pub fn lowest_eigenpairs<O: SymmetricOperator + ?Sized>(
    op: &O,
    settings: &EigenSettings,
    warm: Option<&[Vec<f64>]>,
) -> Result<EigenResult> {
    let n = op.dim();
    let k = settings.count;
    let m = settings.block.max(k).min(n);
    if k == 0 || k > n {
        return Err(Error::Contract(format!("cannot compute {k} eigenpairs of a {n}-dimensional operator")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut x: Vec<Vec<f64>> = Vec::with_capacity(m);
    if let Some(w) = warm {
        for v in w.iter().take(m) {
            if v.len() != n {
                return Err(Error::Contract(format!(
                    "warm-start vector has length {}, expected {n}",
                    v.len()
                )));
            }
            x.push(v.clone());
        }
    }
    while x.len() < m {
        x.push((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
    }
    for v in x.iter_mut() {
        op.project(v);
    }
    orthonormalize(&mut x, op, &mut rng);

    let upper = op.upper_bound();
    let mut hx: Vec<Vec<f64>> = vec![vec![0.0; n]; m];
    let mut tmp = vec![0.0; n];
    let mut matvecs = 0usize;
    let mut worst = f64::INFINITY;
    for iter in 1..=settings.max_iterations {
        for (xi, hi) in x.iter().zip(hx.iter_mut()) {
            op.apply(xi, hi);
        }
        matvecs += m;
        let g = DMatrix::from_fn(m, m, |a, b| dot(&x[a], &hx[b]));
        let (theta, w) = sorted_eigh(&g)?;
        x = combine(&x, &w);
        hx = combine(&hx, &w);
        let residuals: Vec<f64> = (0..k)
            .map(|i| {
                let r2: f64 = x[i]
                    .iter()
                    .zip(&hx[i])
                    .map(|(a, b)| {
                        let d = b - theta[i] * a;
                        d * d
                    })
                    .sum();
                r2.sqrt()
            })
            .collect();
        worst = residuals.iter().copied().fold(0.0, f64::max);
        if !worst.is_finite() {
            return Err(Error::Numerical("eigensolver produced non-finite residuals".into()));
        }
        if worst < settings.tolerance {
            let mut vectors: Vec<Vec<f64>> = x.into_iter().take(k).collect();
            for v in vectors.iter_mut() {
                let s = op.inner(v, v).sqrt();
                v.iter_mut().for_each(|a| *a /= s);
            }
            return Ok(EigenResult {
                values: theta[..k].to_vec(),
                vectors,
                residuals,
                iterations: iter,
                matvecs,
            });
        }
        let lo = theta[0];
        let a = theta[m - 1];
        if upper <= a {
            return Err(Error::Numerical(format!(
                "operator upper bound {upper} is below the Ritz value {a}"
            )));
        }
        for v in x.iter_mut() {
            chebyshev_filter(op, v, &mut tmp, settings.degree, lo, a, upper);
            op.project(v);
        }
        matvecs += m * settings.degree;
        orthonormalize(&mut x, op, &mut rng);
    }
    Err(Error::NonConvergence {
        method: "chebyshev subspace iteration",
        iterations: settings.max_iterations,
        residual: worst,
        tolerance: settings.tolerance,
    })
}

/// Columns of `x` recombined: `out_b = sum_a x_a w[a, b]`.
fn combine(x: &[Vec<f64>], w: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let n = x[0].len();
    let m = x.len();
    (0..w.ncols())
        .map(|b| {
            let mut out = vec![0.0; n];
            for a in 0..m {
                let c = w[(a, b)];
                if c != 0.0 {
                    for (o, v) in out.iter_mut().zip(&x[a]) {
                        *o += c * v;
                    }
                }
            }
            out
        })
        .collect()
}

/// Scaled Chebyshev filter damping `[a, b]` relative to the lower end `lo`.
fn chebyshev_filter<O: SymmetricOperator + ?Sized>(
    op: &O,
    x: &mut Vec<f64>,
    tmp: &mut [f64],
    degree: usize,
    lo: f64,
    a: f64,
    b: f64,
) {
    let e = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    let mut sigma = e / (lo - c);
    let tau = 2.0 / sigma;
    let mut prev = std::mem::take(x);
    op.apply(&prev, tmp);
    let s1 = sigma / e;
    let mut cur: Vec<f64> = tmp.iter().zip(&prev).map(|(h, v)| (h - c * v) * s1).collect();
    for _ in 1..degree {
        let sigma_new = 1.0 / (tau - sigma);
        op.apply(&cur, tmp);
        let f = 2.0 * sigma_new / e;
        let g = sigma * sigma_new;
        for ((p, h), v) in prev.iter_mut().zip(tmp.iter()).zip(cur.iter()) {
            *p = (h - c * v) * f - g * *p;
        }
        std::mem::swap(&mut prev, &mut cur);
        sigma = sigma_new;
    }
    *x = cur;
}

/// Modified Gram-Schmidt, done twice; dependent vectors are replaced.
fn orthonormalize<O: SymmetricOperator + ?Sized>(x: &mut [Vec<f64>], op: &O, rng: &mut ChaCha8Rng) {
    for i in 0..x.len() {
        let mut attempts = 0;
        loop {
            let before = dot(&x[i], &x[i]).sqrt();
            for _ in 0..2 {
                for j in 0..i {
                    let (head, tail) = x.split_at_mut(i);
                    let p = dot(&head[j], &tail[0]);
                    for (t, h) in tail[0].iter_mut().zip(&head[j]) {
                        *t -= p * h;
                    }
                }
            }
            let after = dot(&x[i], &x[i]).sqrt();
            if after > 1e-10 * before && after > 0.0 && after.is_finite() {
                x[i].iter_mut().for_each(|v| *v /= after);
                break;
            }
            attempts += 1;
            let n = x[i].len();
            x[i] = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            op.project(&mut x[i]);
            if attempts > 8 {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Diag(Vec<f64>);

    impl SymmetricOperator for Diag {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for i in 0..x.len() {
                y[i] = self.0[i] * x[i];
            }
        }
        fn upper_bound(&self) -> f64 {
            self.0.iter().copied().fold(0.0, f64::max)
        }
    }

    #[test]
    fn finds_lowest_of_diagonal() {
        let d: Vec<f64> = (0..300).map(|i| ((i * 37) % 300) as f64 * 0.1).collect();
        let op = Diag(d);
        let s = EigenSettings::for_count(5);
        let r = lowest_eigenpairs(&op, &s, None).unwrap();
        for (i, v) in r.values.iter().enumerate() {
            assert!((v - 0.1 * i as f64).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn reports_nonconvergence() {
        let d: Vec<f64> = (0..300).map(|i| i as f64 * 1e-3).collect();
        let op = Diag(d);
        let s = EigenSettings {
            max_iterations: 2,
            degree: 2,
            tolerance: 1e-14,
            ..EigenSettings::for_count(3)
        };
        assert!(matches!(
            lowest_eigenpairs(&op, &s, None),
            Err(Error::NonConvergence { .. })
        ));
    }
}
