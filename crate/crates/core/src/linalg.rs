//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigen-decomposition of a real symmetric matrix with ascending eigenvalues.
///
/// Column `k` of the returned matrix is the eigenvector for `values[k]`.
pub fn sorted_eigh(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite matrix entry in eigensolve".into()));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Inverse square root of a symmetric positive-definite matrix.
pub fn inv_sqrt_spd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (vals, vecs) = sorted_eigh(m)?;
    if vals.first().copied().unwrap_or(0.0) <= 1e-300 {
        return Err(Error::Numerical("matrix is not positive definite".into()));
    }
    let d = DVector::from_iterator(vals.len(), vals.iter().map(|v| 1.0 / v.sqrt()));
    Ok(&vecs * DMatrix::from_diagonal(&d) * vecs.transpose())
}

/// Löwdin orthonormalisation of the columns of `m`, `m (m^T m)^{-1/2}`.
///
/// For a square `m` this is the orthogonal factor of its polar decomposition,
/// i.e. the orthogonal matrix closest to `m`.
pub fn lowdin(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let s = m.transpose() * m;
    Ok(m * inv_sqrt_spd(&s)?)
}

/// Propagator `exp(-i H dt)` of a real symmetric `H` applied to a complex state.
pub fn apply_unitary_step(
    values: &[f64],
    vectors: &DMatrix<f64>,
    dt: f64,
    re: &mut [f64],
    im: &mut [f64],
) {
    let n = values.len();
    let mut cr = vec![0.0; n];
    let mut ci = vec![0.0; n];
    for k in 0..n {
        let col = vectors.column(k);
        let mut a = 0.0;
        let mut b = 0.0;
        for r in 0..n {
            a += col[r] * re[r];
            b += col[r] * im[r];
        }
        let (s, c) = (values[k] * dt).sin_cos();
        cr[k] = a * c + b * s;
        ci[k] = b * c - a * s;
    }
    for r in 0..n {
        let mut a = 0.0;
        let mut b = 0.0;
        for k in 0..n {
            a += vectors[(r, k)] * cr[k];
            b += vectors[(r, k)] * ci[k];
        }
        re[r] = a;
        im[r] = b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_order() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (v, _) = sorted_eigh(&m).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn lowdin_gives_orthogonal_columns() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 0.2, 0.1, 1.0, 0.0, 0.3]);
        let q = lowdin(&m).unwrap();
        let e = q.transpose() * &q - DMatrix::identity(2, 2);
        assert!(e.norm() < 1e-12);
    }
}
