//! Dense Hermitian eigendecomposition and matrix products, backed by `faer`.

use faer::linalg::solvers::SelfAdjointEigen;
use faer::{Mat, Side};
use ndarray::{Array2, ArrayView2};
use num_complex::Complex64;

use crate::error::{Result, SimError};

fn to_faer(a: ArrayView2<Complex64>) -> Mat<Complex64> {
    let (r, c) = a.dim();
    Mat::from_fn(r, c, |i, j| a[(i, j)])
}

fn from_faer(m: &Mat<Complex64>) -> Array2<Complex64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order together with the matrix whose
/// columns are the corresponding eigenvectors. Only the lower triangle of the
/// input is read, so small Hermiticity noise in the upper triangle is ignored.
pub fn eigh(a: ArrayView2<Complex64>) -> Result<(Vec<f64>, Array2<Complex64>)> {
    let (r, c) = a.dim();
    if r != c {
        return Err(SimError::ShapeMismatch(format!(
            "eigh expects a square matrix, got {r}x{c}"
        )));
    }
    if r == 0 {
        return Ok((Vec::new(), Array2::zeros((0, 0))));
    }
    let m = to_faer(a);
    let evd = SelfAdjointEigen::new(m.as_ref(), Side::Lower)
        .map_err(|e| SimError::EigenFailure(format!("{e:?}")))?;
    let n = r;
    let mut order: Vec<usize> = (0..n).collect();
    let raw: Vec<f64> = (0..n).map(|i| evd.S()[i].re).collect();
    order.sort_by(|&i, &j| raw[i].partial_cmp(&raw[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    let u = evd.U();
    let vectors = Array2::from_shape_fn((n, n), |(i, j)| u[(i, order[j])]);
    Ok((values, vectors))
}

/// Eigenvalues only, ascending.
pub fn eigh_values(a: ArrayView2<Complex64>) -> Result<Vec<f64>> {
    let (r, c) = a.dim();
    if r != c {
        return Err(SimError::ShapeMismatch(format!(
            "eigh expects a square matrix, got {r}x{c}"
        )));
    }
    if r == 0 {
        return Ok(Vec::new());
    }
    let m = to_faer(a);
    let mut values = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| SimError::EigenFailure(format!("{e:?}")))?;
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(values)
}

/// Dense product A · B.
pub fn matmul(a: ArrayView2<Complex64>, b: ArrayView2<Complex64>) -> Array2<Complex64> {
    assert_eq!(a.ncols(), b.nrows(), "matmul dimension mismatch");
    let fa = to_faer(a);
    let fb = to_faer(b);
    from_faer(&(&fa * &fb))
}

/// Product V · diag(d) · V^† for real diagonal d.
pub fn sandwich_diag(v: ArrayView2<Complex64>, d: &[f64]) -> Array2<Complex64> {
    let n = v.nrows();
    assert_eq!(v.ncols(), d.len());
    let mut scaled = v.to_owned();
    for (j, &dj) in d.iter().enumerate() {
        for i in 0..n {
            scaled[(i, j)] *= dj;
        }
    }
    let fs = to_faer(scaled.view());
    let fv = to_faer(v);
    from_faer(&(&fs * fv.adjoint()))
}
