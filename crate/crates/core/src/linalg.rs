//! Thin dense complex linear-algebra layer over `faer`.
//!
//! Every solver in the crate works with [`CMat`]; the handful of
//! factorizations they need are wrapped here so the rest of the code never
//! touches the backend API directly.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use num_complex::Complex64 as C64;
use thiserror::Error;

pub type CMat = Mat<C64>;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("singular value decomposition did not converge")]
    Svd,
    #[error("eigendecomposition did not converge")]
    Eigen,
    #[error("matrix is singular to working precision")]
    Singular,
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    Mat::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMat {
    Mat::identity(n, n)
}

pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> CMat {
    Mat::from_fn(rows, cols, f)
}

pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    a * b
}

pub fn adjoint(a: &CMat) -> CMat {
    a.adjoint().to_owned()
}

pub fn transpose(a: &CMat) -> CMat {
    a.transpose().to_owned()
}

pub fn scale(a: &CMat, s: C64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

pub fn add(a: &CMat, b: &CMat) -> CMat {
    a + b
}

pub fn sub(a: &CMat, b: &CMat) -> CMat {
    a - b
}

/// Kronecker product `a ⊗ b` with row index `i_a * rows(b) + i_b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = (a.nrows(), a.ncols());
    let (rb, cb) = (b.nrows(), b.ncols());
    Mat::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

pub fn trace(a: &CMat) -> C64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// Frobenius norm.
pub fn norm_fro(a: &CMat) -> f64 {
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += a[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

/// Largest entrywise deviation `max |a - b|`.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and
/// eigenvectors as columns.
pub fn eigh(h: &CMat) -> Result<(Vec<f64>, CMat), LinalgError> {
    let evd = h.self_adjoint_eigen(Side::Lower).map_err(|_| LinalgError::Eigen)?;
    let s = evd.S().column_vector();
    let vals = (0..h.nrows()).map(|i| s[i].re).collect();
    Ok((vals, evd.U().to_owned()))
}

/// Eigenvalues of a general complex matrix.
pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>, LinalgError> {
    m.eigenvalues().map_err(|_| LinalgError::Eigen)
}

/// `exp(-i t h)` for Hermitian `h`, via its eigendecomposition.
pub fn expm_hermitian(h: &CMat, t: f64) -> Result<CMat, LinalgError> {
    let (vals, u) = eigh(h)?;
    let n = h.nrows();
    let phased = Mat::from_fn(n, n, |i, k| u[(i, k)] * C64::from_polar(1.0, -vals[k] * t));
    Ok(&phased * u.adjoint())
}

/// Thin SVD `a = U diag(s) V†` with singular values in descending order.
pub struct ThinSvd {
    pub u: CMat,
    pub s: Vec<f64>,
    pub v: CMat,
}

pub fn thin_svd(a: &CMat) -> Result<ThinSvd, LinalgError> {
    let svd = a.thin_svd().map_err(|_| LinalgError::Svd)?;
    let sv = svd.S().column_vector();
    let s: Vec<f64> = (0..sv.nrows()).map(|i| sv[i].re).collect();
    if s.iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::Svd);
    }
    Ok(ThinSvd { u: svd.U().to_owned(), s, v: svd.V().to_owned() })
}

/// Solve `a x = b` by partial-pivot LU.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat, LinalgError> {
    let lu = a.partial_piv_lu();
    let x = lu.solve(b);
    for j in 0..x.ncols() {
        for i in 0..x.nrows() {
            if !x[(i, j)].re.is_finite() || !x[(i, j)].im.is_finite() {
                return Err(LinalgError::Singular);
            }
        }
    }
    Ok(x)
}

/// Matrix-vector product on plain slices.
pub fn apply(a: &CMat, x: &[C64]) -> Vec<C64> {
    assert_eq!(a.ncols(), x.len());
    let mut out = vec![C64::new(0.0, 0.0); a.nrows()];
    for (j, &xj) in x.iter().enumerate() {
        if xj == C64::new(0.0, 0.0) {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += a[(i, j)] * xj;
        }
    }
    out
}
