//! Dense real linear algebra used by the pipeline.
//!
//! nalgebra supplies Hessenberg reduction, Cholesky, QR, LU, SVD and the
//! symmetric eigensolver. The real Schur form, its reordering and the
//! Stein/Sylvester solvers are implemented here.

mod schur;
mod stein;
mod sylvester;

pub use schur::{ordered_schur, real_schur, Block, OrderedSchur, RealSchur};
pub use stein::{solve_stein, stein_factor};
pub use sylvester::{solve_sylvester, solve_sylvester_quasi_triangular};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Thin SVD with singular values in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub v_t: DMatrix<f64>,
}

pub fn svd(m: &DMatrix<f64>) -> Result<Svd> {
    ensure_finite(m, "svd input")?;
    let dec = nalgebra::SVD::try_new(m.clone(), true, true, f64::EPSILON, 0).ok_or(
        Error::NoConvergence {
            routine: "svd",
            size: m.nrows().max(m.ncols()),
        },
    )?;
    Ok(Svd {
        u: dec.u.expect("u requested"),
        singular_values: dec.singular_values,
        v_t: dec.v_t.expect("v_t requested"),
    })
}

/// Row pseudo-inverse of a nonzero vector: `v / (vᵀv)`.
pub fn pinv_row(v: &DVector<f64>) -> Result<DVector<f64>> {
    let nn = v.norm_squared();
    if nn == 0.0 || !nn.is_finite() {
        return Err(Error::InvalidArgument(
            "pseudo-inverse of a zero or non-finite vector".into(),
        ));
    }
    Ok(v / nn)
}

/// Eigenvalues of a square matrix, read off its real Schur form.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    Ok(real_schur(m)?.eigenvalues())
}

pub fn spectral_radius(m: &DMatrix<f64>) -> Result<f64> {
    Ok(eigenvalues(m)?
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max))
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn is_finite(m: &DMatrix<f64>) -> bool {
    m.iter().all(|x| x.is_finite())
}

pub(crate) fn ensure_finite(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} has non-finite entries")))
    }
}

pub(crate) fn ensure_square(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )))
    }
}

/// Symmetric square root with negative eigenvalues clipped to zero.
pub fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let d = eig.eigenvalues.map(|x| x.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose()
}

/// Solves a small dense system, rejecting numerically singular matrices.
pub(crate) fn solve_small(
    m: DMatrix<f64>,
    rhs: &DVector<f64>,
    what: &'static str,
) -> Result<DVector<f64>> {
    let scale = max_abs(&m).max(f64::MIN_POSITIVE);
    let lu = m.lu();
    let u = lu.u();
    let pivot = u.diagonal().iter().fold(f64::INFINITY, |a, x| a.min(x.abs()));
    if pivot <= 1e3 * f64::EPSILON * scale {
        return Err(Error::Singular {
            what,
            condition: scale / pivot.max(f64::MIN_POSITIVE),
        });
    }
    lu.solve(rhs).ok_or(Error::Singular {
        what,
        condition: f64::INFINITY,
    })
}

/// Column-major vectorization.
pub(crate) fn vec_of(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

pub(crate) fn unvec(v: &DVector<f64>, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(rows, cols, v.as_slice())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}
