//! Sylvester equation `p X - X q + c = 0`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::schur::{blocks_of, eigenvalues_of, real_schur};
use super::{ensure_finite, ensure_square, max_abs, solve_small, unvec, vec_of};
use crate::error::{Error, Result};

const OVERLAP_TOL: f64 = 1e-12;

fn check_overlap(ep: &[Complex64], eq: &[Complex64]) -> Result<()> {
    for &x in ep {
        for &y in eq {
            if (x - y).norm() <= OVERLAP_TOL * x.norm().max(y.norm()).max(1.0) {
                return Err(Error::SpectraOverlap(x));
            }
        }
    }
    Ok(())
}

/// Solves `p X - X q + c = 0` (`p` is k x k, `q` is m x m, `c` is k x m).
pub fn solve_sylvester(p: &DMatrix<f64>, q: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    ensure_square(p, "sylvester left matrix")?;
    ensure_square(q, "sylvester right matrix")?;
    ensure_finite(c, "sylvester constant")?;
    if c.shape() != (p.nrows(), q.nrows()) {
        return Err(Error::InvalidArgument(format!(
            "sylvester constant is {}x{}, expected {}x{}",
            c.nrows(),
            c.ncols(),
            p.nrows(),
            q.nrows()
        )));
    }
    if p.nrows() == 0 || q.nrows() == 0 {
        return Ok(DMatrix::zeros(p.nrows(), q.nrows()));
    }
    let sp = real_schur(p)?;
    let sq = real_schur(q)?;
    let ct = sp.u.transpose() * c * &sq.u;
    let y = solve_sylvester_quasi_triangular(&sp.t, &sq.t, &ct)?;
    let x = &sp.u * y * sq.u.transpose();

    let residual = max_abs(&(p * &x - &x * q + c));
    let bound = 1e-9 * max_abs(c).max(1.0);
    if residual > bound {
        return Err(Error::Residual {
            what: "sylvester equation",
            residual,
            bound,
        });
    }
    Ok(x)
}

/// Solves `p Y - Y q + c = 0` for upper quasi-triangular `p` and `q`.
pub fn solve_sylvester_quasi_triangular(
    p: &DMatrix<f64>,
    q: &DMatrix<f64>,
    c: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    let (k, m) = (p.nrows(), q.nrows());
    check_overlap(&eigenvalues_of(p), &eigenvalues_of(q))?;
    let pb = blocks_of(p);
    let qb = blocks_of(q);
    let f = -c;
    let mut y = DMatrix::<f64>::zeros(k, m);
    for jb in &qb {
        let (j0, bj) = (jb.start, jb.size);
        let qjj = q.view((j0, j0), (bj, bj)).clone_owned();
        for ib in pb.iter().rev() {
            let (i0, bi) = (ib.start, ib.size);
            let itail = i0 + bi;
            let mut r = f.view((i0, j0), (bi, bj)).clone_owned();
            if itail < k {
                r -= p.view((i0, itail), (bi, k - itail)) * y.view((itail, j0), (k - itail, bj));
            }
            if j0 > 0 {
                r += y.view((i0, 0), (bi, j0)) * q.view((0, j0), (j0, bj));
            }
            let pii = p.view((i0, i0), (bi, bi)).clone_owned();
            let sys = DMatrix::<f64>::identity(bj, bj).kronecker(&pii)
                - qjj.transpose().kronecker(&DMatrix::<f64>::identity(bi, bi));
            let v = solve_small(sys, &vec_of(&r), "sylvester block")?;
            y.view_mut((i0, j0), (bi, bj)).copy_from(&unvec(&v, bi, bj));
        }
    }
    Ok(y)
}
