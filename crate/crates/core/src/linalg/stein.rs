//! Discrete Lyapunov (Stein) equation `X - A X Aᵀ = M`.

use nalgebra::DMatrix;

use super::schur::{blocks_of, real_schur};
use super::{ensure_finite, ensure_square, max_abs, solve_small, unvec, vec_of};
use crate::error::{Error, Result};

/// Solves `X - a X aᵀ = m` for symmetric `m` and stable `a` (spectral radius
/// below one). The solution is symmetric.
///
/// Reduces `a` to real Schur form and back-substitutes block by block, so the
/// cost is cubic in the dimension.
pub fn solve_stein(a: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    ensure_square(a, "stein matrix")?;
    ensure_finite(a, "stein matrix")?;
    ensure_finite(m, "stein right-hand side")?;
    let n = a.nrows();
    if m.shape() != (n, n) {
        return Err(Error::InvalidArgument(format!(
            "stein right-hand side is {}x{}, expected {n}x{n}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mscale = max_abs(m);
    if max_abs(&(m - m.transpose())) > 1e-12 * mscale.max(1.0) {
        return Err(Error::InvalidArgument(
            "stein right-hand side is not symmetric".into(),
        ));
    }
    let schur = real_schur(a)?;
    let rho = schur
        .eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if rho >= 1.0 {
        return Err(Error::NotIrredundant { rho, limit: 1.0 });
    }
    let mt = schur.u.transpose() * m * &schur.u;
    let xt = quasi_triangular(&schur.t, &mt)?;
    let x = &schur.u * xt * schur.u.transpose();
    let x = (&x + x.transpose()) * 0.5;

    let residual = max_abs(&(&x - a * &x * a.transpose() - m));
    let bound = 1e-10 * mscale.max(1.0);
    if residual > bound {
        return Err(Error::Residual {
            what: "stein equation",
            residual,
            bound,
        });
    }
    Ok(x)
}

/// Square-root factor of the Stein solution: upper triangular `R` with
/// `RᵀR = X` where `X - a X aᵀ = b bᵀ`.
///
/// Uses the doubling `X₂ₘ = Xₘ + aᵐ Xₘ (aᵐ)ᵀ` on the factor, compressing by
/// QR at every step. Small singular values of a product of two such factors
/// keep their relative accuracy, which the squared Gramians lose.
pub fn stein_factor(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    ensure_square(a, "stein matrix")?;
    ensure_finite(a, "stein matrix")?;
    ensure_finite(b, "stein factor")?;
    let n = a.nrows();
    if b.nrows() != n {
        return Err(Error::InvalidArgument(format!(
            "stein factor has {} rows, expected {n}",
            b.nrows()
        )));
    }
    let rho = super::spectral_radius(a)?;
    if rho >= 1.0 {
        return Err(Error::NotIrredundant { rho, limit: 1.0 });
    }
    let mut r = r_factor(&b.transpose(), n);
    let mut power = a.clone();
    for _ in 0..MAX_DOUBLINGS {
        let tail = &r * power.transpose();
        if tail.norm() <= f64::EPSILON * 1e-2 * r.norm() {
            return Ok(r);
        }
        let mut stacked = DMatrix::zeros(2 * n, n);
        stacked.rows_mut(0, n).copy_from(&r);
        stacked.rows_mut(n, n).copy_from(&tail);
        r = r_factor(&stacked, n);
        power = &power * &power;
        if !super::is_finite(&power) {
            break;
        }
    }
    Err(Error::NoConvergence {
        routine: "factored stein doubling",
        size: n,
    })
}

/// Doublings needed for `ρ^(2^j)` to underflow below roundoff when `ρ` is
/// within about `1e-12` of one.
const MAX_DOUBLINGS: usize = 64;

/// The `n x n` upper triangular factor of `m` (padded with zero rows).
fn r_factor(m: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let r = m.clone().qr().r();
    let mut out = DMatrix::zeros(n, n);
    let rows = r.nrows().min(n);
    out.rows_mut(0, rows).copy_from(&r.rows(0, rows));
    out
}

/// `X - T X Tᵀ = C` with `T` upper quasi-triangular.
fn quasi_triangular(t: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = t.nrows();
    let blocks = blocks_of(t);
    let mut x = DMatrix::<f64>::zeros(n, n);
    for jb in blocks.iter().rev() {
        let (j0, bj) = (jb.start, jb.size);
        let tail = j0 + bj;
        let mut rhs = c.columns(j0, bj).clone_owned();
        if tail < n {
            let w = x.columns(tail, n - tail) * t.view((j0, tail), (bj, n - tail)).transpose();
            rhs += t * w;
        }
        let tjj = t.view((j0, j0), (bj, bj)).clone_owned();
        for ib in blocks.iter().rev() {
            let (i0, bi) = (ib.start, ib.size);
            let itail = i0 + bi;
            let mut r = rhs.rows(i0, bi).clone_owned();
            if itail < n {
                let s = t.view((i0, itail), (bi, n - itail)) * x.view((itail, j0), (n - itail, bj));
                r += s * tjj.transpose();
            }
            let tii = t.view((i0, i0), (bi, bi)).clone_owned();
            let sys = DMatrix::<f64>::identity(bi * bj, bi * bj) - tjj.kronecker(&tii);
            let y = solve_small(sys, &vec_of(&r), "stein block")?;
            x.view_mut((i0, j0), (bi, bj)).copy_from(&unvec(&y, bi, bj));
        }
    }
    Ok(x)
}
