//! Gramians and the singular value automaton (balanced realization).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, max_abs, solve_stein, stein_factor};
use crate::wfa::{minimize, Wfa};

/// Spectral radius margin below which a model counts as irredundant.
pub const IRREDUNDANT_MARGIN: f64 = 1e-12;

/// Smallest accepted eigenvalue ratio of a Gramian before the model is
/// declared numerically non-minimal.
const GRAMIAN_RANK_TOL: f64 = 1e-14;

/// Rank tolerance for the minimization inside [`exact_hankel_norm`].
const HANKEL_NORM_RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Gramians {
    /// `P` with `P - A P Aᵀ = β βᵀ`.
    pub reachability: DMatrix<f64>,
    /// `Q` with `Q - Aᵀ Q A = α αᵀ`.
    pub observability: DMatrix<f64>,
}

fn check_irredundant(w: &Wfa) -> Result<()> {
    let rho = w.spectral_radius()?;
    if rho >= 1.0 - IRREDUNDANT_MARGIN {
        return Err(Error::NotIrredundant {
            rho,
            limit: 1.0 - IRREDUNDANT_MARGIN,
        });
    }
    Ok(())
}

fn gramian_pair(w: &Wfa) -> Result<Gramians> {
    check_irredundant(w)?;
    let a = w.trans();
    let p = solve_stein(a, &(w.beta() * w.beta().transpose()))?;
    let q = solve_stein(&a.transpose(), &(w.alpha() * w.alpha().transpose()))?;
    Ok(Gramians {
        reachability: p,
        observability: q,
    })
}

fn check_definite(m: &DMatrix<f64>, which: &str) -> Result<()> {
    let ev = m.clone().symmetric_eigen().eigenvalues;
    let max = ev.iter().fold(0.0f64, |a, &x| a.max(x));
    let min = ev.iter().fold(f64::INFINITY, |a, &x| a.min(x));
    if max <= 0.0 || min <= GRAMIAN_RANK_TOL * max {
        return Err(Error::NotMinimal(format!(
            "{which} Gramian is numerically singular (eigenvalue ratio {:e})",
            if max > 0.0 { min / max } else { 0.0 }
        )));
    }
    Ok(())
}

/// Reachability and observability Gramians of a minimal irredundant model.
pub fn gramians(w: &Wfa) -> Result<Gramians> {
    let g = gramian_pair(w)?;
    check_definite(&g.reachability, "reachability")?;
    check_definite(&g.observability, "observability")?;
    Ok(g)
}

/// A WFA in singular value form: both Gramians equal `diag(σ)`, with `σ`
/// non-increasing.
#[derive(Debug, Clone)]
pub struct SvaModel {
    wfa: Wfa,
    sigma: Vec<f64>,
}

impl SvaModel {
    #[cfg(test)]
    pub(crate) fn from_parts(wfa: Wfa, sigma: Vec<f64>) -> SvaModel {
        SvaModel { wfa, sigma }
    }

    pub fn wfa(&self) -> &Wfa {
        &self.wfa
    }

    pub fn into_wfa(self) -> Wfa {
        self.wfa
    }

    /// Hankel singular numbers `σ_0 ≥ σ_1 ≥ … > 0`.
    pub fn singular_numbers(&self) -> &[f64] {
        &self.sigma
    }

    pub fn states(&self) -> usize {
        self.sigma.len()
    }

    /// Treats `w` as already balanced, keeping its coordinates.
    ///
    /// The singular numbers are read from the Gramian diagonals. Fails if the
    /// Gramians deviate from a common non-increasing diagonal by more than
    /// `tol` relative to the largest entry.
    pub fn assume_balanced(w: &Wfa, tol: f64) -> Result<SvaModel> {
        let g = gramians(w)?;
        let n = w.states();
        let p = &g.reachability;
        let q = &g.observability;
        let sigma: Vec<f64> = (0..n).map(|i| (p[(i, i)] * q[(i, i)]).sqrt()).collect();
        let scale = sigma.iter().fold(0.0f64, |a, &x| a.max(x));
        let target = DMatrix::from_diagonal(&DVector::from_column_slice(&sigma));
        let dev = max_abs(&(p - &target)).max(max_abs(&(q - &target))) / scale;
        if dev > tol {
            return Err(Error::InvalidArgument(format!(
                "model is not in singular value form: Gramian deviation {dev:e} exceeds {tol:e}"
            )));
        }
        if sigma.windows(2).any(|s| s[1] > s[0] * (1.0 + tol)) {
            return Err(Error::InvalidArgument(
                "singular numbers are not in non-increasing order".into(),
            ));
        }
        Ok(SvaModel {
            wfa: w.clone(),
            sigma,
        })
    }

    /// Largest deviation of either Gramian from `diag(σ)`, relative to `σ_0`.
    pub fn gramian_residual(&self) -> Result<f64> {
        let g = gramian_pair(&self.wfa)?;
        let target = DMatrix::from_diagonal(&DVector::from_column_slice(&self.sigma));
        let dev = max_abs(&(&g.reachability - &target)).max(max_abs(&(&g.observability - &target)));
        Ok(dev / self.sigma[0])
    }
}

/// Upper triangular `(R_p, R_q)` with `P = R_pᵀ R_p` and `Q = R_qᵀ R_q`.
pub fn gramian_factors(w: &Wfa) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_irredundant(w)?;
    let n = w.states();
    let b = DMatrix::from_column_slice(n, 1, w.beta().as_slice());
    let a = DMatrix::from_column_slice(n, 1, w.alpha().as_slice());
    Ok((stein_factor(w.trans(), &b)?, stein_factor(&w.trans().transpose(), &a)?))
}

/// Balances a minimal irredundant WFA into singular value form.
///
/// With Gramian factors `P = L Lᵀ`, `Q = M Mᵀ` and `Mᵀ L = U D Vᵀ`, the
/// change of basis is `S = L V D^{-1/2}`. Coordinates are then
/// sign-normalized so that `β ≥ 0`.
pub fn to_sva(w: &Wfa) -> Result<SvaModel> {
    gramians(w)?;
    let first = balance(w)?;
    // a second pass has an almost orthogonal change of basis, so it removes
    // the imbalance left by the first without adding much of its own
    let second = balance(&first.wfa)?;
    Ok(second)
}

fn balance(w: &Wfa) -> Result<SvaModel> {
    let n = w.states();
    let (rp, rq) = gramian_factors(w)?;
    let l = rp.transpose();
    let m = rq.transpose();
    let dec = linalg::svd(&(m.transpose() * &l))?;
    let d = &dec.singular_values;
    if d[n - 1] <= 0.0 {
        return Err(Error::NotMinimal("zero Hankel singular number".into()));
    }
    let dinv_sqrt = DMatrix::from_diagonal(&d.map(|x| 1.0 / x.sqrt()));
    let s = &l * dec.v_t.transpose() * &dinv_sqrt;
    let s_inv = &dinv_sqrt * dec.u.transpose() * m.transpose();
    let mut bal = w.transform(&s, &s_inv)?;

    let flips: Vec<f64> = bal.beta().iter().map(|&b| if b < 0.0 { -1.0 } else { 1.0 }).collect();
    if flips.iter().any(|&f| f < 0.0) {
        let f = DMatrix::from_diagonal(&DVector::from_column_slice(&flips));
        bal = bal.transform(&f, &f)?;
    }
    Ok(SvaModel {
        wfa: bal,
        sigma: d.iter().copied().collect(),
    })
}

/// Hankel singular values of any irredundant realization, descending.
///
/// These are the singular values of `R_q R_pᵀ`, which does not need
/// the realization to be minimal; surplus values are (numerically) zero.
pub fn hankel_singular_values(w: &Wfa) -> Result<Vec<f64>> {
    if w.is_zero() {
        return Ok(vec![0.0; w.states()]);
    }
    let (rp, rq) = gramian_factors(w)?;
    Ok(linalg::svd(&(rq * rp.transpose()))?.singular_values.iter().copied().collect())
}

/// Exact Hankel (spectral) norm of the function computed by `w`.
///
/// The model is minimized first so that exactly cancelling parts (such as
/// `f - f`) contribute nothing.
pub fn exact_hankel_norm(w: &Wfa) -> Result<f64> {
    check_irredundant(w)?;
    let min = minimize(w, HANKEL_NORM_RANK_TOL)?.wfa;
    Ok(hankel_singular_values(&min)?.first().copied().unwrap_or(0.0))
}
