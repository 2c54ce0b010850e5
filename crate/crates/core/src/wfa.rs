//! One-letter weighted finite automata.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;

/// A one-letter WFA `(α, A, β)` computing `f(t) = αᵀ Aᵗ β`.
#[derive(Debug, Clone, PartialEq)]
pub struct Wfa {
    alpha: DVector<f64>,
    trans: DMatrix<f64>,
    beta: DVector<f64>,
}

impl Wfa {
    pub fn new(alpha: DVector<f64>, trans: DMatrix<f64>, beta: DVector<f64>) -> Result<Self> {
        let n = alpha.len();
        if n == 0 {
            return Err(Error::InvalidModel("automaton has no states".into()));
        }
        if trans.shape() != (n, n) {
            return Err(Error::InvalidModel(format!(
                "transition matrix is {}x{} but initial vector has {n} entries",
                trans.nrows(),
                trans.ncols()
            )));
        }
        if beta.len() != n {
            return Err(Error::InvalidModel(format!(
                "final vector has {} entries, expected {n}",
                beta.len()
            )));
        }
        let finite = alpha.iter().chain(trans.iter()).chain(beta.iter()).all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidModel("non-finite weight".into()));
        }
        Ok(Wfa { alpha, trans, beta })
    }

    /// Builds a WFA from plain slices; `rows` is the transition matrix row by row.
    pub fn from_rows(alpha: &[f64], rows: &[Vec<f64>], beta: &[f64]) -> Result<Self> {
        let n = alpha.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidModel(format!(
                "transition matrix must be {n}x{n}"
            )));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Wfa::new(
            DVector::from_column_slice(alpha),
            DMatrix::from_row_slice(n, n, &flat),
            DVector::from_column_slice(beta),
        )
    }

    /// The one-state automaton computing the zero function.
    pub fn zero() -> Self {
        Wfa {
            alpha: DVector::zeros(1),
            trans: DMatrix::zeros(1, 1),
            beta: DVector::zeros(1),
        }
    }

    pub fn states(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    pub fn trans(&self) -> &DMatrix<f64> {
        &self.trans
    }

    pub fn beta(&self) -> &DVector<f64> {
        &self.beta
    }

    pub fn into_parts(self) -> (DVector<f64>, DMatrix<f64>, DVector<f64>) {
        (self.alpha, self.trans, self.beta)
    }

    /// `f(t) = αᵀ Aᵗ β`, by repeated matrix-vector products.
    pub fn evaluate(&self, t: usize) -> f64 {
        let mut v = self.beta.clone();
        for _ in 0..t {
            v = &self.trans * v;
        }
        self.alpha.dot(&v)
    }

    /// `f(0), …, f(count - 1)`.
    pub fn values(&self, count: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(count);
        let mut v = self.beta.clone();
        for _ in 0..count {
            out.push(self.alpha.dot(&v));
            v = &self.trans * v;
        }
        out
    }

    /// Change of basis: `(sᵀα, s⁻¹As, s⁻¹β)` given `s` and its inverse.
    pub fn transform(&self, s: &DMatrix<f64>, s_inv: &DMatrix<f64>) -> Result<Wfa> {
        Wfa::new(
            s.tr_mul(&self.alpha),
            s_inv * &self.trans * s,
            s_inv * &self.beta,
        )
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        linalg::spectral_radius(&self.trans)
    }

    /// Spectral radius below `1 - margin`.
    pub fn is_irredundant(&self, margin: f64) -> Result<bool> {
        Ok(self.spectral_radius()? < 1.0 - margin)
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.iter().all(|&x| x == 0.0) || self.beta.iter().all(|&x| x == 0.0)
    }
}

/// The automaton `a - b` on the direct sum of the state spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceWfa {
    wfa: Wfa,
    split: usize,
}

impl DifferenceWfa {
    pub fn wfa(&self) -> &Wfa {
        &self.wfa
    }

    pub fn into_wfa(self) -> Wfa {
        self.wfa
    }

    /// Number of states contributed by the left operand.
    pub fn split(&self) -> usize {
        self.split
    }
}

pub fn difference(a: &Wfa, b: &Wfa) -> DifferenceWfa {
    let (n, m) = (a.states(), b.states());
    let mut alpha = DVector::zeros(n + m);
    alpha.rows_mut(0, n).copy_from(&a.alpha);
    alpha.rows_mut(n, m).copy_from(&(-&b.alpha));
    let mut beta = DVector::zeros(n + m);
    beta.rows_mut(0, n).copy_from(&a.beta);
    beta.rows_mut(n, m).copy_from(&b.beta);
    let mut trans = DMatrix::zeros(n + m, n + m);
    trans.view_mut((0, 0), (n, n)).copy_from(&a.trans);
    trans.view_mut((n, n), (m, m)).copy_from(&b.trans);
    DifferenceWfa {
        wfa: Wfa { alpha, trans, beta },
        split: n,
    }
}

/// A rank decision that fell close to the cut-off.
#[derive(Debug, Clone, PartialEq)]
pub struct RankWarning {
    pub pass: &'static str,
    pub index: usize,
    pub ratio: f64,
    pub tol: f64,
}

impl std::fmt::Display for RankWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} rank decision at direction {} is ambiguous: ratio {:e} vs tolerance {:e}",
            self.pass, self.index, self.ratio, self.tol
        )
    }
}

#[derive(Debug, Clone)]
pub struct Minimized {
    pub wfa: Wfa,
    pub reachable_rank: usize,
    pub observable_rank: usize,
    pub warnings: Vec<RankWarning>,
}

/// Orthonormal basis of the Krylov space `span{v, Mv, M²v, …}`.
///
/// Each new direction is orthogonalized twice against the current basis; the
/// space is declared invariant once the new component falls below
/// `tol · ‖M‖_F`.
fn krylov_basis(
    m: &DMatrix<f64>,
    v: &DVector<f64>,
    tol: f64,
    pass: &'static str,
    warnings: &mut Vec<RankWarning>,
) -> DMatrix<f64> {
    let n = m.nrows();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let vn = v.norm();
    if vn == 0.0 {
        return DMatrix::zeros(n, 0);
    }
    let mscale = m.norm().max(f64::MIN_POSITIVE);
    basis.push(v / vn);
    while basis.len() < n {
        let mut w = m * basis.last().expect("nonempty");
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let ratio = w.norm() / mscale;
        if ratio > tol / 10.0 && ratio < tol * 10.0 {
            warnings.push(RankWarning {
                pass,
                index: basis.len(),
                ratio,
                tol,
            });
        }
        if ratio <= tol {
            break;
        }
        let wn = w.norm();
        basis.push(w / wn);
    }
    DMatrix::from_columns(&basis)
}

fn restrict(w: &Wfa, q: &DMatrix<f64>) -> Wfa {
    Wfa {
        alpha: q.tr_mul(&w.alpha),
        trans: q.transpose() * &w.trans * q,
        beta: q.tr_mul(&w.beta),
    }
}

/// Restricts `w` to its reachable and then its observable subspace.
///
/// The result computes the same function up to the rank tolerance. A function
/// that is identically zero yields [`Wfa::zero`].
pub fn minimize(w: &Wfa, tol: f64) -> Result<Minimized> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "rank tolerance must lie in (0, 1), got {tol}"
        )));
    }
    let mut warnings = Vec::new();
    let reach = krylov_basis(&w.trans, &w.beta, tol, "reachability", &mut warnings);
    let reachable_rank = reach.ncols();
    if reachable_rank == 0 {
        return Ok(Minimized {
            wfa: Wfa::zero(),
            reachable_rank,
            observable_rank: 0,
            warnings,
        });
    }
    let r = restrict(w, &reach);
    let obs = krylov_basis(&r.trans.transpose(), &r.alpha, tol, "observability", &mut warnings);
    let observable_rank = obs.ncols();
    if observable_rank == 0 {
        return Ok(Minimized {
            wfa: Wfa::zero(),
            reachable_rank,
            observable_rank,
            warnings,
        });
    }
    Ok(Minimized {
        wfa: restrict(&r, &obs),
        reachable_rank,
        observable_rank,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state_cycle() -> Wfa {
        let h = 3f64.sqrt() / 2.0;
        Wfa::from_rows(&[h, 0.0], &[vec![0.0, 0.5], vec![0.5, 0.0]], &[h, 0.0]).unwrap()
    }

    #[test]
    fn example_values() {
        let w = two_state_cycle();
        for t in 0..12 {
            let expected = if t % 2 == 0 { 0.75 * 0.5f64.powi(t as i32) } else { 0.0 };
            assert!((w.evaluate(t) - expected).abs() < 1e-15);
        }
        assert_eq!(w.values(5).len(), 5);
        assert!((w.values(5)[4] - w.evaluate(4)).abs() == 0.0);
    }

    #[test]
    fn constructor_validates() {
        assert!(Wfa::from_rows(&[1.0], &[vec![0.5, 0.0]], &[1.0]).is_err());
        assert!(Wfa::from_rows(&[1.0, 2.0], &[vec![0.5, 0.0], vec![0.0, 0.1]], &[1.0]).is_err());
        assert!(Wfa::from_rows(&[], &[], &[]).is_err());
        assert!(Wfa::from_rows(&[f64::NAN], &[vec![0.5]], &[1.0]).is_err());
    }

    #[test]
    fn difference_of_self_vanishes() {
        let w = two_state_cycle();
        let d = difference(&w, &w);
        assert_eq!(d.wfa().states(), 4);
        assert_eq!(d.split(), 2);
        for t in 0..10 {
            assert!(d.wfa().evaluate(t).abs() < 1e-15);
        }
    }

    #[test]
    fn difference_subtracts() {
        let a = two_state_cycle();
        let b = Wfa::from_rows(&[1.0], &[vec![0.3]], &[2.0]).unwrap();
        let d = difference(&a, &b);
        for t in 0..10 {
            assert!((d.wfa().evaluate(t) - (a.evaluate(t) - b.evaluate(t))).abs() < 1e-14);
        }
    }

    #[test]
    fn minimize_drops_unreachable_state() {
        // state 2 is unreachable from β
        let w = Wfa::from_rows(
            &[1.0, 1.0, 1.0],
            &[vec![0.5, 0.0, 0.0], vec![0.0, 0.2, 0.0], vec![0.0, 0.0, 0.3]],
            &[1.0, 1.0, 0.0],
        )
        .unwrap();
        let m = minimize(&w, 1e-9).unwrap();
        assert_eq!(m.wfa.states(), 2);
        assert_eq!(m.reachable_rank, 2);
        for t in 0..20 {
            assert!((m.wfa.evaluate(t) - w.evaluate(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn minimize_drops_unobservable_state() {
        let w = Wfa::from_rows(
            &[1.0, 0.0],
            &[vec![0.4, 0.0], vec![0.0, -0.7]],
            &[1.0, 1.0],
        )
        .unwrap();
        let m = minimize(&w, 1e-9).unwrap();
        assert_eq!(m.wfa.states(), 1);
        assert_eq!(m.observable_rank, 1);
    }

    #[test]
    fn minimize_keeps_minimal_model() {
        let m = minimize(&two_state_cycle(), 1e-9).unwrap();
        assert_eq!(m.wfa.states(), 2);
        assert!(m.warnings.is_empty());
    }

    #[test]
    fn minimize_zero_function() {
        let w = Wfa::from_rows(&[1.0, 2.0], &[vec![0.1, 0.2], vec![0.3, 0.4]], &[0.0, 0.0]).unwrap();
        let m = minimize(&w, 1e-9).unwrap();
        assert_eq!(m.wfa, Wfa::zero());
        assert!(minimize(&w, 0.0).is_err());
    }

    #[test]
    fn minimize_warns_near_cut() {
        // the second direction has relative size about 1e-9
        let w = Wfa::from_rows(&[1.0, 1.0], &[vec![0.5, 0.0], vec![0.0, 0.5 + 2e-9]], &[1.0, 1.0]).unwrap();
        let m = minimize(&w, 1e-9).unwrap();
        assert!(!m.warnings.is_empty());
    }

    #[test]
    fn spectral_radius_and_irredundance() {
        let w = two_state_cycle();
        assert!((w.spectral_radius().unwrap() - 0.5).abs() < 1e-15);
        assert!(w.is_irredundant(1e-12).unwrap());
        let u = Wfa::from_rows(&[1.0], &[vec![1.0]], &[1.0]).unwrap();
        assert!(!u.is_irredundant(1e-12).unwrap());
    }
}
