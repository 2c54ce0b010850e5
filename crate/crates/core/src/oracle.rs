//! Independent checks: finite Hankel sections, symbols on the complex
//! plane, unimodularity of the error symbol and allpass Gramian residuals.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::aak::{AuxiliaryWfa, PartitionedSva, DEFAULT_MULT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, max_abs, solve_stein};
use crate::sva::{SvaModel, IRREDUNDANT_MARGIN};
use crate::wfa::{self, Wfa};

/// Finite `N x N` Hankel matrix `H(i, j) = f(i + j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelSection {
    sequence: Vec<f64>,
    size: usize,
}

impl HankelSection {
    /// Section built from `f(0), …, f(2N - 2)`; the length must be odd.
    pub fn from_sequence(sequence: Vec<f64>) -> Result<HankelSection> {
        if sequence.len() % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "a square Hankel section needs an odd number of values, got {}",
                sequence.len()
            )));
        }
        let size = sequence.len().div_ceil(2);
        Ok(HankelSection { sequence, size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn sequence(&self) -> &[f64] {
        &self.sequence
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.sequence[i + j]
    }

    pub fn entries(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.size, self.size, |i, j| self.sequence[i + j])
    }
}

pub fn hankel_section(w: &Wfa, n_size: usize) -> HankelSection {
    let n = n_size.max(1);
    HankelSection {
        sequence: w.values(2 * n - 1),
        size: n,
    }
}

/// Section of `f_a - f_b`.
pub fn difference_section(a: &Wfa, b: &Wfa, n_size: usize) -> HankelSection {
    let n = n_size.max(1);
    let sequence = a
        .values(2 * n - 1)
        .into_iter()
        .zip(b.values(2 * n - 1))
        .map(|(x, y)| x - y)
        .collect();
    HankelSection { sequence, size: n }
}

/// Whether `m(i, j)` depends only on `i + j`.
pub fn is_hankel(m: &DMatrix<f64>, tol: f64) -> bool {
    let (r, c) = m.shape();
    (0..r).all(|i| {
        (0..c).all(|j| i == 0 || j + 1 == c || (m[(i, j)] - m[(i - 1, j + 1)]).abs() <= tol)
    })
}

/// Singular values of a section, descending. Sections are symmetric, so these
/// are the absolute eigenvalues.
pub fn section_singular_values(h: &HankelSection) -> Vec<f64> {
    // entries far below the largest one are flushed: the symmetric
    // eigensolver produces NaN on near-subnormal inputs
    let scale = h.sequence.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let floor = scale * 1e-100;
    let m = DMatrix::from_fn(h.size, h.size, |i, j| {
        let x = h.sequence[i + j];
        if x.abs() < floor {
            0.0
        } else {
            x
        }
    });
    let eig = m.clone().symmetric_eigen().eigenvalues;
    let mut s: Vec<f64> = if eig.iter().all(|x| x.is_finite()) {
        eig.iter().map(|x| x.abs()).collect()
    } else {
        m.svd(false, false).singular_values.iter().copied().collect()
    };
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Best rank-`k` approximation of the section in spectral norm.
///
/// When `σ_{k-1} = σ_k`, the kept part of the tied singular subspace is
/// spanned by the projections of the standard basis vectors, in order.
pub fn truncated_svd_approx(h: &HankelSection, k: usize) -> DMatrix<f64> {
    let m = h.entries();
    if k >= h.size() {
        return m;
    }
    let dec = linalg::svd(&m).expect("section entries are finite");
    let s = &dec.singular_values;
    let n = s.len();
    let mut u = dec.u.clone();
    let mut v = dec.v_t.transpose();
    if k > 0 {
        let tol = 1e-10 * s[0].max(f64::MIN_POSITIVE);
        let tied = |i: usize| (s[i] - s[k]).abs() <= tol;
        let lo = (0..=k).find(|&i| tied(i)).unwrap_or(k);
        let hi = (k..n).take_while(|&i| tied(i)).last().unwrap_or(k) + 1;
        if lo < k && s[k] > tol {
            let block = u.columns(lo, hi - lo).clone_owned();
            let proj = &block * block.transpose();
            let mut basis: Vec<DVector<f64>> = Vec::new();
            for j in 0..n {
                if basis.len() == hi - lo {
                    break;
                }
                let mut c = proj.column(j).clone_owned();
                for b in &basis {
                    let d = b.dot(&c);
                    c.axpy(-d, b, 1.0);
                }
                let nrm = c.norm();
                if nrm > 1e-8 {
                    basis.push(c / nrm);
                }
            }
            for (off, b) in basis.iter().enumerate() {
                let col = lo + off;
                u.set_column(col, b);
                let vc = m.tr_mul(b) / s[col];
                v.set_column(col, &vc);
            }
        }
    }
    let mut out = DMatrix::zeros(n, n);
    for i in 0..k {
        out += s[i] * u.column(i) * v.column(i).transpose();
    }
    out
}

/// Spectral norm of the `N`-section of `f_a - f_b`. Non-decreasing in `N`.
pub fn section_spectral_error(a: &Wfa, b: &Wfa, n_size: usize) -> f64 {
    section_singular_values(&difference_section(a, b, n_size))
        .first()
        .copied()
        .unwrap_or(0.0)
}

/// ℓ² distance over the first terms, with a bound on the remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Error {
    /// `√(Σ_{t < n} (f_a(t) - f_b(t))²)`.
    pub partial: f64,
    /// Upper bound on the ℓ² norm of the terms `t ≥ n`.
    pub tail: f64,
    pub terms: usize,
}

impl L2Error {
    /// Upper bound on the full ℓ² distance.
    pub fn bound(&self) -> f64 {
        self.partial + self.tail
    }
}

/// ℓ² error between two irredundant automata.
///
/// The tail is exact up to rounding: `Σ_{t ≥ n} e(t)² = vᵀ Y v` with
/// `v = Aⁿ β` and `Y` the observability Gramian of the difference; it is
/// reported with a small relative safety margin.
pub fn l2_error(a: &Wfa, b: &Wfa, n_terms: usize) -> Result<L2Error> {
    for w in [a, b] {
        let rho = w.spectral_radius()?;
        if rho >= 1.0 - IRREDUNDANT_MARGIN {
            return Err(Error::NotIrredundant {
                rho,
                limit: 1.0 - IRREDUNDANT_MARGIN,
            });
        }
    }
    let partial = a
        .values(n_terms)
        .into_iter()
        .zip(b.values(n_terms))
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let d = wfa::difference(a, b).into_wfa();
    let mut v = d.beta().clone();
    for _ in 0..n_terms {
        v = d.trans() * v;
    }
    let tail = if v.iter().all(|&x| x == 0.0) || d.is_zero() {
        0.0
    } else {
        let y = solve_stein(&d.trans().transpose(), &(d.alpha() * d.alpha().transpose()))?;
        let t2 = v.dot(&(&y * &v)).max(0.0);
        t2.sqrt() * (1.0 + 1e-6) + f64::EPSILON * v.norm() * max_abs(&y).sqrt()
    };
    Ok(L2Error {
        partial,
        tail,
        terms: n_terms,
    })
}

fn complex_matrix(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

fn complex_vector(v: &DVector<f64>) -> DVector<Complex64> {
    v.map(|x| Complex64::new(x, 0.0))
}

/// The rational symbol `αᵀ (zI - A)⁻¹ β = Σ f(t) z^{-t-1}`.
pub fn symbol_eval(w: &Wfa, z: Complex64) -> Result<Complex64> {
    for lambda in linalg::eigenvalues(w.trans())? {
        let distance = (z - lambda).norm();
        if distance <= 1e-12 * lambda.norm().max(1.0) {
            return Err(Error::NearPole {
                z,
                eigenvalue: lambda,
                distance,
            });
        }
    }
    let n = w.states();
    let m = DMatrix::<Complex64>::identity(n, n) * z - complex_matrix(w.trans());
    let u = m
        .lu()
        .solve(&complex_vector(w.beta()))
        .ok_or(Error::Singular {
            what: "symbol evaluation",
            condition: f64::INFINITY,
        })?;
    Ok(w.alpha().iter().zip(u.iter()).map(|(a, b)| b * *a).sum())
}

/// Unimodularity of the scaled error symbol on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unimodularity {
    /// `max | |ratio| - 1 |` over evaluated samples and group columns.
    pub max_deviation: f64,
    pub evaluated: usize,
    /// Samples whose denominator fell below `1e-13`.
    pub skipped: usize,
}

/// The ratios `[αᵀ(zI - Aᵀ)⁻¹ e_j] / [βᵀ(I - zA)⁻¹ e_j]` for the coordinates
/// `j` of the `σ_k` group. `None` entries had a vanishing denominator.
pub fn unimodularity_ratios(m: &SvaModel, k: usize, z: Complex64) -> Result<Vec<Option<Complex64>>> {
    let n = m.states();
    if k >= n {
        return Err(Error::InvalidArgument(format!("k = {k} must be below {n}")));
    }
    let sigma = m.singular_numbers();
    let sk = sigma[k];
    let group: Vec<usize> = (0..n)
        .filter(|&i| (sigma[i] - sk).abs() <= DEFAULT_MULT_TOL * sk)
        .collect();
    let w = m.wfa();
    let a = complex_matrix(w.trans());
    let eye = DMatrix::<Complex64>::identity(n, n);
    let num = (&eye * z - &a)
        .lu()
        .solve(&complex_vector(w.alpha()))
        .ok_or(Error::Singular {
            what: "unimodularity numerator",
            condition: f64::INFINITY,
        })?;
    let den = (&eye - a.transpose() * z)
        .lu()
        .solve(&complex_vector(w.beta()))
        .ok_or(Error::Singular {
            what: "unimodularity denominator",
            condition: f64::INFINITY,
        })?;
    Ok(group
        .iter()
        .map(|&j| {
            if den[j].norm() < 1e-13 {
                None
            } else {
                Some(num[j] / den[j])
            }
        })
        .collect())
}

/// Evaluates the ratio at `samples` equispaced points of the unit circle.
pub fn unimodularity_residual(m: &SvaModel, k: usize, samples: usize) -> Result<Unimodularity> {
    let mut out = Unimodularity {
        max_deviation: 0.0,
        evaluated: 0,
        skipped: 0,
    };
    for s in 0..samples.max(1) {
        let theta = 2.0 * std::f64::consts::PI * s as f64 / samples.max(1) as f64;
        let z = Complex64::from_polar(1.0, theta);
        for r in unimodularity_ratios(m, k, z)? {
            match r {
                Some(r) => {
                    out.evaluated += 1;
                    out.max_deviation = out.max_deviation.max((r.norm() - 1.0).abs());
                }
                None => out.skipped += 1,
            }
        }
    }
    Ok(out)
}

/// Max-norm residuals of the three allpass identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllpassResiduals {
    /// `P_e - A_e P_e A_eᵀ - β_e β_eᵀ`.
    pub reachability: f64,
    /// `Q_e - A_eᵀ Q_e A_e - α_e α_eᵀ`.
    pub observability: f64,
    /// `P_e Q_e - σ_k² I`.
    pub product: f64,
    /// `max(1, σ_0²)`.
    pub scale: f64,
}

impl AllpassResiduals {
    pub fn relative(&self) -> [f64; 3] {
        [
            self.reachability / self.scale,
            self.observability / self.scale,
            self.product / self.scale,
        ]
    }

    pub fn max_relative(&self) -> f64 {
        self.relative().into_iter().fold(0.0, f64::max)
    }
}

/// Checks the Gramians of the error system `(α, -α̂) ⊕ (A, Â) ⊕ (β, β̂)`
/// against their closed forms.
pub fn allpass_verify(p: &PartitionedSva, aux: &AuxiliaryWfa) -> Result<AllpassResiduals> {
    let nm = p.sigma_block.len();
    let r = p.r;
    let n = nm + r;
    if aux.states() != nm {
        return Err(Error::InvalidArgument(format!(
            "auxiliary automaton has {} states, expected {nm}",
            aux.states()
        )));
    }
    if p.rmat.iter().any(|&x| x == 0.0) {
        return Err(Error::Singular {
            what: "allpass R matrix",
            condition: f64::INFINITY,
        });
    }
    let base = p.reassemble();
    let ne = n + nm;
    let mut ae = DMatrix::zeros(ne, ne);
    ae.view_mut((0, 0), (n, n)).copy_from(base.trans());
    ae.view_mut((n, n), (nm, nm)).copy_from(aux.wfa.trans());
    let mut alpha = DVector::zeros(ne);
    alpha.rows_mut(0, n).copy_from(base.alpha());
    alpha.rows_mut(n, nm).copy_from(&(-aux.wfa.alpha()));
    let mut beta = DVector::zeros(ne);
    beta.rows_mut(0, n).copy_from(base.beta());
    beta.rows_mut(n, nm).copy_from(aux.wfa.beta());

    let sig = p.sigma_matrix();
    let rm = p.r_matrix();
    let rinv = DMatrix::from_diagonal(&p.rmat.map(|x| 1.0 / x));
    let eye_m = DMatrix::<f64>::identity(nm, nm);
    let sk = p.sigma_k;

    let mut pe = DMatrix::zeros(ne, ne);
    pe.view_mut((0, 0), (nm, nm)).copy_from(&sig);
    pe.view_mut((nm, nm), (r, r)).fill_with_identity();
    pe.view_mut((nm, nm), (r, r)).scale_mut(sk);
    pe.view_mut((0, n), (nm, nm)).copy_from(&eye_m);
    pe.view_mut((n, 0), (nm, nm)).copy_from(&eye_m);
    pe.view_mut((n, n), (nm, nm)).copy_from(&(-(&sig * &rinv)));

    let mut qe = DMatrix::zeros(ne, ne);
    qe.view_mut((0, 0), (nm, nm)).copy_from(&sig);
    qe.view_mut((nm, nm), (r, r)).fill_with_identity();
    qe.view_mut((nm, nm), (r, r)).scale_mut(sk);
    qe.view_mut((0, n), (nm, nm)).copy_from(&rm);
    qe.view_mut((n, 0), (nm, nm)).copy_from(&rm);
    qe.view_mut((n, n), (nm, nm)).copy_from(&(-(&sig * &rm)));

    let r1 = max_abs(&(&pe - &ae * &pe * ae.transpose() - &beta * beta.transpose()));
    let r2 = max_abs(&(&qe - ae.transpose() * &qe * &ae - &alpha * alpha.transpose()));
    let r3 = max_abs(&(&pe * &qe - DMatrix::<f64>::identity(ne, ne) * (sk * sk)));
    let s0 = p.sigma_max();
    Ok(AllpassResiduals {
        reachability: r1,
        observability: r2,
        product: r3,
        scale: (s0 * s0).max(1.0),
    })
}
