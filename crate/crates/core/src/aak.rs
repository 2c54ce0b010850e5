//! The AAK approximation pipeline.
//!
//! A minimal irredundant WFA is balanced into singular value form,
//! partitioned around the target singular number `σ_k`, and the auxiliary
//! automaton of the closed-form solution is computed. Its stable part, obtained
//! by block diagonalization, is the optimal rank-`k` approximant in Hankel
//! spectral norm; the error equals `σ_k`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result, Stage, StageExt};
use crate::linalg::{self, ordered_schur, pinv_row, solve_sylvester_quasi_triangular};
use crate::oracle::{self, AllpassResiduals, L2Error, Unimodularity};
use crate::sva::{self, SvaModel, IRREDUNDANT_MARGIN};
use crate::wfa::{self, RankWarning, Wfa};

/// Relative tolerance for treating singular numbers as equal.
pub const DEFAULT_MULT_TOL: f64 = 1e-8;
/// `‖α₂‖ ≤ tol · ‖α‖` selects the `α₂ = 0` branch.
pub const DEFAULT_ALPHA2_ZERO_TOL: f64 = 1e-10;
/// Condition number above which the auxiliary system counts as singular.
const MAX_CONDITION: f64 = 1e13;

/// Pass/fail thresholds applied to [`Diagnostics`].
pub mod thresholds {
    /// Allpass residuals, relative to `max(1, σ_0²)`.
    pub const ALLPASS: f64 = 1e-7;
    pub const UNIMODULARITY: f64 = 1e-7;
    /// `|‖f - g‖_H - σ_k|` relative to `σ_k`.
    pub const CERTIFICATE: f64 = 1e-7;
    pub const SECTION_ABOVE: f64 = 1e-8;
    pub const SECTION_BELOW: f64 = 1e-5;
    /// Sections smaller than this are not expected to reach `σ_k - SECTION_BELOW`.
    pub const SECTION_BELOW_MIN_N: usize = 256;
    pub const ECKART_YOUNG: f64 = 1e-9;
    pub const L2: f64 = 1e-8;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AakOptions {
    pub mult_tol: f64,
    pub alpha2_zero_tol: f64,
    /// Rank tolerance used by [`wfa::minimize`].
    pub min_tol: f64,
    /// Hankel section size for the finite-section checks.
    pub truncation: usize,
    pub l2_terms: usize,
    pub unimod_samples: usize,
    /// Compute [`Diagnostics`] as part of the run.
    pub diagnostics: bool,
}

impl Default for AakOptions {
    fn default() -> Self {
        AakOptions {
            mult_tol: DEFAULT_MULT_TOL,
            alpha2_zero_tol: DEFAULT_ALPHA2_ZERO_TOL,
            min_tol: 1e-9,
            truncation: 256,
            l2_terms: 512,
            unimod_samples: 64,
            diagnostics: true,
        }
    }
}

/// An SVA model split around `σ_k`, with the `σ_k` group in the trailing block.
#[derive(Debug, Clone)]
pub struct PartitionedSva {
    pub k: usize,
    /// Diagonal of `Σ`: the singular numbers other than the `σ_k` group.
    pub sigma_block: DVector<f64>,
    pub sigma_k: f64,
    /// Multiplicity of `σ_k`.
    pub r: usize,
    pub a11: DMatrix<f64>,
    pub a12: DMatrix<f64>,
    pub a21: DMatrix<f64>,
    pub a22: DMatrix<f64>,
    pub alpha1: DVector<f64>,
    pub alpha2: DVector<f64>,
    pub beta1: DVector<f64>,
    pub beta2: DVector<f64>,
    /// Diagonal of `R = σ_k² I - Σ²`.
    pub rmat: DVector<f64>,
    /// `order[i]` is the SVA coordinate placed at position `i`.
    pub order: Vec<usize>,
}

impl PartitionedSva {
    pub fn states(&self) -> usize {
        self.sigma_block.len() + self.r
    }

    pub fn sigma_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.sigma_block)
    }

    pub fn r_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.rmat)
    }

    /// The SVA model in the permuted coordinates, reassembled from the blocks.
    pub fn reassemble(&self) -> Wfa {
        let (m, r) = (self.sigma_block.len(), self.r);
        let n = m + r;
        let mut a = DMatrix::zeros(n, n);
        a.view_mut((0, 0), (m, m)).copy_from(&self.a11);
        a.view_mut((0, m), (m, r)).copy_from(&self.a12);
        a.view_mut((m, 0), (r, m)).copy_from(&self.a21);
        a.view_mut((m, m), (r, r)).copy_from(&self.a22);
        let alpha = DVector::from_iterator(n, self.alpha1.iter().chain(self.alpha2.iter()).copied());
        let beta = DVector::from_iterator(n, self.beta1.iter().chain(self.beta2.iter()).copied());
        Wfa::new(alpha, a, beta).expect("blocks come from a valid model")
    }

    /// Largest singular number, `σ_0`.
    pub fn sigma_max(&self) -> f64 {
        self.sigma_block.iter().fold(self.sigma_k, |a, &x| a.max(x))
    }
}

/// Splits the SVA model at index `k` (0-based: `σ_k` is the `(k+1)`-th
/// singular number).
pub fn partition(m: &SvaModel, k: usize, mult_tol: f64) -> Result<PartitionedSva> {
    let n = m.states();
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "target state count {k} must satisfy 0 < k < {n}"
        )));
    }
    if !(mult_tol > 0.0) {
        return Err(Error::InvalidArgument("multiplicity tolerance must be positive".into()));
    }
    let sigma = m.singular_numbers();
    let sk = sigma[k];
    let in_group = |s: f64| (s - sk).abs() <= mult_tol * sk;
    let group: Vec<usize> = (0..n).filter(|&i| in_group(sigma[i])).collect();
    let head = group[0];
    let end = group[group.len() - 1] + 1;
    if head < k {
        return Err(Error::CutInsideMultiplicity {
            k,
            sigma: sk,
            below: head,
            above: end,
        });
    }
    let rest: Vec<usize> = (0..n).filter(|i| !group.contains(i)).collect();
    let order: Vec<usize> = rest.iter().chain(group.iter()).copied().collect();
    let r = group.len();
    let nm = n - r;

    let w = m.wfa();
    let a = DMatrix::from_fn(n, n, |i, j| w.trans()[(order[i], order[j])]);
    let alpha = DVector::from_fn(n, |i, _| w.alpha()[order[i]]);
    let beta = DVector::from_fn(n, |i, _| w.beta()[order[i]]);
    let sigma_block = DVector::from_fn(nm, |i, _| sigma[order[i]]);
    let rmat = sigma_block.map(|s| sk * sk - s * s);

    Ok(PartitionedSva {
        k,
        sigma_k: sk,
        r,
        a11: a.view((0, 0), (nm, nm)).clone_owned(),
        a12: a.view((0, nm), (nm, r)).clone_owned(),
        a21: a.view((nm, 0), (r, nm)).clone_owned(),
        a22: a.view((nm, nm), (r, r)).clone_owned(),
        alpha1: alpha.rows(0, nm).clone_owned(),
        alpha2: alpha.rows(nm, r).clone_owned(),
        beta1: beta.rows(0, nm).clone_owned(),
        beta2: beta.rows(nm, r).clone_owned(),
        sigma_block,
        rmat,
        order,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuxBranch {
    /// `α₂ ≠ 0`: the unique closed-form solution.
    General,
    /// `α₂ = 0`: `Â` is the projector onto the null space of `A₂₁`.
    ZeroAlpha2,
}

/// The `(n - r)`-state automaton `(α̂, Â, β̂)` before extraction of its
/// stable part.
#[derive(Debug, Clone)]
pub struct AuxiliaryWfa {
    pub wfa: Wfa,
    pub branch: AuxBranch,
    /// Set when the `α₂ = 0` branch found only `Â = 0`.
    pub degenerate: bool,
    /// Condition number of the matrix inverted to form `Â` (general branch).
    pub condition: f64,
}

impl AuxiliaryWfa {
    pub fn states(&self) -> usize {
        self.wfa.states()
    }
}

pub fn solve_auxiliary(p: &PartitionedSva, opts: &AakOptions) -> Result<AuxiliaryWfa> {
    let nm = p.sigma_block.len();
    if nm == 0 {
        return Err(Error::InvalidArgument("partition has an empty Σ block".into()));
    }
    let r = p.r_matrix();
    let alpha_norm = p.alpha1.norm().hypot(p.alpha2.norm());
    if p.alpha2.norm() > opts.alpha2_zero_tol * alpha_norm {
        let b2 = pinv_row(&p.beta2)?;
        let m = p.a11.transpose() - (p.a21.transpose() * &b2) * p.beta1.transpose();
        let s = linalg::svd(&m)?.singular_values;
        let condition = if s[nm - 1] > 0.0 { s[0] / s[nm - 1] } else { f64::INFINITY };
        if condition > MAX_CONDITION {
            return Err(Error::Singular {
                what: "auxiliary system",
                condition,
            });
        }
        let a_hat = m.try_inverse().ok_or(Error::Singular {
            what: "auxiliary system",
            condition,
        })?;
        let (alpha_hat, beta_hat) = cross_block_vectors(p, &a_hat);
        return Ok(AuxiliaryWfa {
            wfa: Wfa::new(alpha_hat, a_hat, beta_hat)?,
            branch: AuxBranch::General,
            degenerate: false,
            condition,
        });
    }

    // α₂ = 0: any Â with Â A₂₁ᵀ = 0 is admissible; take the null-space projector.
    let gram = p.a21.transpose() * &p.a21;
    let eig = gram.symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, &x| a.max(x)).max(1.0);
    let null: Vec<DVector<f64>> = (0..nm)
        .filter(|&i| eig.eigenvalues[i] <= 1e-20 * scale)
        .map(|i| eig.eigenvectors.column(i).clone_owned())
        .collect();
    let a_hat = if null.is_empty() {
        DMatrix::zeros(nm, nm)
    } else {
        let w = DMatrix::from_columns(&null);
        &w * w.transpose()
    };
    let b1 = pinv_row(&p.beta1)?;
    let a1 = pinv_row(&p.alpha1)?;
    let eye = DMatrix::<f64>::identity(nm, nm);
    let beta_hat = (&eye - &a_hat * p.a11.transpose()) * b1;
    let alpha_hat = -((&r - a_hat.transpose() * &r * &p.a11) * a1);
    Ok(AuxiliaryWfa {
        wfa: Wfa::new(alpha_hat, a_hat, beta_hat)?,
        branch: AuxBranch::ZeroAlpha2,
        degenerate: null.is_empty(),
        condition: 1.0,
    })
}

/// `α̂` and `β̂` from the cross blocks of the error Gramian equations,
/// `C - AᵀCÂ = -α α̂ᵀ` with `C = [R; 0]` and `D - ADÂᵀ = β β̂ᵀ` with
/// `D = [I; 0]`. The trailing rows alone give the closed forms
/// `α̂ = ÂᵀRA₁₂α₂⁺` and `β̂ = -ÂA₂₁ᵀ(β₂ᵀ)⁺`; solving over all rows in least
/// squares does not divide by a small `α₂` or `β₂`.
fn cross_block_vectors(p: &PartitionedSva, a_hat: &DMatrix<f64>) -> (DVector<f64>, DVector<f64>) {
    let nm = p.sigma_block.len();
    let base = p.reassemble();
    let a = base.trans();
    let mut c = DMatrix::zeros(nm + p.r, nm);
    c.view_mut((0, 0), (nm, nm)).copy_from(&p.r_matrix());
    let lhs = &c - a.transpose() * &c * a_hat;
    let alpha_hat = -(lhs.transpose() * base.alpha()) / base.alpha().norm_squared();
    let mut d = DMatrix::zeros(nm + p.r, nm);
    d.view_mut((0, 0), (nm, nm)).fill_with_identity();
    let lhs = &d - a * &d * a_hat.transpose();
    let beta_hat = (lhs.transpose() * base.beta()) / base.beta().norm_squared();
    (alpha_hat, beta_hat)
}

/// Eigenvalue count of `Â` inside the unit disc versus the count predicted
/// by the signature of `Σ(Σ² - σ_k² I)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub inside: usize,
    pub expected: usize,
}

impl Inertia {
    pub fn holds(&self) -> bool {
        self.inside == self.expected
    }
}

pub fn inertia(p: &PartitionedSva, aux: &AuxiliaryWfa) -> Result<Inertia> {
    let inside = linalg::eigenvalues(aux.wfa.trans())?
        .iter()
        .filter(|z| z.norm() < 1.0)
        .count();
    let expected = p
        .sigma_block
        .iter()
        .zip(p.rmat.iter())
        .filter(|(s, r)| -(*s) * (*r) > 0.0)
        .count();
    Ok(Inertia { inside, expected })
}

/// Extracts the `k`-state stable part of the auxiliary automaton.
pub fn block_diagonalize(aux: &AuxiliaryWfa, k: usize) -> Result<Wfa> {
    let a = aux.wfa.trans();
    let n = a.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "cannot extract {k} states from a {n}-state automaton"
        )));
    }
    let eig = linalg::eigenvalues(a)?;
    let inside = eig.iter().filter(|z| z.norm() < 1.0).count();
    if inside != k {
        return Err(Error::Inertia { inside, expected: k });
    }
    if n == k {
        return Ok(aux.wfa.clone());
    }
    let os = ordered_schur(a)?;
    if !os.is_boundary(k) {
        return Err(Error::StraddledBlock(k));
    }
    let t11 = os.t.view((0, 0), (k, k)).clone_owned();
    let t12 = os.t.view((0, k), (k, n - k)).clone_owned();
    let t22 = os.t.view((k, k), (n - k, n - k)).clone_owned();
    let x = solve_sylvester_quasi_triangular(&t11, &t22, &t12)?;
    let ya = os.u.tr_mul(aux.wfa.alpha());
    let yb = os.u.tr_mul(aux.wfa.beta());
    let alpha = ya.rows(0, k).clone_owned();
    let beta = yb.rows(0, k) - &x * yb.rows(k, n - k);
    Wfa::new(alpha, t11, beta)
}

/// Residuals and error figures that certify an approximation.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    /// `None` when the target size reaches the input's minimal size.
    pub allpass: Option<AllpassResiduals>,
    pub unimodularity: Option<Unimodularity>,
    /// Exact Hankel norm of the error, from Gramians.
    pub certified_error: f64,
    /// Spectral norm of the `truncation`-sized section of the error.
    pub section_error: f64,
    pub truncation: usize,
    /// The `(k+1)`-th singular value of the input's section; never above `σ_k`.
    pub section_sigma_k: f64,
    pub l2: L2Error,
}

/// One threshold check on a [`Diagnostics`] record.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &'static str, value: f64, bound: f64) -> Check {
        Check {
            name,
            value,
            bound,
            passed: value <= bound,
        }
    }

    fn at_least(name: &'static str, value: f64, bound: f64) -> Check {
        Check {
            name,
            value,
            bound,
            passed: value >= bound,
        }
    }
}

impl Diagnostics {
    /// Computes every diagnostic for `input` approximated by `approximant`.
    pub fn compute(
        input: &Wfa,
        sva: &SvaModel,
        part: Option<(&PartitionedSva, &AuxiliaryWfa)>,
        approximant: &Wfa,
        opts: &AakOptions,
    ) -> Result<Diagnostics> {
        let k = approximant.states();
        let allpass = part.map(|(p, a)| oracle::allpass_verify(p, a)).transpose()?;
        let unimodularity = if k < sva.states() {
            Some(oracle::unimodularity_residual(sva, k, opts.unimod_samples)?)
        } else {
            None
        };
        let diff = wfa::difference(input, approximant);
        let certified_error = sva::exact_hankel_norm(diff.wfa())?;
        let n = opts.truncation.max(1);
        let section_error = oracle::section_spectral_error(input, approximant, n);
        let input_sv = oracle::section_singular_values(&oracle::hankel_section(input, n));
        let section_sigma_k = input_sv.get(k).copied().unwrap_or(0.0);
        let l2 = oracle::l2_error(input, approximant, opts.l2_terms)?;
        Ok(Diagnostics {
            allpass,
            unimodularity,
            certified_error,
            section_error,
            truncation: n,
            section_sigma_k,
            l2,
        })
    }

    /// Threshold checks against the certified error `sigma_k`.
    pub fn checks(&self, sigma_k: f64, sigma_0: f64) -> Vec<Check> {
        use thresholds as th;
        let mut out = Vec::new();
        if let Some(ap) = &self.allpass {
            let [r1, r2, r3] = ap.relative();
            out.push(Check::at_most("allpass_reachability", r1, th::ALLPASS));
            out.push(Check::at_most("allpass_observability", r2, th::ALLPASS));
            out.push(Check::at_most("allpass_product", r3, th::ALLPASS));
        }
        if let Some(u) = &self.unimodularity {
            out.push(Check::at_most("unimodularity", u.max_deviation, th::UNIMODULARITY));
        }
        let cert_scale = if sigma_k > 0.0 { sigma_k } else { sigma_0.max(1.0) };
        out.push(Check::at_most(
            "certificate",
            (self.certified_error - sigma_k).abs() / cert_scale,
            th::CERTIFICATE,
        ));
        out.push(Check::at_most(
            "section_upper",
            self.section_error,
            sigma_k + th::SECTION_ABOVE,
        ));
        if self.truncation >= th::SECTION_BELOW_MIN_N {
            out.push(Check::at_least(
                "section_lower",
                self.section_error,
                sigma_k - th::SECTION_BELOW,
            ));
        }
        out.push(Check::at_most(
            "eckart_young",
            self.section_sigma_k,
            sigma_k + th::ECKART_YOUNG,
        ));
        out.push(Check::at_most("l2_bound", self.l2.bound(), sigma_k + th::L2));
        out
    }
}

#[derive(Debug, Clone)]
pub struct ApproximationReport {
    pub approximant: Wfa,
    pub k: usize,
    /// Certified spectral-norm error: the `(k+1)`-th singular number.
    pub sigma_k: f64,
    pub sva: SvaModel,
    pub partition: PartitionedSva,
    pub auxiliary: AuxiliaryWfa,
    pub inertia: Inertia,
    pub degenerate: bool,
    pub recommendation: Option<String>,
    pub minimization_warnings: Vec<RankWarning>,
    pub diagnostics: Option<Diagnostics>,
}

impl ApproximationReport {
    pub fn singular_numbers(&self) -> &[f64] {
        self.sva.singular_numbers()
    }

    pub fn checks(&self) -> Vec<Check> {
        let mut out = vec![Check {
            name: "inertia",
            value: self.inertia.inside as f64,
            bound: self.inertia.expected as f64,
            passed: self.inertia.holds(),
        }];
        if let Some(d) = &self.diagnostics {
            out.extend(d.checks(self.sigma_k, self.singular_numbers()[0]));
        }
        out
    }

    /// Whether every check passed.
    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed)
    }
}

fn run_from_sva(
    input: &Wfa,
    m: SvaModel,
    k: usize,
    opts: &AakOptions,
    warnings: Vec<RankWarning>,
) -> Result<ApproximationReport> {
    let part = partition(&m, k, opts.mult_tol).stage(Stage::Partition)?;
    let aux = solve_auxiliary(&part, opts).stage(Stage::Auxiliary)?;
    let inertia = inertia(&part, &aux).stage(Stage::Auxiliary)?;
    let recommendation = aux.degenerate.then(|| {
        let sizes = if k > 1 {
            format!("k = {} or k = {}", k - 1, k + 1)
        } else {
            format!("k = {}", k + 1)
        };
        format!("auxiliary transition matrix vanished; an approximation with {sizes} avoids this case")
    });
    let approximant = if inertia.holds() {
        block_diagonalize(&aux, k).stage(Stage::BlockDiagonalize)?
    } else if aux.degenerate {
        // Â = 0 with the wrong state count: keep the constant term only
        let c = aux.wfa.alpha().dot(aux.wfa.beta());
        let mut alpha = DVector::zeros(k);
        alpha[0] = c;
        let mut beta = DVector::zeros(k);
        beta[0] = 1.0;
        Wfa::new(alpha, DMatrix::zeros(k, k), beta).stage(Stage::BlockDiagonalize)?
    } else {
        return Err(Error::Inertia {
            inside: inertia.inside,
            expected: inertia.expected,
        }
        .at(Stage::Auxiliary));
    };
    let diagnostics = if opts.diagnostics {
        Some(
            Diagnostics::compute(input, &m, Some((&part, &aux)), &approximant, opts)
                .stage(Stage::Verify)?,
        )
    } else {
        None
    };
    Ok(ApproximationReport {
        approximant,
        k,
        sigma_k: part.sigma_k,
        degenerate: aux.degenerate,
        sva: m,
        partition: part,
        auxiliary: aux,
        inertia,
        recommendation,
        minimization_warnings: warnings,
        diagnostics,
    })
}

/// Optimal `k`-state approximation of `w` in Hankel spectral norm.
///
/// Runs minimize, balance, partition, auxiliary solve and block
/// diagonalization. Errors carry the name of the failing stage.
pub fn aak_approximation(w: &Wfa, k: usize, opts: &AakOptions) -> Result<ApproximationReport> {
    let rho = w.spectral_radius()?;
    if rho >= 1.0 - IRREDUNDANT_MARGIN {
        return Err(Error::NotIrredundant {
            rho,
            limit: 1.0 - IRREDUNDANT_MARGIN,
        });
    }
    let min = wfa::minimize(w, opts.min_tol).stage(Stage::Minimize)?;
    let n = min.wfa.states();
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "target state count {k} must satisfy 0 < k < {n} (minimal size)"
        ))
        .at(Stage::Partition));
    }
    let m = sva::to_sva(&min.wfa).stage(Stage::Balance)?;
    run_from_sva(w, m, k, opts, min.warnings)
}

/// Runs the pipeline on a model already in singular value form, keeping its
/// coordinates.
pub fn approximate_sva(m: &SvaModel, k: usize, opts: &AakOptions) -> Result<ApproximationReport> {
    run_from_sva(m.wfa(), m.clone(), k, opts, Vec::new())
}

/// Diagnostics for a given pair (input, approximant), with `σ_k` taken from
/// the input at `k = approximant.states()`.
#[derive(Debug, Clone)]
pub struct Verification {
    pub k: usize,
    /// Zero when `k` reaches the minimal size of the input.
    pub sigma_k: f64,
    pub singular_numbers: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl Verification {
    pub fn checks(&self) -> Vec<Check> {
        let s0 = self.singular_numbers.first().copied().unwrap_or(0.0);
        self.diagnostics.checks(self.sigma_k, s0)
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed)
    }
}

pub fn verify_approximation(input: &Wfa, approximant: &Wfa, opts: &AakOptions) -> Result<Verification> {
    let rho = approximant.spectral_radius().stage(Stage::Verify)?;
    if rho >= 1.0 - IRREDUNDANT_MARGIN {
        return Err(Error::NotIrredundant {
            rho,
            limit: 1.0 - IRREDUNDANT_MARGIN,
        }
        .at(Stage::Verify));
    }
    let min = wfa::minimize(input, opts.min_tol).stage(Stage::Minimize)?;
    let k = approximant.states();
    if min.wfa.is_zero() {
        let m0 = Wfa::zero();
        let d = Diagnostics {
            allpass: None,
            unimodularity: None,
            certified_error: sva::exact_hankel_norm(wfa::difference(input, approximant).wfa())
                .stage(Stage::Verify)?,
            section_error: oracle::section_spectral_error(input, approximant, opts.truncation.max(1)),
            truncation: opts.truncation.max(1),
            section_sigma_k: 0.0,
            l2: oracle::l2_error(&m0, approximant, opts.l2_terms).stage(Stage::Verify)?,
        };
        return Ok(Verification {
            k,
            sigma_k: 0.0,
            singular_numbers: Vec::new(),
            diagnostics: d,
        });
    }
    let m = sva::to_sva(&min.wfa).stage(Stage::Balance)?;
    let n = m.states();
    let (sigma_k, pa) = if k < n {
        let p = partition(&m, k, opts.mult_tol).stage(Stage::Partition)?;
        let a = solve_auxiliary(&p, opts).stage(Stage::Auxiliary)?;
        (p.sigma_k, Some((p, a)))
    } else {
        (0.0, None)
    };
    let diagnostics = Diagnostics::compute(
        input,
        &m,
        pa.as_ref().map(|(p, a)| (p, a)),
        approximant,
        opts,
    )
    .stage(Stage::Verify)?;
    Ok(Verification {
        k,
        sigma_k,
        singular_numbers: m.singular_numbers().to_vec(),
        diagnostics,
    })
}

#[cfg(test)]
fn residual(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    linalg::max_abs(&(a - b))
}
