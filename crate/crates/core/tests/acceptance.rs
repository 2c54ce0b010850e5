//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use wfa_aak::aak::{
    aak_approximation, approximate_sva, verify_approximation, AakOptions, ApproximationReport,
};
use wfa_aak::ensemble::{self, random_instance, EnsembleConfig};
use wfa_aak::linalg::{eigenvalues, max_abs};
use wfa_aak::oracle::{
    allpass_verify, hankel_section, is_hankel, l2_error, section_singular_values,
    section_spectral_error, symbol_eval, truncated_svd_approx, unimodularity_residual,
    HankelSection,
};
use wfa_aak::par::Execution;
use wfa_aak::sva::{exact_hankel_norm, gramians, SvaModel};
use wfa_aak::wfa::difference;
use wfa_aak::Wfa;

const SEEDS: u64 = 100;
const SECTION: usize = 256;
const L2_TERMS: usize = 512;
const SAMPLES: usize = 64;

struct Outcome {
    failures: usize,
}

impl Outcome {
    fn record(&mut self, id: u32, title: &str, passed: bool, detail: String) {
        let tag = if passed { "PASS" } else { "FAIL" };
        println!("{tag} {id:>2} {title}: {detail}");
        if !passed {
            self.failures += 1;
        }
    }
}

fn three_state_model() -> Wfa {
    Wfa::from_rows(
        &[1.650, -0.851, 0.038],
        &[
            vec![0.579, 0.461, 0.046],
            vec![-0.461, -0.192, 0.225],
            vec![0.046, -0.225, -0.387],
        ],
        &[1.650, 0.851, 0.038],
    )
    .unwrap()
}

fn two_state_cycle() -> Wfa {
    let h = 3f64.sqrt() / 2.0;
    Wfa::from_rows(&[h, 0.0], &[vec![0.0, 0.5], vec![0.5, 0.0]], &[h, 0.0]).unwrap()
}

fn criterion1(out: &mut Outcome) {
    let start = Instant::now();
    // the printed model is given in singular value form; keep its coordinates
    let m = SvaModel::assume_balanced(&three_state_model(), 5e-3).unwrap();
    let rep = approximate_sva(&m, 2, &AakOptions::default()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let aux = &rep.auxiliary.wfa;
    let want_a = DMatrix::from_row_slice(2, 2, &[0.578, 0.178, -1.221, -0.169]);
    let want_b = DVector::from_column_slice(&[0.353, 0.474]);
    let err_a = max_abs(&(aux.trans() - &want_a));
    let err_b = (aux.beta() - &want_b).amax();
    let err_ev = eigenvalues(aux.trans())
        .unwrap()
        .iter()
        .map(|z| (z.re - 0.204593).abs().max((z.im.abs() - 0.278322).abs()))
        .fold(0.0, f64::max);
    out.record(
        1,
        "three-state worked model",
        err_a <= 5e-3 && err_b <= 5e-3 && err_ev <= 1e-3 && elapsed < 1.0,
        format!("|A-A*| = {err_a:.2e}, |b-b*| = {err_b:.2e}, |lambda-lambda*| = {err_ev:.2e}, {elapsed:.3} s"),
    );
}

fn criterion2(out: &mut Outcome) {
    let w = two_state_cycle();
    let g = gramians(&w).unwrap();
    let d = DMatrix::from_row_slice(2, 2, &[0.8, 0.0, 0.0, 0.2]);
    let err_g = max_abs(&(&g.reachability - &d)).max(max_abs(&(&g.observability - &d)));
    let err_f = (0..=6)
        .map(|t| {
            let want = if t % 2 == 0 { 0.75 * 0.5f64.powi(t as i32) } else { 0.0 };
            (w.evaluate(t) - want).abs()
        })
        .fold(0.0, f64::max);
    let err_z = (symbol_eval(&w, Complex64::new(2.0, 0.0)).unwrap() - 0.4).norm();
    out.record(
        2,
        "two-state cycle",
        err_g <= 1e-10 && err_f <= 1e-12 && err_z <= 1e-12,
        format!("gramians {err_g:.2e}, values {err_f:.2e}, symbol {err_z:.2e}"),
    );
}

fn criterion3(out: &mut Outcome) {
    let h = HankelSection::from_sequence(vec![1.0, 2.0, 3.0, 1.0, 2.0]).unwrap();
    let s = section_singular_values(&h);
    let r3 = 3f64.sqrt();
    let err_s = (s[0] - 6.0).abs().max((s[1] - r3).abs()).max((s[2] - r3).abs());
    let bar = truncated_svd_approx(&h, 2);
    let want = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.5, 2.0, 1.5, 2.5, 2.0, 1.5]);
    let err_m = max_abs(&(&bar - &want));
    let hankel = is_hankel(&bar, 1e-6);
    out.record(
        3,
        "truncated SVD counterexample",
        err_s <= 1e-9 && err_m <= 1e-9 && !hankel,
        format!("singular values {err_s:.2e}, truncation {err_m:.2e}, hankel = {hankel}"),
    );
}

/// Per-instance figures, each from its own oracle call.
struct Measured {
    label: String,
    k: usize,
    sigma_k: f64,
    allpass: f64,
    unimod: f64,
    certified: f64,
    section: f64,
    section_sigma_k: f64,
    l2: f64,
    inside: usize,
    positive: usize,
}

fn measure(label: String, w: &Wfa, k: usize) -> Result<Measured, String> {
    let opts = AakOptions {
        diagnostics: false,
        ..AakOptions::default()
    };
    let rep: ApproximationReport = aak_approximation(w, k, &opts).map_err(|e| format!("{label}: {e}"))?;
    let g = &rep.approximant;
    let p = &rep.partition;
    let allpass = allpass_verify(p, &rep.auxiliary).map_err(|e| e.to_string())?.max_relative();
    let unimod = unimodularity_residual(&rep.sva, k, SAMPLES)
        .map_err(|e| e.to_string())?
        .max_deviation;
    let certified = exact_hankel_norm(difference(w, g).wfa()).map_err(|e| e.to_string())?;
    let section = section_spectral_error(w, g, SECTION);
    let section_sigma_k = section_singular_values(&hankel_section(w, SECTION))[k];
    let l2 = l2_error(w, g, L2_TERMS).map_err(|e| e.to_string())?.bound();
    let inside = eigenvalues(rep.auxiliary.wfa.trans())
        .map_err(|e| e.to_string())?
        .iter()
        .filter(|z| z.norm() < 1.0)
        .count();
    let s2 = rep.sigma_k * rep.sigma_k;
    let positive = p.sigma_block.iter().filter(|&&s| s * (s * s - s2) > 0.0).count();
    Ok(Measured {
        label,
        k,
        sigma_k: rep.sigma_k,
        allpass,
        unimod,
        certified,
        section,
        section_sigma_k,
        l2,
        inside,
        positive,
    })
}

fn worst<F: Fn(&Measured) -> f64>(ms: &[Measured], f: F) -> (f64, String) {
    ms.iter()
        .map(|m| (f(m), m.label.clone()))
        .fold((f64::NEG_INFINITY, String::new()), |a, b| if b.0 > a.0 { b } else { a })
}

fn instance_criteria(out: &mut Outcome) {
    let cfg = EnsembleConfig::default();
    let mut ms = Vec::new();
    let mut errors = Vec::new();
    match measure("three-state model".into(), &three_state_model(), 2) {
        Ok(m) => ms.push(m),
        Err(e) => errors.push(e),
    }
    for seed in 0..SEEDS {
        let inst = random_instance(seed, &cfg).unwrap();
        match measure(format!("seed {seed}"), &inst.wfa, inst.k) {
            Ok(m) => ms.push(m),
            Err(e) => errors.push(e),
        }
    }
    let ok = errors.is_empty();
    let count = ms.len();
    let suffix = if ok { String::new() } else { format!("; pipeline errors: {errors:?}") };

    let (ap, ap_at) = worst(&ms, |m| m.allpass);
    let (um, um_at) = worst(&ms, |m| m.unimod);
    out.record(
        4,
        "allpass certification",
        ok && ap <= 1e-7 && um <= 1e-7,
        format!("{count} instances, max allpass {ap:.2e} ({ap_at}), max unimodularity {um:.2e} ({um_at}){suffix}"),
    );

    let (ce, ce_at) = worst(&ms, |m| (m.certified - m.sigma_k).abs() / m.sigma_k);
    let (above, above_at) = worst(&ms, |m| m.section - m.sigma_k);
    let (below, below_at) = worst(&ms, |m| m.sigma_k - m.section);
    out.record(
        5,
        "optimality certificate",
        ok && ce <= 1e-7 && above <= 1e-8 && below <= 1e-5,
        format!(
            "max relative certificate gap {ce:.2e} ({ce_at}), section excess {above:.2e} ({above_at}), section shortfall {below:.2e} ({below_at}){suffix}"
        ),
    );

    let (ey, ey_at) = worst(&ms, |m| m.section_sigma_k - m.sigma_k);
    out.record(
        6,
        "lower-bound ordering",
        ok && ey <= 1e-9,
        format!("max section sigma_k excess {ey:.2e} ({ey_at}){suffix}"),
    );

    let (l2, l2_at) = worst(&ms, |m| m.l2 - m.sigma_k);
    out.record(
        7,
        "l2 bound",
        ok && l2 <= 1e-8,
        format!("max (l2 + tail) - sigma_k = {l2:.2e} ({l2_at}){suffix}"),
    );

    let bad: Vec<&str> = ms
        .iter()
        .filter(|m| m.inside != m.k || m.positive != m.k)
        .map(|m| m.label.as_str())
        .collect();
    out.record(
        8,
        "inertia",
        ok && bad.is_empty(),
        format!("{} of {count} instances violate{suffix}", bad.len()),
    );
}

fn criterion9(out: &mut Outcome) {
    let seeds: Vec<u64> = (0..SEEDS).collect();
    let recs = ensemble::run(&seeds, &EnsembleConfig::default(), Execution::default());
    let failed: Vec<u64> = recs.iter().filter(|r| r.error.is_some()).map(|r| r.seed).collect();
    let excess = recs
        .iter()
        .map(|r| r.aak_section_error - r.sva_trunc_error)
        .fold(f64::NEG_INFINITY, f64::max);
    let better = recs.iter().filter(|r| r.aak_section_error < r.sva_trunc_error).count();
    out.record(
        9,
        "baseline comparison",
        failed.is_empty() && excess <= 1e-8 && 2 * better >= recs.len(),
        format!(
            "max excess over truncation {excess:.2e}, strictly better in {better} of {} seeds, errors at {failed:?}",
            recs.len()
        ),
    );
}

fn criterion10(out: &mut Outcome) {
    let n = 50;
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        a[((i + 1) % n, i)] = 0.95;
    }
    let alpha = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut beta = DVector::zeros(n);
    beta[0] = 1.0;
    let w = Wfa::new(alpha, a, beta).unwrap();
    let k = 20;
    let start = Instant::now();
    let result = aak_approximation(&w, k, &AakOptions::default()).and_then(|rep| {
        let v = verify_approximation(&w, &rep.approximant, &AakOptions::default())?;
        Ok((rep.passed(), v.passed()))
    });
    let elapsed = start.elapsed().as_secs_f64();
    let (passed, detail) = match result {
        Ok((p, v)) => (p && v && elapsed < 5.0, format!("n = {n}, k = {k}, {elapsed:.2} s, checks pass: {p}/{v}")),
        Err(e) => (false, format!("error: {e}")),
    };
    out.record(10, "performance", passed, detail);
}

fn main() -> ExitCode {
    let mut out = Outcome { failures: 0 };
    criterion1(&mut out);
    criterion2(&mut out);
    criterion3(&mut out);
    instance_criteria(&mut out);
    criterion9(&mut out);
    criterion10(&mut out);
    if out.failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", out.failures);
        ExitCode::FAILURE
    }
}
