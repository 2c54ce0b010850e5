//! Machine-readable reports for `approximate` and `verify`.

use std::fmt::Write as _;

use serde::Serialize;
use wfa_aak::aak::{ApproximationReport, Check, Diagnostics, Verification};
use wfa_aak::linalg;
use wfa_aak::Wfa;

use crate::document::WfaDocument;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputSummary {
    pub states: usize,
    pub minimal_states: usize,
    pub spectral_radius: f64,
    pub singular_numbers: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsDocument {
    /// Reachability, observability and product residuals, relative.
    pub allpass: Option<[f64; 3]>,
    pub unimodularity: Option<f64>,
    pub unimodularity_samples: Option<usize>,
    pub certified_error: f64,
    pub section_error: f64,
    pub section_sigma_k: f64,
    pub truncation: usize,
    pub l2_error: f64,
    pub l2_tail: f64,
    pub l2_terms: usize,
}

impl DiagnosticsDocument {
    pub fn new(d: &Diagnostics) -> DiagnosticsDocument {
        DiagnosticsDocument {
            allpass: d.allpass.as_ref().map(|a| a.relative()),
            unimodularity: d.unimodularity.as_ref().map(|u| u.max_deviation),
            unimodularity_samples: d.unimodularity.as_ref().map(|u| u.evaluated),
            certified_error: d.certified_error,
            section_error: d.section_error,
            section_sigma_k: d.section_sigma_k,
            truncation: d.truncation,
            l2_error: d.l2.partial,
            l2_tail: d.l2.tail,
            l2_terms: d.l2.terms,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckDocument {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    pub passed: bool,
}

impl From<&Check> for CheckDocument {
    fn from(c: &Check) -> Self {
        CheckDocument {
            name: c.name,
            value: c.value,
            bound: c.bound,
            passed: c.passed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub input: InputSummary,
    pub k: usize,
    pub sigma_k: f64,
    pub approximant: WfaDocument,
    /// Eigenvalues of the approximant as `[re, im]` pairs.
    pub eigenvalues: Vec<[f64; 2]>,
    pub inertia: [usize; 2],
    pub degenerate: bool,
    pub recommendation: Option<String>,
    pub warnings: Vec<String>,
    pub diagnostics: Option<DiagnosticsDocument>,
    pub checks: Vec<CheckDocument>,
    pub passed: bool,
    pub millis: f64,
}

fn eigen_pairs(w: &Wfa) -> Vec<[f64; 2]> {
    linalg::eigenvalues(w.trans())
        .map(|ev| ev.iter().map(|z| [z.re, z.im]).collect())
        .unwrap_or_default()
}

impl ReportDocument {
    pub fn new(input: InputSummary, rep: &ApproximationReport, millis: f64) -> ReportDocument {
        let checks = rep.checks();
        ReportDocument {
            input,
            k: rep.k,
            sigma_k: rep.sigma_k,
            approximant: WfaDocument::from_wfa(&rep.approximant),
            eigenvalues: eigen_pairs(&rep.approximant),
            inertia: [rep.inertia.inside, rep.inertia.expected],
            degenerate: rep.degenerate,
            recommendation: rep.recommendation.clone(),
            warnings: rep.minimization_warnings.iter().map(|w| w.to_string()).collect(),
            diagnostics: rep.diagnostics.as_ref().map(DiagnosticsDocument::new),
            passed: checks.iter().all(|c| c.passed),
            checks: checks.iter().map(CheckDocument::from).collect(),
            millis,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("reports always serialize"),
            Format::Text => {
                let mut s = String::new();
                summary_text(&mut s, &self.input);
                let _ = writeln!(s, "k: {}", self.k);
                let _ = writeln!(s, "sigma_k: {:?}", self.sigma_k);
                let ev: Vec<String> = self
                    .eigenvalues
                    .iter()
                    .map(|[re, im]| format!("{re:.6}{im:+.6}i"))
                    .collect();
                let _ = writeln!(s, "eigenvalues: {}", ev.join(", "));
                let _ = writeln!(s, "inertia: {} inside, {} expected", self.inertia[0], self.inertia[1]);
                let _ = writeln!(s, "degenerate: {}", self.degenerate);
                if let Some(r) = &self.recommendation {
                    let _ = writeln!(s, "recommendation: {r}");
                }
                for w in &self.warnings {
                    let _ = writeln!(s, "warning: {w}");
                }
                if let Some(d) = &self.diagnostics {
                    diagnostics_text(&mut s, d);
                }
                checks_text(&mut s, &self.checks);
                let _ = writeln!(s, "passed: {}", self.passed);
                let _ = writeln!(s, "millis: {:.3}", self.millis);
                s
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationDocument {
    pub k: usize,
    pub sigma_k: f64,
    pub singular_numbers: Vec<f64>,
    pub diagnostics: DiagnosticsDocument,
    pub checks: Vec<CheckDocument>,
    pub passed: bool,
    pub millis: f64,
}

impl VerificationDocument {
    pub fn new(v: &Verification, millis: f64) -> VerificationDocument {
        let checks = v.checks();
        VerificationDocument {
            k: v.k,
            sigma_k: v.sigma_k,
            singular_numbers: v.singular_numbers.clone(),
            diagnostics: DiagnosticsDocument::new(&v.diagnostics),
            passed: checks.iter().all(|c| c.passed),
            checks: checks.iter().map(CheckDocument::from).collect(),
            millis,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("reports always serialize"),
            Format::Text => {
                let mut s = String::new();
                let _ = writeln!(s, "k: {}", self.k);
                let _ = writeln!(s, "sigma_k: {:?}", self.sigma_k);
                let _ = writeln!(s, "singular_numbers: {}", join(&self.singular_numbers));
                diagnostics_text(&mut s, &self.diagnostics);
                checks_text(&mut s, &self.checks);
                let _ = writeln!(s, "passed: {}", self.passed);
                let _ = writeln!(s, "millis: {:.3}", self.millis);
                s
            }
        }
    }
}

pub fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ")
}

pub fn summary_text(s: &mut String, input: &InputSummary) {
    let _ = writeln!(s, "states: {}", input.states);
    let _ = writeln!(s, "minimal_states: {}", input.minimal_states);
    let _ = writeln!(s, "spectral_radius: {:?}", input.spectral_radius);
    let _ = writeln!(s, "singular_numbers: {}", join(&input.singular_numbers));
}

fn diagnostics_text(s: &mut String, d: &DiagnosticsDocument) {
    if let Some([r1, r2, r3]) = d.allpass {
        let _ = writeln!(s, "allpass: {r1:e} {r2:e} {r3:e}");
    }
    if let Some(u) = d.unimodularity {
        let _ = writeln!(s, "unimodularity: {u:e}");
    }
    let _ = writeln!(s, "certified_error: {:?}", d.certified_error);
    let _ = writeln!(s, "section_error: {:?} (N = {})", d.section_error, d.truncation);
    let _ = writeln!(s, "section_sigma_k: {:?}", d.section_sigma_k);
    let _ = writeln!(s, "l2_error: {:?} + tail {:e} ({} terms)", d.l2_error, d.l2_tail, d.l2_terms);
}

fn checks_text(s: &mut String, checks: &[CheckDocument]) {
    for c in checks {
        let tag = if c.passed { "ok" } else { "FAILED" };
        let _ = writeln!(s, "check {}: {:e} (bound {:e}) {tag}", c.name, c.value, c.bound);
    }
}
