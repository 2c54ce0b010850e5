//! Command-line front end for `wfa-aak`.
//!
//! Exit status is 0 when every check passes, 1 when a threshold check fails,
//! and a distinct code per failure kind otherwise (see [`CliError::exit_code`]).

pub mod document;
pub mod report;

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use thiserror::Error;
use wfa_aak::aak::{aak_approximation, verify_approximation, AakOptions};
use wfa_aak::ensemble::{self, EnsembleConfig};
use wfa_aak::par::Execution;
use wfa_aak::sva::to_sva;
use wfa_aak::wfa::minimize;
use wfa_aak::{Stage, Wfa};

use document::{parse_wfa, DocumentError, WfaDocument};
use report::{Format, InputSummary, ReportDocument, VerificationDocument};

/// Exit status when a run completes but some check fails.
pub const EXIT_CHECKS_FAILED: i32 = 1;
/// Exit status for malformed command lines (clap's convention).
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "wfa-aak", version, about = "Optimal spectral-norm approximation of one-letter WFAs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the size, spectral radius and Hankel singular numbers.
    Info {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Evaluate the automaton on the word of length T.
    Eval { file: PathBuf, t: usize },
    /// Emit an equivalent minimal automaton.
    Minimize {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Emit the automaton in singular value form.
    Sva {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Compute the optimal approximation with K states.
    ///
    /// The report goes to stdout, or to PATH with --report, in which case
    /// stdout carries the approximant document instead.
    Approximate {
        file: PathBuf,
        #[arg(long = "states", short = 'k')]
        states: usize,
        #[arg(long, default_value_t = 256)]
        truncation: usize,
        /// Rank tolerance for the initial minimization.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Recompute every check for an input and a proposed approximant.
    Verify {
        file_a: PathBuf,
        file_b: PathBuf,
        #[arg(long, default_value_t = 256)]
        truncation: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run the random ensemble and print one CSV row per seed.
    Bench {
        #[arg(long)]
        seeds: u64,
        #[arg(long = "max-states")]
        max_states: usize,
        #[arg(long = "rho-cap", default_value_t = 0.9)]
        rho_cap: f64,
        /// Evaluate seeds one at a time.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Document { path: PathBuf, source: DocumentError },
    #[error("{0}")]
    Core(#[from] wfa_aak::Error),
    #[error("write failed: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    /// 3 for I/O, 4 for bad documents, 5 for rejected input, 10 to 15 for
    /// the pipeline stages in order.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Output(_) => 3,
            CliError::Document { .. } => 4,
            CliError::Core(e) => match e.stage() {
                None => 5,
                Some(Stage::Minimize) => 10,
                Some(Stage::Balance) => 11,
                Some(Stage::Partition) => 12,
                Some(Stage::Auxiliary) => 13,
                Some(Stage::BlockDiagonalize) => 14,
                Some(Stage::Verify) => 15,
            },
        }
    }

    /// The message without the stage prefix.
    pub fn detail(&self) -> String {
        match self {
            CliError::Core(e) => e.root().to_string(),
            e => e.to_string(),
        }
    }

    pub fn stage_name(&self) -> &'static str {
        match self {
            CliError::Io { .. } | CliError::Output(_) => "io",
            CliError::Document { .. } => "parse",
            CliError::Core(e) => e.stage().map_or("input", Stage::name),
        }
    }
}

fn read_wfa(path: &Path) -> Result<Wfa, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_wfa(&text).map_err(|source| CliError::Document {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn summary(w: &Wfa, tol: f64) -> Result<InputSummary, CliError> {
    let spectral_radius = w.spectral_radius()?;
    let min = minimize(w, tol).map_err(|e| e.at_stage(Stage::Minimize))?;
    let singular_numbers = if min.wfa.is_zero() {
        Vec::new()
    } else {
        to_sva(&min.wfa)
            .map_err(|e| e.at_stage(Stage::Balance))?
            .singular_numbers()
            .to_vec()
    };
    Ok(InputSummary {
        states: w.states(),
        minimal_states: singular_numbers.len(),
        spectral_radius,
        singular_numbers,
    })
}

/// Runs one command. Returns whether every check passed; commands without
/// checks always pass.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool, CliError> {
    match cli.command {
        Command::Info { file, format } => {
            let s = summary(&read_wfa(&file)?, 1e-9)?;
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&s).expect("serializable"))?,
                Format::Text => {
                    let mut text = String::new();
                    report::summary_text(&mut text, &s);
                    write!(out, "{text}")?;
                }
            }
            Ok(true)
        }
        Command::Eval { file, t } => {
            writeln!(out, "{:?}", read_wfa(&file)?.evaluate(t))?;
            Ok(true)
        }
        Command::Minimize { file, tolerance } => {
            let w = read_wfa(&file)?;
            let m = minimize(&w, tolerance).map_err(|e| e.at_stage(Stage::Minimize))?;
            for warning in &m.warnings {
                writeln!(err, "warning: {warning}")?;
            }
            let doc = WfaDocument::from_wfa(&m.wfa)
                .with_metadata("reachable_rank", m.reachable_rank.to_string())
                .with_metadata("observable_rank", m.observable_rank.to_string());
            writeln!(out, "{}", doc.to_json())?;
            Ok(true)
        }
        Command::Sva { file, tolerance } => {
            let w = read_wfa(&file)?;
            let m = minimize(&w, tolerance).map_err(|e| e.at_stage(Stage::Minimize))?;
            let s = to_sva(&m.wfa).map_err(|e| e.at_stage(Stage::Balance))?;
            let doc = WfaDocument::from_wfa(s.wfa())
                .with_metadata("singular_numbers", report::join(s.singular_numbers()));
            writeln!(out, "{}", doc.to_json())?;
            Ok(true)
        }
        Command::Approximate {
            file,
            states,
            truncation,
            tolerance,
            report: report_path,
            format,
        } => {
            let w = read_wfa(&file)?;
            let opts = AakOptions {
                truncation,
                min_tol: tolerance,
                ..AakOptions::default()
            };
            let start = Instant::now();
            let rep = aak_approximation(&w, states, &opts)?;
            let millis = elapsed_ms(start);
            let input = InputSummary {
                states: w.states(),
                minimal_states: rep.sva.states(),
                spectral_radius: w.spectral_radius()?,
                singular_numbers: rep.singular_numbers().to_vec(),
            };
            let doc = ReportDocument::new(input, &rep, millis);
            if let Some(r) = &doc.recommendation {
                writeln!(err, "note: {r}")?;
            }
            let rendered = doc.render(format);
            match report_path {
                Some(path) => {
                    write_file(&path, &rendered)?;
                    writeln!(out, "{}", doc.approximant.to_json())?;
                }
                None => writeln!(out, "{}", rendered.trim_end())?,
            }
            Ok(doc.passed)
        }
        Command::Verify {
            file_a,
            file_b,
            truncation,
            format,
        } => {
            let a = read_wfa(&file_a)?;
            let b = read_wfa(&file_b)?;
            let opts = AakOptions {
                truncation,
                ..AakOptions::default()
            };
            let start = Instant::now();
            let v = verify_approximation(&a, &b, &opts)?;
            let doc = VerificationDocument::new(&v, elapsed_ms(start));
            writeln!(out, "{}", doc.render(format).trim_end())?;
            Ok(doc.passed)
        }
        Command::Bench {
            seeds,
            max_states,
            rho_cap,
            sequential,
        } => {
            let cfg = EnsembleConfig {
                max_states,
                rho_cap,
                ..EnsembleConfig::default()
            };
            // reject bad configurations before fanning out
            ensemble::random_instance(0, &cfg)?;
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            let list: Vec<u64> = (0..seeds).collect();
            let records = ensemble::run(&list, &cfg, exec);
            writeln!(
                out,
                "seed,n,k,sigma_k,aak_section_error,sva_trunc_error,allpass_r1,allpass_r2,\
                 allpass_r3,unimod_residual,l2_error,degenerate,millis"
            )?;
            for r in &records {
                writeln!(
                    out,
                    "{},{},{},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{},{:.3}",
                    r.seed,
                    r.n,
                    r.k,
                    r.sigma_k,
                    r.aak_section_error,
                    r.sva_trunc_error,
                    r.allpass[0],
                    r.allpass[1],
                    r.allpass[2],
                    r.unimod_residual,
                    r.l2_error,
                    r.degenerate,
                    r.millis
                )?;
                if let Some(e) = &r.error {
                    writeln!(err, "seed {}: {e}", r.seed)?;
                }
            }
            let passed = records.iter().filter(|r| r.passed).count();
            let better = records
                .iter()
                .filter(|r| r.aak_section_error < r.sva_trunc_error)
                .count();
            writeln!(
                err,
                "{passed} of {seeds} seeds passed every check; AAK beat truncation on {better}"
            )?;
            Ok(passed == records.len())
        }
    }
}

trait AtStage {
    fn at_stage(self, stage: Stage) -> CliError;
}

impl AtStage for wfa_aak::Error {
    fn at_stage(self, stage: Stage) -> CliError {
        CliError::Core(match self {
            e @ wfa_aak::Error::Stage { .. } => e,
            e => wfa_aak::Error::Stage {
                stage,
                source: Box::new(e),
            },
        })
    }
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match run(cli, out, err) {
        Ok(true) => 0,
        Ok(false) => {
            let _ = writeln!(err, "wfa-aak: some checks exceeded their thresholds");
            EXIT_CHECKS_FAILED
        }
        Err(e) => {
            let _ = writeln!(err, "wfa-aak: error in stage {}: {}", e.stage_name(), e.detail());
            e.exit_code()
        }
    }
}
