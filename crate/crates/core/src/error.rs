use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Pipeline stage that produced an error. Used by the CLI to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Minimize,
    Balance,
    Partition,
    Auxiliary,
    BlockDiagonalize,
    Verify,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Minimize => "minimize",
            Stage::Balance => "sva",
            Stage::Partition => "partition",
            Stage::Auxiliary => "auxiliary",
            Stage::BlockDiagonalize => "block-diagonalize",
            Stage::Verify => "verify",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid automaton: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("automaton is not irredundant: spectral radius {rho} is not below {limit}")]
    NotIrredundant { rho: f64, limit: f64 },

    #[error("automaton is not minimal: {0}")]
    NotMinimal(String),

    #[error("{routine} failed to converge on a {size}x{size} matrix")]
    NoConvergence { routine: &'static str, size: usize },

    #[error("singular system in {what} (condition estimate {condition:e})")]
    Singular { what: &'static str, condition: f64 },

    #[error("spectra overlap near eigenvalue {0}")]
    SpectraOverlap(Complex64),

    #[error("point {z} lies within {distance:e} of eigenvalue {eigenvalue}")]
    NearPole {
        z: Complex64,
        eigenvalue: Complex64,
        distance: f64,
    },

    #[error("{what}: residual {residual:e} exceeds bound {bound:e}")]
    Residual {
        what: &'static str,
        residual: f64,
        bound: f64,
    },

    #[error(
        "state count {k} cuts through a group of equal singular numbers (sigma = {sigma}); \
         try k = {below} or k = {above}"
    )]
    CutInsideMultiplicity {
        k: usize,
        sigma: f64,
        below: usize,
        above: usize,
    },

    #[error("inertia mismatch: {inside} eigenvalues inside the unit disc, expected {expected}")]
    Inertia { inside: usize, expected: usize },

    #[error("a complex-conjugate Schur block straddles the cut at {0}")]
    StraddledBlock(usize),

    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at(self, stage: Stage) -> Error {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// Stage that raised the error, if it came out of the pipeline.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }

    /// The innermost error, with stage wrappers removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| e.at(stage))
    }
}
