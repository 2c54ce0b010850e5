//! JSON encoding of one-letter WFAs.
//!
//! ```json
//! {
//!   "alphabet_size": 1,
//!   "states": 2,
//!   "alpha": [0.8660254037844386, 0.0],
//!   "matrix": [[0.0, 0.5], [0.5, 0.0]],
//!   "beta": [0.8660254037844386, 0.0],
//!   "metadata": {"name": "example"}
//! }
//! ```
//!
//! Floats are written in shortest round-trip form, so parsing an emitted
//! document reproduces the automaton bit for bit.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use wfa_aak::Wfa;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WfaDocument {
    pub alphabet_size: u64,
    pub states: u64,
    pub alpha: Vec<f64>,
    /// Row-major transition matrix.
    pub matrix: Vec<Vec<f64>>,
    pub beta: Vec<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Error, PartialEq)]
pub enum DocumentError {
    #[error("malformed document at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("only one-letter alphabets are supported, but alphabet_size is {0}")]
    Alphabet(u64),
    #[error("field `{field}`: {message}")]
    Dimension { field: String, message: String },
    #[error("field `{field}`: entry {index} is not a finite number")]
    NotFinite { field: String, index: String },
}

impl WfaDocument {
    pub fn from_wfa(w: &Wfa) -> WfaDocument {
        let n = w.states();
        WfaDocument {
            alphabet_size: 1,
            states: n as u64,
            alpha: w.alpha().iter().copied().collect(),
            matrix: (0..n).map(|i| w.trans().row(i).iter().copied().collect()).collect(),
            beta: w.beta().iter().copied().collect(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<String>) -> WfaDocument {
        self.metadata.insert(key.to_owned(), value.into());
        self
    }

    /// Checks the document and builds the automaton.
    pub fn to_wfa(&self) -> Result<Wfa, DocumentError> {
        if self.alphabet_size != 1 {
            return Err(DocumentError::Alphabet(self.alphabet_size));
        }
        let n = self.states as usize;
        if n == 0 {
            return Err(dimension("states", "must be at least 1".into()));
        }
        let check_vec = |field: &str, v: &[f64]| -> Result<(), DocumentError> {
            if v.len() != n {
                return Err(dimension(field, format!("has {} entries, expected {n}", v.len())));
            }
            if let Some(i) = v.iter().position(|x| !x.is_finite()) {
                return Err(DocumentError::NotFinite {
                    field: field.into(),
                    index: i.to_string(),
                });
            }
            Ok(())
        };
        check_vec("alpha", &self.alpha)?;
        check_vec("beta", &self.beta)?;
        if self.matrix.len() != n {
            return Err(dimension(
                "matrix",
                format!("has {} rows, expected {n}", self.matrix.len()),
            ));
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != n {
                return Err(dimension(
                    "matrix",
                    format!("row {i} has {} entries, expected {n}", row.len()),
                ));
            }
            if let Some(j) = row.iter().position(|x| !x.is_finite()) {
                return Err(DocumentError::NotFinite {
                    field: "matrix".into(),
                    index: format!("({i}, {j})"),
                });
            }
        }
        let trans = DMatrix::from_fn(n, n, |i, j| self.matrix[i][j]);
        Wfa::new(
            DVector::from_column_slice(&self.alpha),
            trans,
            DVector::from_column_slice(&self.beta),
        )
        .map_err(|e| dimension("matrix", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }
}

fn dimension(field: &str, message: String) -> DocumentError {
    DocumentError::Dimension {
        field: field.into(),
        message,
    }
}

pub fn parse_document(text: &str) -> Result<WfaDocument, DocumentError> {
    serde_json::from_str(text).map_err(|e| DocumentError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parses and validates a WFA document.
pub fn parse_wfa(text: &str) -> Result<Wfa, DocumentError> {
    parse_document(text)?.to_wfa()
}

pub fn emit_wfa(w: &Wfa) -> String {
    WfaDocument::from_wfa(w).to_json()
}
