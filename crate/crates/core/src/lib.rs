//! Optimal spectral-norm approximation of one-letter weighted finite
//! automata.
//!
//! Given an irredundant WFA `(α, A, β)` computing `f(t) = αᵀ Aᵗ β`, the
//! [`aak`] pipeline returns a `k`-state WFA whose Hankel matrix is the best
//! rank-`k` Hankel approximation of `f` in spectral norm, together with the
//! certified error `σ_k`.
//!
//! ```
//! use wfa_aak::{aak::{aak_approximation, AakOptions}, Wfa};
//!
//! let h = 3f64.sqrt() / 2.0;
//! let w = Wfa::from_rows(&[h, 0.0], &[vec![0.0, 0.5], vec![0.5, 0.0]], &[h, 0.0]).unwrap();
//! let report = aak_approximation(&w, 1, &AakOptions::default()).unwrap();
//! assert!((report.sigma_k - 0.2).abs() < 1e-12);
//! assert_eq!(report.approximant.states(), 1);
//! ```

pub mod aak;
pub mod ensemble;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod par;
pub mod sva;
pub mod wfa;

pub use error::{Error, Result, Stage};
pub use sva::SvaModel;
pub use wfa::Wfa;
