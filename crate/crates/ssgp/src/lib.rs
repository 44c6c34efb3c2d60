//! Numerical laboratory for additive functionals of self-similar Gaussian
//! processes (fractional, sub-fractional and bi-fractional Brownian motion).
//!
//! The crate is organised around a covariance catalog ([`process_models`]),
//! exact path simulation ([`simulate`]), conditional-variance checks for
//! strong local nondeterminism ([`slnd`]), occupation functionals and
//! kernel local-time estimates ([`functionals`]), limiting constants
//! ([`spectral_constants`]), exact moment formulas for the limit mixture
//! ([`limit_moments`]) and a Monte Carlo experiment harness ([`harness`]).

pub mod functionals;
pub mod harness;
pub mod limit_moments;
pub mod process_models;
pub mod qmc;
pub mod quad;
pub mod rng;
pub mod simulate;
pub mod slnd;
pub mod spectral_constants;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("matrix not positive semi-definite: {0}")]
    NotPsd(String),
    #[error("circulant embedding failure: eigenvalue deficit {deficit:.3e} exceeds threshold")]
    EmbeddingFailure { deficit: f64 },
    #[error("kernel resolution too fine for grid: n = {n:.3e}, admissible max {max_n:.3e}")]
    Resolution { n: f64, max_n: f64 },
    #[error("parameter region violates theorem hypothesis: {0}")]
    Regime(String),
    #[error("hypothesis error: {0}")]
    Hypothesis(String),
    #[error("integrand not integrable for these parameters: {0}")]
    Integrability(String),
    #[error("all weights are zero; ratio undefined")]
    ZeroForm,
    #[error("empty sample")]
    EmptySample,
    #[error("config parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("config validation error: {0}")]
    Validation(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
