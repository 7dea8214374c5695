//! Exact and p-adic special values attached to Shintani cone decompositions
//! over Q and real quadratic fields: Shintani and Lerch zeta values at
//! non-positive integers, Hecke L-values, p-adic polylogarithms on torsion
//! points and p-adic Hecke L-functions.

pub mod arith;
pub mod cache;
pub mod cli;
pub mod cones;
pub mod cyclo;
pub mod exact;
pub mod field;
pub mod padic;
pub mod series;
pub mod torsion;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verification(String),
}
