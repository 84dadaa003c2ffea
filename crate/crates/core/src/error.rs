//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building sequences, matrices, and
/// reports.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector had the wrong length for the requested operation.
    #[error("size error: {0}")]
    Size(String),

    /// Diagonal/off-diagonal lengths do not describe a tridiagonal matrix.
    #[error("shape error: diagonal has length {diagonal}, off-diagonal has length {offdiagonal} (expected {diagonal} - 1)")]
    Shape { diagonal: usize, offdiagonal: usize },

    /// A sequence definition is unusable (e.g. a random kind without a seed).
    #[error("configuration error: {0}")]
    Config(String),

    /// A value escaped the bound promised to `normalize_to_unit_box`.
    #[error("bound violation at k = {k}, index {index}: |{value}| > {bound}")]
    BoundViolation {
        k: usize,
        index: usize,
        value: f64,
        bound: f64,
    },

    /// A contraction factor r(k) was not strictly positive.
    #[error("scaling error: r({k}) = {value} must be positive")]
    Scaling { k: usize, value: f64 },

    /// `symmetrize_similar` requires strictly positive band products.
    #[error("similarity undefined: lower[{index}] * upper[{index}] = {product} is not positive")]
    SimilarityUndefined { index: usize, product: f64 },

    /// An eigensolver tolerance was not strictly positive.
    #[error("tolerance error: {0}")]
    Tolerance(String),

    /// An argument left the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Exact integer arithmetic would overflow.
    #[error("overflow guard: moment order {n} exceeds the exact-arithmetic limit {limit}")]
    OverflowGuard { n: u32, limit: u32 },

    /// A parameter was outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A ladder regression could not be carried out.
    #[error("regression error: {0}")]
    Regression(String),

    /// An ensemble id was not found in the registry.
    #[error("registry error: unknown ensemble id `{0}`")]
    Registry(String),
}
