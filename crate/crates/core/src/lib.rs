//! Structured Jacobi matrices, their spectra, and the asymptotic limits of
//! their trace averages.
//!
//! A Jacobi matrix here is a real symmetric tridiagonal matrix defined by a
//! diagonal vector a^k and an off-diagonal vector b^k. When the coefficient
//! pairs (a_j, b_j) equidistribute according to a probability measure mu on
//! the plane and the per-size vectors vary slowly, the normalized trace of
//! phi(J) converges to
//!
//! ```text
//! L(phi) = (1/pi) \int \int_0^pi phi(x + 2 y cos t) dt dmu(x, y)
//! ```
//!
//! This crate generates such coefficient sequences, computes certified
//! spectra by Sturm bisection, evaluates L(phi) for several measure
//! representations, and quantifies the finite-size gap between the two sides
//! along ladders of growing k. Classical families (constant bands, Hermite,
//! Laguerre, Van Vleck, power-sampled curves) come pre-wired with their
//! limit measures and, where one exists in closed form, the induced spectral
//! density (arcsine, semicircle, Marchenko-Pastur, Nevai-Ullman).
//!
//! Entry points:
//! - [`sequences::CoefficientSequence`] and [`ensembles::builtin`] to define
//!   coefficient data,
//! - [`eigensolve::all_eigenvalues`] for spectra with certified error bars,
//! - [`traceformula::convergence_ladder`] for empirical-vs-limit reports,
//! - [`moments::moment_deviation_ladder`] for the combinatorial moment
//!   comparison,
//! - [`distribution::helly_subsequence`] for subsequence extraction when no
//!   joint limit exists.

pub mod deviation;
pub mod distribution;
pub mod eigensolve;
pub mod ensembles;
pub mod error;
pub mod jacobi;
pub mod measures;
pub mod moments;
pub mod quad;
pub mod sequences;
pub mod traceformula;

pub use error::{Error, Result};
pub use jacobi::JacobiMatrix;
pub use eigensolve::Spectrum;
pub use measures::{DensityCurve, LimitMeasure, Rect};
pub use sequences::CoefficientSequence;
