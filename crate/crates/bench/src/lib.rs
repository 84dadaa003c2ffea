//! Shared fixtures for the criterion benchmarks.

use jacobi_spectra::ensembles::{builtin, Ensemble, EnsembleParams};
use jacobi_spectra::JacobiMatrix;

pub fn toeplitz(a: f64, b: f64, k: usize) -> JacobiMatrix {
    JacobiMatrix::assemble(vec![a; k], vec![b; k - 1]).unwrap()
}

pub fn fixture(id: &str) -> Ensemble {
    builtin(
        id,
        &EnsembleParams {
            seed: Some(7),
            ..Default::default()
        },
    )
    .unwrap()
}
