//! Jacobi matrices stored as their two bands.
//!
//! The dense k-by-k form never materializes here; test oracles build it
//! themselves when they need one.

use std::io::Write;

use crate::error::{Error, Result};
use crate::sequences::CoefficientSequence;

/// A real symmetric tridiagonal matrix: diagonal of length k, off-diagonal
/// of length k-1.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiMatrix {
    diagonal: Vec<f64>,
    offdiagonal: Vec<f64>,
}

impl JacobiMatrix {
    /// Builds the matrix from its bands.
    pub fn assemble(diagonal: Vec<f64>, offdiagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() || offdiagonal.len() != diagonal.len() - 1 {
            return Err(Error::Shape {
                diagonal: diagonal.len(),
                offdiagonal: offdiagonal.len(),
            });
        }
        Ok(Self { diagonal, offdiagonal })
    }

    /// Generates the size-k matrix of a coefficient sequence.
    pub fn from_sequence(seq: &CoefficientSequence, k: usize) -> Result<Self> {
        let (diag, off) = seq.generate(k)?;
        Self::assemble(diag, off)
    }

    /// Symmetrizes a tridiagonal matrix with bands `lower` and `upper` by the
    /// diagonal similarity that replaces both with sqrt(lower_i * upper_i).
    /// The result has the same spectrum as the non-symmetric input. Requires
    /// every product lower_i * upper_i to be strictly positive; the recursive
    /// construction of the similarity matrix itself is never formed (its
    /// entries underflow for large k).
    pub fn symmetrize_similar(
        diagonal: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Self> {
        if lower.len() != upper.len()
            || diagonal.is_empty()
            || lower.len() != diagonal.len() - 1
        {
            return Err(Error::Shape {
                diagonal: diagonal.len(),
                offdiagonal: lower.len().min(upper.len()),
            });
        }
        let mut offdiagonal = Vec::with_capacity(lower.len());
        for (i, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            let product = l * u;
            if !(product > 0.0) {
                return Err(Error::SimilarityUndefined { index: i, product });
            }
            offdiagonal.push(product.sqrt());
        }
        Ok(Self { diagonal, offdiagonal })
    }

    pub fn size(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn offdiagonal(&self) -> &[f64] {
        &self.offdiagonal
    }

    /// Sum of the diagonal (the matrix trace, exactly).
    pub fn trace(&self) -> f64 {
        self.diagonal.iter().sum()
    }

    /// sqrt(3) * (max |a_i| + max |b_i|): every eigenvalue lies in
    /// [-spectrum_bound, spectrum_bound].
    pub fn spectrum_bound(&self) -> f64 {
        let max_a = self.diagonal.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let max_b = self.offdiagonal.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        3.0_f64.sqrt() * (max_a + max_b)
    }

    /// Gershgorin interval [min a - 2 max |b|, max a + 2 max |b|]; tighter
    /// than the spectrum_bound interval and also guaranteed to contain the
    /// spectrum.
    pub fn gershgorin_interval(&self) -> (f64, f64) {
        let min_a = self.diagonal.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        let max_a = self.diagonal.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v));
        let max_b = self.offdiagonal.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        (min_a - 2.0 * max_b, max_a + 2.0 * max_b)
    }

    /// Debug dump: CSV with columns index,diag,offdiag; the off-diagonal cell
    /// is blank on the last row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "index,diag,offdiag")?;
        for (i, &d) in self.diagonal.iter().enumerate() {
            if let Some(&b) = self.offdiagonal.get(i) {
                writeln!(out, "{},{},{}", i + 1, fmt(d), fmt(b))?;
            } else {
                writeln!(out, "{},{},", i + 1, fmt(d))?;
            }
        }
        Ok(())
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}
