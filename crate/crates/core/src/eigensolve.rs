//! Eigenvalues of Jacobi matrices by Sturm-sequence bisection.
//!
//! The signed LDL^T pivot count gives, for any shift x, the number of
//! eigenvalues strictly below x. Bisecting on that count brackets every
//! eigenvalue inside the Gershgorin interval to a requested absolute width,
//! which doubles as a certified error bound. Brackets for distinct
//! eigenvalue indices are independent, so the solve parallelizes over
//! indices and stays deterministic.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jacobi::JacobiMatrix;

/// Pivots smaller than this in magnitude are replaced by the same value with
/// the pivot's sign, keeping the LDL^T recurrence finite.
pub const STURM_PIVOT_GUARD: f64 = 1e-290;

/// Bisection stops when a bracket is narrower than this times max(1, M),
/// unless the caller asks for something else.
pub const DEFAULT_TOLERANCE_FACTOR: f64 = 1e-10;

/// All eigenvalues of one matrix, sorted ascending, with the bracket width
/// the bisection guaranteed.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    residual_bound: f64,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Guaranteed bound on the absolute error of every eigenvalue.
    pub fn residual_bound(&self) -> f64 {
        self.residual_bound
    }

    /// Sum of n-th powers of the eigenvalues (the trace of J^n).
    pub fn power_sum(&self, n: u32) -> f64 {
        self.eigenvalues.iter().map(|l| l.powi(n as i32)).sum()
    }

    /// (1/k) sum of phi over the eigenvalues.
    pub fn trace_average<F: Fn(f64) -> f64>(&self, phi: F) -> f64 {
        self.eigenvalues.iter().map(|&l| phi(l)).sum::<f64>() / self.k() as f64
    }
}

/// Number of eigenvalues of `matrix` strictly less than `x`.
pub fn sturm_count(matrix: &JacobiMatrix, x: f64) -> Result<usize> {
    if x.is_nan() {
        return Err(Error::Domain("sturm_count shift is NaN".into()));
    }
    let off_sq: Vec<f64> = matrix.offdiagonal().iter().map(|b| b * b).collect();
    Ok(count_below(matrix.diagonal(), &off_sq, x))
}

fn count_below(diag: &[f64], off_sq: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut pivot = diag[0] - x;
    if pivot < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let safe = if pivot.abs() < STURM_PIVOT_GUARD {
            if pivot.is_sign_negative() {
                -STURM_PIVOT_GUARD
            } else {
                STURM_PIVOT_GUARD
            }
        } else {
            pivot
        };
        pivot = (diag[i] - x) - off_sq[i - 1] / safe;
        if pivot < 0.0 {
            count += 1;
        }
    }
    count
}

/// Default absolute tolerance for a matrix: 1e-10 * max(1, spectrum bound).
pub fn default_tolerance(matrix: &JacobiMatrix) -> f64 {
    DEFAULT_TOLERANCE_FACTOR * matrix.spectrum_bound().max(1.0)
}

/// Shifts processed per band sweep. Divisions for distinct shifts are
/// independent, so interleaving them hides the division latency that
/// dominates a one-shift-at-a-time sweep.
const LANES: usize = 8;

fn count_below_lanes(diag: &[f64], off_sq: &[f64], shifts: &[f64; LANES]) -> [u32; LANES] {
    let mut counts = [0u32; LANES];
    let mut pivots = [0.0f64; LANES];
    for l in 0..LANES {
        pivots[l] = diag[0] - shifts[l];
        counts[l] += (pivots[l] < 0.0) as u32;
    }
    for i in 1..diag.len() {
        let d = diag[i];
        let b2 = off_sq[i - 1];
        for l in 0..LANES {
            let p = pivots[l];
            let safe = p.signum() * p.abs().max(STURM_PIVOT_GUARD);
            let next = (d - shifts[l]) - b2 / safe;
            counts[l] += (next < 0.0) as u32;
            pivots[l] = next;
        }
    }
    counts
}

/// All eigenvalues, each bracketed to width at most `abs_tol`.
///
/// Every eigenvalue index j keeps the invariant count(lo_j) <= j <
/// count(hi_j), so the (j+1)-smallest eigenvalue stays inside its bracket.
/// One round halves every unconverged bracket; the shift batch for a round
/// is evaluated lane-parallel per sweep and the lane chunks run on the
/// rayon pool. The outcome is independent of the execution order.
pub fn all_eigenvalues(matrix: &JacobiMatrix, abs_tol: f64) -> Result<Spectrum> {
    if !(abs_tol > 0.0) {
        return Err(Error::Tolerance(format!(
            "bisection tolerance must be positive, got {abs_tol}"
        )));
    }
    let k = matrix.size();
    let diag = matrix.diagonal();
    let off_sq: Vec<f64> = matrix.offdiagonal().iter().map(|b| b * b).collect();
    let (glo, ghi) = matrix.gershgorin_interval();
    let pad = abs_tol + (ghi - glo).abs() * 1e-12 + 1e-300;

    let mut lo = vec![glo - pad; k];
    let mut hi = vec![ghi + pad; k];
    for _ in 0..256 {
        let converged = std::sync::atomic::AtomicBool::new(true);
        lo.par_chunks_mut(LANES)
            .zip(hi.par_chunks_mut(LANES))
            .enumerate()
            .for_each(|(chunk, (lo_chunk, hi_chunk))| {
                let base = chunk * LANES;
                let mut shifts = [0.0f64; LANES];
                let mut active = false;
                for l in 0..lo_chunk.len() {
                    shifts[l] = 0.5 * (lo_chunk[l] + hi_chunk[l]);
                    let open = hi_chunk[l] - lo_chunk[l] > abs_tol
                        && shifts[l] > lo_chunk[l]
                        && shifts[l] < hi_chunk[l];
                    active |= open;
                }
                if !active {
                    return;
                }
                // Padding lanes reuse the first shift; their counts are
                // ignored.
                for l in lo_chunk.len()..LANES {
                    shifts[l] = shifts[0];
                }
                let counts = count_below_lanes(diag, &off_sq, &shifts);
                for l in 0..lo_chunk.len() {
                    let mid = shifts[l];
                    if hi_chunk[l] - lo_chunk[l] <= abs_tol || mid <= lo_chunk[l] || mid >= hi_chunk[l] {
                        continue;
                    }
                    if (counts[l] as usize) <= base + l {
                        lo_chunk[l] = mid;
                    } else {
                        hi_chunk[l] = mid;
                    }
                    if hi_chunk[l] - lo_chunk[l] > abs_tol {
                        converged.store(false, std::sync::atomic::Ordering::Relaxed);
                    }
                }
            });
        if converged.load(std::sync::atomic::Ordering::Relaxed) {
            break;
        }
    }

    let mut eigenvalues: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
    // Brackets for near-degenerate neighbors can land out of order by less
    // than abs_tol.
    eigenvalues.sort_by(f64::total_cmp);
    Ok(Spectrum {
        eigenvalues,
        residual_bound: abs_tol,
    })
}

/// `all_eigenvalues` with the default tolerance.
pub fn all_eigenvalues_default(matrix: &JacobiMatrix) -> Result<Spectrum> {
    all_eigenvalues(matrix, default_tolerance(matrix))
}
