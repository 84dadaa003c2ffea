//! Moment traces: the exact power sums of a spectrum against their
//! combinatorial approximation
//! sum_j n!/(j!^2 (n-2j)!) * sum_i a_i^(n-2j) b_i^(2j).
//!
//! The inner sum runs over all k indices while only k-1 off-diagonal
//! entries exist; the phantom entry b_k := b_(k-1) closes the gap (any
//! bounded choice shifts the sum by O(1)). Coefficients are exact integers
//! up to n = 40.

use crate::eigensolve::{all_eigenvalues_default, Spectrum};
use crate::error::{Error, Result};
use crate::jacobi::JacobiMatrix;
use crate::sequences::CoefficientSequence;

/// Largest moment order with exact u128 coefficient arithmetic.
pub const MAX_MOMENT_ORDER: u32 = 40;

/// One rung of a moment-deviation ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub n: u32,
    pub k: usize,
    /// sum of lambda^n over the computed spectrum
    pub exact_trace: f64,
    /// the combinatorial approximation
    pub approx_trace: f64,
    /// |exact - approx| / k
    pub deviation_per_k: f64,
}

/// Exact value of n! / (j!^2 (n-2j)!), computed as C(n, 2j) * C(2j, j).
pub fn multinomial_coeff(n: u32, j: u32) -> Result<u128> {
    if 2 * j > n {
        return Err(Error::Domain(format!(
            "multinomial coefficient needs 2j <= n, got n = {n}, j = {j}"
        )));
    }
    if n > MAX_MOMENT_ORDER {
        return Err(Error::OverflowGuard {
            n,
            limit: MAX_MOMENT_ORDER,
        });
    }
    Ok(binomial(n, 2 * j) * binomial(2 * j, j))
}

/// C(n, r) in exact u128 arithmetic; every intermediate division is exact.
fn binomial(n: u32, r: u32) -> u128 {
    let r = r.min(n - r);
    let mut c: u128 = 1;
    for i in 1..=r as u128 {
        c = c * (n as u128 - r as u128 + i) / i;
    }
    c
}

/// Extends the off-diagonal vector by the phantom entry b_k := b_(k-1)
/// (0 when no off-diagonal entries exist).
pub fn phantom_padded(offdiagonal: &[f64]) -> Vec<f64> {
    let mut padded = offdiagonal.to_vec();
    padded.push(offdiagonal.last().copied().unwrap_or(0.0));
    padded
}

/// Coefficient pairs (a_i, b_i) for i = 1..k, with the phantom b_k.
pub fn coefficient_pairs(diagonal: &[f64], offdiagonal: &[f64]) -> Vec<(f64, f64)> {
    diagonal
        .iter()
        .copied()
        .zip(phantom_padded(offdiagonal))
        .collect()
}

/// The combinatorial approximation of Trace[J^n] from coefficient vectors.
/// 0^0 counts as 1.
pub fn approx_moment_trace(diagonal: &[f64], offdiagonal: &[f64], n: u32) -> Result<f64> {
    if diagonal.is_empty() || offdiagonal.len() != diagonal.len() - 1 {
        return Err(Error::Shape {
            diagonal: diagonal.len(),
            offdiagonal: offdiagonal.len(),
        });
    }
    approx_moment_trace_pairs(&coefficient_pairs(diagonal, offdiagonal), n)
}

fn approx_moment_trace_pairs(pairs: &[(f64, f64)], n: u32) -> Result<f64> {
    let mut total = 0.0;
    for j in 0..=n / 2 {
        let coeff = multinomial_coeff(n, j)? as f64;
        let inner: f64 = pairs
            .iter()
            .map(|&(a, b)| a.powi((n - 2 * j) as i32) * b.powi(2 * j as i32))
            .sum();
        total += coeff * inner;
    }
    Ok(total)
}

/// Runs the moment comparison along a ladder of sizes. The exact trace is
/// the power sum of the certified spectrum at each k.
pub fn moment_deviation_ladder(
    seq: &CoefficientSequence,
    n: u32,
    ks: &[usize],
) -> Result<Vec<MomentReport>> {
    validate_ladder(ks)?;
    ks.iter()
        .map(|&k| {
            let (diag, off) = seq.generate(k)?;
            let matrix = JacobiMatrix::assemble(diag.clone(), off.clone())?;
            let spectrum = all_eigenvalues_default(&matrix)?;
            Ok(moment_report(&spectrum, &diag, &off, n)?)
        })
        .collect()
}

/// Single-k report from an already-computed spectrum.
pub fn moment_report(
    spectrum: &Spectrum,
    diagonal: &[f64],
    offdiagonal: &[f64],
    n: u32,
) -> Result<MomentReport> {
    let exact = spectrum.power_sum(n);
    let approx = approx_moment_trace(diagonal, offdiagonal, n)?;
    let k = diagonal.len();
    Ok(MomentReport {
        n,
        k,
        exact_trace: exact,
        approx_trace: approx,
        deviation_per_k: (exact - approx).abs() / k as f64,
    })
}

pub(crate) fn validate_ladder(ks: &[usize]) -> Result<()> {
    if ks.is_empty() {
        return Err(Error::Parameter("ladder of sizes is empty".into()));
    }
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter(format!(
            "ladder must be strictly increasing, got {ks:?}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::FunctionSpec;

    #[test]
    fn coefficient_values() {
        assert_eq!(multinomial_coeff(2, 1).unwrap(), 2);
        assert_eq!(multinomial_coeff(4, 1).unwrap(), 12);
        assert_eq!(multinomial_coeff(4, 2).unwrap(), 6);
        assert_eq!(multinomial_coeff(6, 3).unwrap(), 20);
        assert_eq!(multinomial_coeff(0, 0).unwrap(), 1);
    }

    #[test]
    fn coefficient_domain_errors() {
        assert!(matches!(multinomial_coeff(2, 2), Err(Error::Domain(_))));
        assert!(matches!(
            multinomial_coeff(41, 0),
            Err(Error::OverflowGuard { n: 41, limit: 40 })
        ));
        // The largest coefficients at n = 40 must still be representable.
        assert!(multinomial_coeff(40, 13).unwrap() > 0);
    }

    #[test]
    fn approx_trace_constant_sequence() {
        let a = vec![0.5; 4];
        let b = vec![0.25; 3];
        // n = 2: sum a^2 + 2 * sum b^2 with the phantom fourth entry.
        let got = approx_moment_trace(&a, &b, 2).unwrap();
        assert!((got - 1.5).abs() < 1e-15);
    }

    #[test]
    fn first_moment_is_diagonal_sum() {
        let a = vec![0.1, 0.9, 0.4];
        let b = vec![0.7, 0.3];
        let got = approx_moment_trace(&a, &b, 1).unwrap();
        assert!((got - 1.4).abs() < 1e-15);
        assert_eq!(approx_moment_trace(&a, &b, 0).unwrap(), 3.0);
    }

    #[test]
    fn fourth_moment_on_unit_toeplitz() {
        // Trace[T_k(0,1)^4] = 6k - 10 for k >= 4 (count closed 4-walks on
        // the path graph), so the approximation 6k misses by exactly 10.
        let k = 6;
        let a = vec![0.0; k];
        let b = vec![1.0; k - 1];
        let approx = approx_moment_trace(&a, &b, 4).unwrap();
        assert_eq!(approx, 6.0 * k as f64);
        let m = JacobiMatrix::assemble(a.clone(), b.clone()).unwrap();
        let s = all_eigenvalues_default(&m).unwrap();
        let exact = s.power_sum(4);
        assert!((exact - 26.0).abs() < 1e-7, "exact = {exact}");
        let report = moment_report(&s, &a, &b, 4).unwrap();
        assert!((report.deviation_per_k - 10.0 / 6.0).abs() < 1e-7);
    }

    #[test]
    fn zero_to_the_zero_counts_as_one() {
        let a = vec![0.0, 0.0];
        let b = vec![0.0];
        // n = 2, j = 1 term is 2 * sum b^2 = 0, j = 0 term is sum a^2 = 0,
        // and n = 0 must still count every index once.
        assert_eq!(approx_moment_trace(&a, &b, 0).unwrap(), 2.0);
        assert_eq!(approx_moment_trace(&a, &b, 2).unwrap(), 0.0);
    }

    #[test]
    fn pair_sum_is_reversal_invariant() {
        let pairs = vec![(0.3, 0.9), (0.1, 0.2), (0.8, 0.5), (0.4, 0.7)];
        let mut reversed = pairs.clone();
        reversed.reverse();
        for n in 0..=8 {
            let x = approx_moment_trace_pairs(&pairs, n).unwrap();
            let y = approx_moment_trace_pairs(&reversed, n).unwrap();
            // identical terms, summed in the opposite order
            assert!((x - y).abs() <= 1e-14 * x.abs().max(1.0), "n={n}: {x} vs {y}");
        }
    }

    #[test]
    fn ladder_validation() {
        assert!(matches!(validate_ladder(&[]), Err(Error::Parameter(_))));
        assert!(matches!(
            validate_ladder(&[10, 10]),
            Err(Error::Parameter(_))
        ));
        assert!(validate_ladder(&[10, 20, 40]).is_ok());
    }

    #[test]
    fn ladder_orders_zero_and_two() {
        let seq = CoefficientSequence::constant("const", 0.5, 0.25);
        let ks = [8, 16, 32];
        let zero = moment_deviation_ladder(&seq, 0, &ks).unwrap();
        for r in &zero {
            assert!(r.deviation_per_k < 1e-12);
            assert_eq!(r.approx_trace, r.k as f64);
        }
        // n = 2: the phantom entry contributes exactly 2 b_k^2.
        let two = moment_deviation_ladder(&seq, 2, &ks).unwrap();
        for r in &two {
            let phantom = 2.0 * 0.25_f64.powi(2);
            assert!((r.deviation_per_k - phantom / r.k as f64).abs() < 1e-9);
            assert!(r.deviation_per_k <= 2.0 / r.k as f64);
        }
    }

    #[test]
    fn ramp_deviation_decays() {
        let seq = CoefficientSequence::sampled(
            "ramp",
            FunctionSpec::Linear { slope: 1.0, intercept: 0.0 },
            FunctionSpec::Constant { value: 0.5 },
        );
        let reports = moment_deviation_ladder(&seq, 3, &[250, 500, 1000, 2000]).unwrap();
        for w in reports.windows(2) {
            assert!(
                w[1].deviation_per_k < w[0].deviation_per_k,
                "no decay: {:?} -> {:?}",
                w[0],
                w[1]
            );
        }
    }
}
