//! Small-deviation diagnostics: total variation, magnitude growth,
//! monotonicity, and grid discrepancy of coefficient vectors.
//!
//! Membership in the small-deviation classes is an asymptotic statement and
//! cannot be decided from finitely many sizes. These routines report
//! measured slopes and ratios on a user-supplied ladder; the fixed
//! classification thresholds are heuristics and are documented as such.

use crate::error::{Error, Result};
use crate::moments::validate_ladder;
use crate::sequences::CoefficientSequence;

/// Measured tv exponents below this are reported as consistent with the
/// o(k) total-variation condition. Heuristic.
pub const TV_EXPONENT_THRESHOLD: f64 = 0.9;

/// Relative growth of max_abs across the ladder below this counts as
/// bounded. Heuristic.
const BOUNDED_GROWTH_FRACTION: f64 = 0.05;

/// Power-law slopes of max_abs above this are reported as faster than
/// logarithmic. Heuristic.
const LOG_GROWTH_MAX_SLOPE: f64 = 0.4;

/// Which band of a coefficient sequence a diagnostic runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Diagonal,
    OffDiagonal,
}

/// Per-size summary of one coefficient vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub k: usize,
    /// sum |a_(i+1) - a_i|
    pub total_variation: f64,
    pub tv_per_k: f64,
    pub max_abs: f64,
    pub max_abs_per_logk: f64,
    /// fraction of consecutive pairs with a_i <= a_(i+1)
    pub monotone_fraction: f64,
    /// max_i max(|a_i - i/k|, |a_i - (i-1)/k|); present only when the
    /// vector lies in [0, 1]
    pub discrepancy: Option<f64>,
}

/// Growth classification of max |a_i| along a ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxAbsGrowth {
    Bounded,
    Logarithmic,
    Faster,
}

/// Ladder regression summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSlope {
    /// least-squares slope of log(total_variation + 1) against log k
    pub tv_exponent: f64,
    pub maxabs_growth: MaxAbsGrowth,
}

impl ClassSlope {
    /// Heuristic verdict on the o(k) total-variation condition.
    pub fn consistent_with_small_deviation(&self) -> bool {
        self.tv_exponent < TV_EXPONENT_THRESHOLD
    }
}

/// Computes every field of [`DeviationReport`] from a single vector.
pub fn deviation_report(values: &[f64]) -> Result<DeviationReport> {
    let k = values.len();
    if k < 2 {
        return Err(Error::Size(format!(
            "deviation report needs at least 2 values, got {k}"
        )));
    }
    let total_variation: f64 = values.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    let max_abs = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let ascending = values.windows(2).filter(|w| w[0] <= w[1]).count();
    let in_unit_box = values.iter().all(|v| (0.0..=1.0).contains(v));
    let discrepancy = in_unit_box.then(|| {
        let kf = k as f64;
        values
            .iter()
            .enumerate()
            .map(|(idx, &a)| {
                let i = (idx + 1) as f64;
                (a - i / kf).abs().max((a - (i - 1.0) / kf).abs())
            })
            .fold(0.0_f64, f64::max)
    });
    Ok(DeviationReport {
        k,
        total_variation,
        tv_per_k: total_variation / k as f64,
        max_abs,
        max_abs_per_logk: max_abs / (k as f64).ln(),
        monotone_fraction: ascending as f64 / (k - 1) as f64,
        discrepancy,
    })
}

/// One deviation report per ladder entry, on the chosen band.
pub fn deviation_ladder(
    seq: &CoefficientSequence,
    band: Band,
    ks: &[usize],
) -> Result<Vec<DeviationReport>> {
    validate_ladder(ks)?;
    ks.iter()
        .map(|&k| deviation_report(&band_values(seq, band, k)?))
        .collect()
}

/// Regresses the ladder reports into a tv exponent and a growth class.
pub fn class_slope(seq: &CoefficientSequence, band: Band, ks: &[usize]) -> Result<ClassSlope> {
    if ks.len() < 4 {
        return Err(Error::Regression(format!(
            "class_slope needs a ladder of at least 4 sizes, got {}",
            ks.len()
        )));
    }
    validate_ladder(ks).map_err(|e| Error::Regression(e.to_string()))?;
    let reports = ks
        .iter()
        .map(|&k| deviation_report(&band_values(seq, band, k)?))
        .collect::<Result<Vec<_>>>()?;

    let log_ks: Vec<f64> = ks.iter().map(|&k| (k as f64).ln()).collect();
    let log_tv: Vec<f64> = reports
        .iter()
        .map(|r| (r.total_variation + 1.0).ln())
        .collect();
    let (tv_exponent, _) = linear_fit(&log_ks, &log_tv)?;

    let max_abs: Vec<f64> = reports.iter().map(|r| r.max_abs).collect();
    let scale = max_abs.iter().fold(0.0_f64, |m, v| m.max(*v));
    let maxabs_growth = if scale == 0.0 {
        MaxAbsGrowth::Bounded
    } else {
        let (slope, _) = linear_fit(&log_ks, &max_abs)?;
        let span = log_ks.last().unwrap() - log_ks[0];
        if (slope * span).abs() < BOUNDED_GROWTH_FRACTION * scale {
            MaxAbsGrowth::Bounded
        } else {
            let log_max: Vec<f64> = max_abs.iter().map(|v| v.max(1e-300).ln()).collect();
            let (power, _) = linear_fit(&log_ks, &log_max)?;
            if power < LOG_GROWTH_MAX_SLOPE {
                MaxAbsGrowth::Logarithmic
            } else {
                MaxAbsGrowth::Faster
            }
        }
    };
    Ok(ClassSlope {
        tv_exponent,
        maxabs_growth,
    })
}

fn band_values(seq: &CoefficientSequence, band: Band, k: usize) -> Result<Vec<f64>> {
    let (diag, off) = seq.generate(k)?;
    Ok(match band {
        Band::Diagonal => diag,
        Band::OffDiagonal => off,
    })
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Regression("degenerate ladder: all sizes equal".into()));
    }
    let sxy: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    Ok((slope, mean_y - slope * mean_x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{FunctionSpec, RandomModel};

    fn ramp() -> CoefficientSequence {
        CoefficientSequence::sampled(
            "ramp",
            FunctionSpec::Linear { slope: 1.0, intercept: 0.0 },
            FunctionSpec::Constant { value: 0.5 },
        )
    }

    #[test]
    fn ramp_report() {
        let values: Vec<f64> = (1..=5).map(|i| i as f64 / 5.0).collect();
        let r = deviation_report(&values).unwrap();
        assert!((r.total_variation - 0.8).abs() < 1e-15);
        assert_eq!(r.monotone_fraction, 1.0);
        assert!((r.discrepancy.unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn constant_report() {
        let r = deviation_report(&[0.3; 10]).unwrap();
        assert_eq!(r.total_variation, 0.0);
        assert_eq!(r.monotone_fraction, 1.0);
    }

    #[test]
    fn alternating_report_flags_high_variation() {
        let values: Vec<f64> = (0..100).map(|i| (i % 2) as f64).collect();
        let r = deviation_report(&values).unwrap();
        assert_eq!(r.total_variation, 99.0);
        assert!((r.tv_per_k - 0.99).abs() < 1e-15);
    }

    #[test]
    fn report_needs_two_values() {
        assert!(matches!(deviation_report(&[1.0]), Err(Error::Size(_))));
    }

    #[test]
    fn total_variation_is_reversal_invariant() {
        let values = [0.4, 0.1, 0.9, 0.3, 0.6];
        let mut reversed = values;
        reversed.reverse();
        let a = deviation_report(&values).unwrap();
        let b = deviation_report(&reversed).unwrap();
        assert_eq!(a.total_variation, b.total_variation);
    }

    #[test]
    fn monotone_fraction_matches_direct_count() {
        let values = [0.1, 0.3, 0.2, 0.2, 0.8, 0.5];
        let r = deviation_report(&values).unwrap();
        let mut count = 0;
        for i in 0..values.len() - 1 {
            if values[i] <= values[i + 1] {
                count += 1;
            }
        }
        assert_eq!(r.monotone_fraction, count as f64 / 5.0);
    }

    #[test]
    fn discrepancy_absent_outside_unit_box() {
        let r = deviation_report(&[-0.5, 0.5, 2.0]).unwrap();
        assert!(r.discrepancy.is_none());
    }

    #[test]
    fn ramp_slope_is_flat() {
        let ks = [1000, 2154, 4642, 10000];
        let slope = class_slope(&ramp(), Band::Diagonal, &ks).unwrap();
        assert!(slope.tv_exponent.abs() < 0.05, "{}", slope.tv_exponent);
        assert_eq!(slope.maxabs_growth, MaxAbsGrowth::Bounded);
        assert!(slope.consistent_with_small_deviation());
    }

    #[test]
    fn iid_noise_slope_is_near_one() {
        let seq = CoefficientSequence::random("noise", RandomModel::UniformIid, 5);
        let ks = [1000, 2154, 4642, 10000];
        let slope = class_slope(&seq, Band::Diagonal, &ks).unwrap();
        assert!((slope.tv_exponent - 1.0).abs() < 0.05, "{}", slope.tv_exponent);
        assert!(!slope.consistent_with_small_deviation());
    }

    #[test]
    fn logarithmic_growth_is_classified() {
        let table: Vec<f64> = (1..=10_000).map(|i| ((i + 1) as f64).ln()).collect();
        let seq = CoefficientSequence::explicit_table("log", table.clone(), table);
        let ks = [1000, 2154, 4642, 10000];
        let slope = class_slope(&seq, Band::Diagonal, &ks).unwrap();
        assert_eq!(slope.maxabs_growth, MaxAbsGrowth::Logarithmic);
    }

    #[test]
    fn power_growth_is_classified_faster() {
        let table: Vec<f64> = (1..=10_000).map(|i| (i as f64).sqrt()).collect();
        let seq = CoefficientSequence::explicit_table("sqrt", table.clone(), table);
        let ks = [1000, 2154, 4642, 10000];
        let slope = class_slope(&seq, Band::Diagonal, &ks).unwrap();
        assert_eq!(slope.maxabs_growth, MaxAbsGrowth::Faster);
    }

    #[test]
    fn short_ladder_is_a_regression_error() {
        let err = class_slope(&ramp(), Band::Diagonal, &[10, 20, 30]);
        assert!(matches!(err, Err(Error::Regression(_))));
    }
}
