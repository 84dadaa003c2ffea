//! Empirical joint distribution of coefficient pairs, discrepancy against a
//! candidate limit measure, and subsequence extraction by stabilization of
//! the joint CDFs.
//!
//! The joint CDF uses strict inequalities: F_k(x, y) counts pairs with
//! a_j < x and b_j < y. A grid rectangle that strictly contains the pairs
//! therefore reports 1 at its top-right corner.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{LimitMeasure, Rect};
use crate::moments::{coefficient_pairs, validate_ladder};
use crate::sequences::CoefficientSequence;

/// Default grid resolution for CDF comparisons.
pub const DEFAULT_CDF_GRID: usize = 64;

/// F_k sampled on a uniform m-by-m node grid over a rectangle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalJointCDF {
    pub k: usize,
    pub rect: Rect,
    pub m: usize,
    /// node coordinates, endpoints included
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// row-major F(xs[i], ys[j])
    pub values: Vec<f64>,
}

impl EmpiricalJointCDF {
    pub fn value_at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.m + j]
    }

    /// Largest node-wise difference to another CDF on the same grid.
    pub fn sup_norm_distance(&self, other: &EmpiricalJointCDF) -> Result<f64> {
        if self.m != other.m || self.rect != other.rect {
            return Err(Error::Size(
                "sup-norm distance requires CDFs on identical grids".into(),
            ));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Converts the CDF into a gridded measure by rectangle differencing:
    /// the mass of each grid cell goes to the cell center.
    pub fn to_grid_measure(&self) -> Result<LimitMeasure> {
        let m = self.m;
        let mut xs = Vec::with_capacity(m - 1);
        let mut ys = Vec::with_capacity(m - 1);
        for i in 0..m - 1 {
            xs.push(0.5 * (self.xs[i] + self.xs[i + 1]));
            ys.push(0.5 * (self.ys[i] + self.ys[i + 1]));
        }
        let mut weights = Vec::with_capacity((m - 1) * (m - 1));
        for i in 0..m - 1 {
            for j in 0..m - 1 {
                let mass = self.value_at(i + 1, j + 1) - self.value_at(i, j + 1)
                    - self.value_at(i + 1, j)
                    + self.value_at(i, j);
                weights.push(mass.max(0.0));
            }
        }
        LimitMeasure::grid_from_weights(self.rect, xs, ys, weights)
    }
}

/// Exact counting of F_k at the grid nodes. The two vectors must already
/// have equal length (append the phantom off-diagonal entry first).
pub fn empirical_cdf(a: &[f64], b: &[f64], rect: Rect, m: usize) -> Result<EmpiricalJointCDF> {
    if a.is_empty() {
        return Err(Error::Size("empirical CDF of an empty vector".into()));
    }
    if a.len() != b.len() {
        return Err(Error::Size(format!(
            "empirical CDF needs equally long vectors, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    if m < 2 {
        return Err(Error::Size(format!("CDF grid needs m >= 2, got {m}")));
    }
    let k = a.len();
    let xs: Vec<f64> = (0..m)
        .map(|i| rect.x0 + (rect.x1 - rect.x0) * i as f64 / (m - 1) as f64)
        .collect();
    let ys: Vec<f64> = (0..m)
        .map(|j| rect.y0 + (rect.y1 - rect.y0) * j as f64 / (m - 1) as f64)
        .collect();
    // Histogram on the (m+1)^2 index grid: pair (a, b) first satisfies
    // a < xs[i] at i = partition_point, likewise for y; position m means
    // "beyond every node".
    let mut histogram = vec![0u32; (m + 1) * (m + 1)];
    for (&av, &bv) in a.iter().zip(b) {
        let ix = xs.partition_point(|&x| x <= av);
        let iy = ys.partition_point(|&y| y <= bv);
        histogram[ix * (m + 1) + iy] += 1;
    }
    // 2-D prefix sums turn the histogram into counts of strictly dominated
    // pairs at each node.
    let mut values = vec![0.0; m * m];
    let mut prefix = vec![0u32; (m + 1) * (m + 1)];
    for i in 0..=m {
        for j in 0..=m {
            let mut c = histogram[i * (m + 1) + j];
            if i > 0 {
                c += prefix[(i - 1) * (m + 1) + j];
            }
            if j > 0 {
                c += prefix[i * (m + 1) + j - 1];
            }
            if i > 0 && j > 0 {
                c -= prefix[(i - 1) * (m + 1) + j - 1];
            }
            prefix[i * (m + 1) + j] = c;
            if i < m && j < m {
                values[i * m + j] = c as f64 / k as f64;
            }
        }
    }
    Ok(EmpiricalJointCDF {
        k,
        rect,
        m,
        xs,
        ys,
        values,
    })
}

/// A named test function on the coefficient plane.
#[derive(Clone)]
pub struct PlaneTestFunction {
    id: String,
    f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl PlaneTestFunction {
    pub fn new(
        id: impl Into<String>,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            id: id.into(),
            f: Arc::new(f),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }
}

impl fmt::Debug for PlaneTestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PlaneTestFunction({})", self.id)
    }
}

/// Monomials up to degree four plus one bounded bump, for distribution tests
/// on bounded and unbounded supports alike.
pub fn plane_test_suite() -> Vec<PlaneTestFunction> {
    vec![
        PlaneTestFunction::new("one", |_, _| 1.0),
        PlaneTestFunction::new("x", |x, _| x),
        PlaneTestFunction::new("y", |_, y| y),
        PlaneTestFunction::new("xy", |x, y| x * y),
        PlaneTestFunction::new("x2", |x, _| x * x),
        PlaneTestFunction::new("y2", |_, y| y * y),
        PlaneTestFunction::new("x2y2", |x, y| x * x * y * y),
        PlaneTestFunction::new("bump", |x, y| 1.0 / (1.0 + x * x + y * y)),
    ]
}

/// Per-size discrepancy between empirical plane averages and the measure.
#[derive(Debug, Clone)]
pub struct DistributionDiscrepancy {
    pub k: usize,
    /// max over the test functions
    pub max_abs_discrepancy: f64,
    pub per_psi: Vec<(String, f64)>,
}

/// For each ladder size, the worst |mean psi(a_j, b_j) - int psi dmu| over
/// the given plane test functions. Decay along the ladder is the evidence
/// that the sequence is distributed according to mu.
pub fn mu_distribution_test(
    seq: &CoefficientSequence,
    mu: &LimitMeasure,
    ks: &[usize],
    psis: &[PlaneTestFunction],
) -> Result<Vec<DistributionDiscrepancy>> {
    validate_ladder(ks)?;
    if psis.is_empty() {
        return Err(Error::Parameter("no plane test functions given".into()));
    }
    let limits: Vec<f64> = psis
        .iter()
        .map(|psi| mu.integrate(|x, y| psi.eval(x, y)))
        .collect::<Result<_>>()?;
    ks.iter()
        .map(|&k| {
            let (diag, off) = seq.generate(k)?;
            let pairs = coefficient_pairs(&diag, &off);
            let mut per_psi = Vec::with_capacity(psis.len());
            let mut worst = 0.0_f64;
            for (psi, &limit) in psis.iter().zip(&limits) {
                let mean = pairs.iter().map(|&(x, y)| psi.eval(x, y)).sum::<f64>()
                    / pairs.len() as f64;
                let disc = (mean - limit).abs();
                worst = worst.max(disc);
                per_psi.push((psi.id().to_string(), disc));
            }
            Ok(DistributionDiscrepancy {
                k,
                max_abs_discrepancy: worst,
                per_psi,
            })
        })
        .collect()
}

/// Outcome of the greedy subsequence selection.
#[derive(Debug, Clone)]
pub struct HellyReport {
    pub selected_ks: Vec<usize>,
    /// (k, sup-norm distance to the last kept CDF when k was visited);
    /// the anchor records distance 0
    pub sup_norm_trace: Vec<(usize, f64)>,
    /// last kept CDF, the limit candidate
    pub limit: EmpiricalJointCDF,
    /// true when at least one size beyond the anchor stabilized
    pub converged: bool,
    /// smallest distance among rejected sizes (infinity when none rejected)
    pub best_rejected_sup_norm: f64,
}

/// Walks the ladder and keeps k whenever its CDF is within `tol` of the last
/// kept one (the first k is always kept). A selection failure is reported,
/// not raised: `converged` stays false and the best rejected distance tells
/// how close the family came.
pub fn helly_subsequence(
    seq: &CoefficientSequence,
    ks: &[usize],
    tol: f64,
    rect: Rect,
    m: usize,
) -> Result<HellyReport> {
    validate_ladder(ks)?;
    if ks.len() < 8 {
        return Err(Error::Parameter(format!(
            "subsequence selection needs a ladder of at least 8 sizes, got {}",
            ks.len()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::Tolerance(format!(
            "selection tolerance must be positive, got {tol}"
        )));
    }
    let mut selected_ks = Vec::new();
    let mut sup_norm_trace = Vec::with_capacity(ks.len());
    let mut last_kept: Option<EmpiricalJointCDF> = None;
    let mut best_rejected = f64::INFINITY;
    for &k in ks {
        let (diag, off) = seq.generate(k)?;
        let pairs = coefficient_pairs(&diag, &off);
        let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let cdf = empirical_cdf(&a, &b, rect, m)?;
        match &last_kept {
            None => {
                sup_norm_trace.push((k, 0.0));
                selected_ks.push(k);
                last_kept = Some(cdf);
            }
            Some(prev) => {
                let d = cdf.sup_norm_distance(prev)?;
                sup_norm_trace.push((k, d));
                if d < tol {
                    selected_ks.push(k);
                    last_kept = Some(cdf);
                } else {
                    best_rejected = best_rejected.min(d);
                }
            }
        }
    }
    let converged = selected_ks.len() >= 2;
    Ok(HellyReport {
        converged,
        selected_ks,
        sup_norm_trace,
        limit: last_kept.expect("ladder is nonempty"),
        best_rejected_sup_norm: best_rejected,
    })
}
