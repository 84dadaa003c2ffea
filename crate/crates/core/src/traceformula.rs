//! The limit trace functional
//! L(phi) = (1/pi) int int_0^pi phi(x + 2y cos t) dt dmu(x, y)
//! and ladders comparing it with empirical trace averages at finite size.

use std::fmt;
use std::sync::Arc;

use crate::eigensolve::{all_eigenvalues, default_tolerance};
use crate::error::Result;
use crate::jacobi::JacobiMatrix;
use crate::measures::LimitMeasure;
use crate::moments::validate_ladder;
use crate::quad;
use crate::sequences::CoefficientSequence;

/// Panels of the inner angle integral. 256 keeps even Lipschitz test
/// functions (|x|) accurate to ~1e-5; polynomials converge far earlier.
const INNER_ANGLE_PANELS: usize = 256;

/// Test functions of Theorem-style statements live on [-3, 3] by default.
pub const DEFAULT_TEST_INTERVAL: (f64, f64) = (-3.0, 3.0);

/// A named scalar test function.
#[derive(Clone)]
pub struct TestFunction {
    id: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl TestFunction {
    pub fn new(id: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            id: id.into(),
            f: Arc::new(f),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TestFunction({})", self.id)
    }
}

/// One (test function, size) cell of a convergence ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub phi_id: String,
    pub k: usize,
    pub empirical: f64,
    pub limit: f64,
    pub abs_err: f64,
}

/// The fixed test-function basis on the default interval: monomials x^0..x^6,
/// Chebyshev polynomials T_1..T_5 rescaled to the interval, |x|, a bounded
/// sigmoid, and the bounded rational 1/(1+x^2).
pub fn test_function_suite() -> Vec<TestFunction> {
    test_function_suite_on(DEFAULT_TEST_INTERVAL)
}

/// Same basis with the Chebyshev members rescaled to a caller-chosen
/// spectral interval.
pub fn test_function_suite_on(interval: (f64, f64)) -> Vec<TestFunction> {
    let (lo, hi) = interval;
    assert!(hi > lo, "test interval must be nondegenerate");
    let mut suite = Vec::new();
    for p in 0..=6u32 {
        suite.push(TestFunction::new(format!("m{p}"), move |x: f64| {
            x.powi(p as i32)
        }));
    }
    for n in 1..=5u32 {
        suite.push(TestFunction::new(format!("cheb{n}"), move |x: f64| {
            let u = (2.0 * x - lo - hi) / (hi - lo);
            chebyshev(n, u)
        }));
    }
    suite.push(TestFunction::new("abs", |x: f64| x.abs()));
    suite.push(TestFunction::new("sigmoid", |x: f64| 1.0 / (1.0 + (-x).exp())));
    suite.push(TestFunction::new("cauchy", |x: f64| 1.0 / (1.0 + x * x)));
    suite
}

/// Looks up suite members by id, preserving suite order.
pub fn suite_subset(suite: &[TestFunction], ids: &[String]) -> Vec<TestFunction> {
    suite
        .iter()
        .filter(|f| ids.iter().any(|id| id == f.id()))
        .cloned()
        .collect()
}

fn chebyshev(n: u32, x: f64) -> f64 {
    let mut t0 = 1.0;
    let mut t1 = x;
    for _ in 1..n {
        let t2 = 2.0 * x * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    if n == 0 {
        t0
    } else {
        t1
    }
}

/// Evaluates L(phi) by nesting the composite angle integral inside the
/// measure integral.
pub fn limit_functional<F: Fn(f64) -> f64 + Sync>(mu: &LimitMeasure, phi: F) -> Result<f64> {
    mu.integrate(|x, y| {
        quad::integrate(0.0, std::f64::consts::PI, INNER_ANGLE_PANELS, |t| {
            phi(x + 2.0 * y * t.cos())
        }) / std::f64::consts::PI
    })
}

/// Runs the finite-size comparison for every (test function, k) pair.
/// Empirical values come from the certified eigensolver; the limit value of
/// each test function is computed once and shared across sizes. Reports are
/// sorted by (phi_id, k).
pub fn convergence_ladder(
    seq: &CoefficientSequence,
    mu: &LimitMeasure,
    phis: &[TestFunction],
    ks: &[usize],
) -> Result<Vec<ConvergenceReport>> {
    validate_ladder(ks)?;
    let limits: Vec<f64> = phis
        .iter()
        .map(|phi| limit_functional(mu, |x| phi.eval(x)))
        .collect::<Result<_>>()?;
    let mut reports = Vec::with_capacity(phis.len() * ks.len());
    for &k in ks {
        let matrix = JacobiMatrix::from_sequence(seq, k)?;
        let spectrum = all_eigenvalues(&matrix, default_tolerance(&matrix))?;
        for (phi, &limit) in phis.iter().zip(&limits) {
            let empirical = spectrum.trace_average(|x| phi.eval(x));
            reports.push(ConvergenceReport {
                phi_id: phi.id().to_string(),
                k,
                empirical,
                limit,
                abs_err: (empirical - limit).abs(),
            });
        }
    }
    reports.sort_by(|p, q| p.phi_id.cmp(&q.phi_id).then(p.k.cmp(&q.k)));
    Ok(reports)
}
