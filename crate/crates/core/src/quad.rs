//! Gauss–Legendre quadrature: single rules, composite panels, and a
//! panel-doubling refinement loop.
//!
//! Everything downstream (density normalization, limit functionals, Mellin
//! convolutions) funnels through these routines, so the defaults here pin the
//! quadrature budget of the whole crate: composite rules use order-8 panels,
//! and refinement doubles the panel count until successive values agree.

/// Default panel order for composite rules.
pub const DEFAULT_ORDER: usize = 8;

/// Default panel count for one-dimensional density integrals.
pub const DEFAULT_PANELS: usize = 2048;

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the n-point rule by Newton iteration on the Legendre
    /// polynomial, seeded with the Chebyshev-angle approximation of the
    /// roots.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be at least 1");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Roots come in +/- pairs; solve for the nonnegative half.
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x.abs();
            nodes[n - 1 - i] = x.abs();
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[lo, hi]` with a single application of the rule.
    pub fn integrate<F: Fn(f64) -> f64>(&self, lo: f64, hi: f64, f: &F) -> f64 {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Integrates `f` over `[lo, hi]` split into `panels` equal panels.
    pub fn integrate_composite<F: Fn(f64) -> f64>(
        &self,
        lo: f64,
        hi: f64,
        panels: usize,
        f: &F,
    ) -> f64 {
        assert!(panels >= 1);
        let width = (hi - lo) / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let a = lo + p as f64 * width;
            acc += self.integrate(a, a + width, f);
        }
        acc
    }
}

/// Legendre polynomial P_n(x) and its derivative via the Bonnet recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for m in 2..=n {
        let m = m as f64;
        let p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite order-8 integral with the crate defaults.
pub fn integrate<F: Fn(f64) -> f64>(lo: f64, hi: f64, panels: usize, f: F) -> f64 {
    GaussLegendre::new(DEFAULT_ORDER).integrate_composite(lo, hi, panels, &f)
}

/// Integrates with panel doubling until two successive refinements agree to
/// `tol`, starting from `panels`. Returns the finest value.
pub fn integrate_refined<F: Fn(f64) -> f64>(
    lo: f64,
    hi: f64,
    panels: usize,
    tol: f64,
    f: F,
) -> f64 {
    let rule = GaussLegendre::new(DEFAULT_ORDER);
    let mut p = panels.max(1);
    let mut value = rule.integrate_composite(lo, hi, p, &f);
    // Cap keeps adversarial integrands from spinning forever.
    while p < 1 << 16 {
        p *= 2;
        let refined = rule.integrate_composite(lo, hi, p, &f);
        let done = (refined - value).abs() <= tol;
        value = refined;
        if done {
            break;
        }
    }
    value
}
