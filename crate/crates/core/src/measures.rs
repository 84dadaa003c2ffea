//! Probability measures on the coefficient plane and the closed-form limit
//! densities they induce on the spectral axis.
//!
//! Four measure representations cover everything the crate needs: product
//! Dirac atoms, finitely many weighted atoms, the pushforward of a curve
//! s -> (a(s), b(s)) on [0, 1], and a gridded density on a rectangle.
//!
//! One-dimensional densities with inverse-square-root edges (arcsine,
//! semicircle, Marchenko-Pastur) are never integrated in the spectral
//! variable directly; each carries a substitution that turns the integral
//! into a smooth one over an angle. The Nevai-Ullman density removes its
//! |x|^(alpha-1) origin singularity with the power substitution x = w^(1/alpha).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::sequences::CurveFn;

/// Axis-aligned rectangle in the (x, y) coefficient plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn unit_box() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0)
    }

    /// Grows the rectangle by `margin` on every side.
    pub fn padded(&self, margin: f64) -> Self {
        Self::new(
            self.x0 - margin,
            self.x1 + margin,
            self.y0 - margin,
            self.y1 + margin,
        )
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x0..=self.x1).contains(&x) && (self.y0..=self.y1).contains(&y)
    }
}

/// A point mass with a weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedAtom {
    pub a: f64,
    pub b: f64,
    pub weight: f64,
}

/// Quadrature panels used when integrating over a pushforward curve.
pub const CURVE_PANELS: usize = 1024;

/// A probability measure on the coefficient plane.
#[derive(Clone)]
pub enum LimitMeasure {
    /// delta_a x delta_b
    ProductAtoms { a: f64, b: f64 },
    /// sum of weighted point masses, weights summing to 1
    WeightedAtoms { atoms: Vec<WeightedAtom> },
    /// pushforward of Lebesgue measure on [0, 1] under s -> (a(s), b(s))
    CurvePushforward {
        a: CurveFn,
        b: CurveFn,
        panels: usize,
    },
    /// density values on a tensor quadrature grid over a rectangle
    GridDensity(GridMeasure),
}

impl fmt::Debug for LimitMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitMeasure::ProductAtoms { a, b } => write!(f, "ProductAtoms({a}, {b})"),
            LimitMeasure::WeightedAtoms { atoms } => {
                write!(f, "WeightedAtoms({} atoms)", atoms.len())
            }
            LimitMeasure::CurvePushforward { panels, .. } => {
                write!(f, "CurvePushforward(panels = {panels})")
            }
            LimitMeasure::GridDensity(g) => {
                write!(f, "GridDensity({}x{} on {:?})", g.m, g.m, g.rect)
            }
        }
    }
}

impl LimitMeasure {
    pub fn product_atoms(a: f64, b: f64) -> Self {
        LimitMeasure::ProductAtoms { a, b }
    }

    /// Weighted point masses; weights must be nonnegative and sum to 1.
    pub fn weighted_atoms(atoms: Vec<WeightedAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Parameter("weighted-atom measure has no atoms".into()));
        }
        if atoms.iter().any(|a| a.weight < 0.0) {
            return Err(Error::Parameter("atom weights must be nonnegative".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Parameter(format!(
                "atom weights must sum to 1, got {total}"
            )));
        }
        Ok(LimitMeasure::WeightedAtoms { atoms })
    }

    /// Pushforward of the uniform measure on [0, 1] under s -> (a(s), b(s)).
    pub fn curve<F, G>(a: F, b: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        LimitMeasure::CurvePushforward {
            a: Arc::new(a),
            b: Arc::new(b),
            panels: CURVE_PANELS,
        }
    }

    pub fn curve_with_panels(a: CurveFn, b: CurveFn, panels: usize) -> Self {
        LimitMeasure::CurvePushforward { a, b, panels }
    }

    /// Gridded density proportional to `f` on `rect`, sampled on an m-by-m
    /// tensor Gauss-Legendre grid and normalized to total mass 1.
    pub fn grid_from_density<F: Fn(f64, f64) -> f64>(
        rect: Rect,
        m: usize,
        f: F,
    ) -> Result<Self> {
        Ok(LimitMeasure::GridDensity(GridMeasure::from_density(
            rect, m, f,
        )?))
    }

    /// Uniform (product Lebesgue) measure on a rectangle.
    pub fn uniform(rect: Rect, m: usize) -> Result<Self> {
        Self::grid_from_density(rect, m, |_, _| 1.0)
    }

    /// Gridded measure from explicit nonnegative masses at explicit nodes;
    /// masses are normalized to total 1.
    pub fn grid_from_weights(
        rect: Rect,
        xs: Vec<f64>,
        ys: Vec<f64>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        Ok(LimitMeasure::GridDensity(GridMeasure::from_weights(
            rect, xs, ys, weights,
        )?))
    }

    /// Integrates a continuous test function against the measure. Atom
    /// representations are exact; curves and grids use their quadrature.
    pub fn integrate<F: Fn(f64, f64) -> f64>(&self, psi: F) -> Result<f64> {
        let value = match self {
            LimitMeasure::ProductAtoms { a, b } => psi(*a, *b),
            LimitMeasure::WeightedAtoms { atoms } => atoms
                .iter()
                .map(|atom| atom.weight * psi(atom.a, atom.b))
                .sum(),
            LimitMeasure::CurvePushforward { a, b, panels } => {
                quad::integrate(0.0, 1.0, *panels, |s| psi(a(s), b(s)))
            }
            LimitMeasure::GridDensity(grid) => grid.integrate(&psi),
        };
        if !value.is_finite() {
            return Err(Error::Domain(format!(
                "test function produced a non-finite integral ({value}) on the measure support"
            )));
        }
        Ok(value)
    }

    /// The smallest axis-aligned rectangle the mass is known to live in.
    pub fn support_box(&self) -> Rect {
        match self {
            LimitMeasure::ProductAtoms { a, b } => Rect::new(*a, *a, *b, *b),
            LimitMeasure::WeightedAtoms { atoms } => {
                let mut rect = Rect::new(
                    f64::INFINITY,
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                    f64::NEG_INFINITY,
                );
                for atom in atoms {
                    rect.x0 = rect.x0.min(atom.a);
                    rect.x1 = rect.x1.max(atom.a);
                    rect.y0 = rect.y0.min(atom.b);
                    rect.y1 = rect.y1.max(atom.b);
                }
                rect
            }
            LimitMeasure::CurvePushforward { a, b, panels } => {
                let samples = (8 * panels).max(1024);
                let mut rect = Rect::new(
                    f64::INFINITY,
                    f64::NEG_INFINITY,
                    f64::INFINITY,
                    f64::NEG_INFINITY,
                );
                for i in 0..=samples {
                    let s = i as f64 / samples as f64;
                    let (x, y) = (a(s), b(s));
                    rect.x0 = rect.x0.min(x);
                    rect.x1 = rect.x1.max(x);
                    rect.y0 = rect.y0.min(y);
                    rect.y1 = rect.y1.max(y);
                }
                rect
            }
            LimitMeasure::GridDensity(grid) => grid.rect,
        }
    }
}

/// Density weights on a tensor Gauss-Legendre grid.
#[derive(Debug, Clone)]
pub struct GridMeasure {
    rect: Rect,
    m: usize,
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// row-major m*m weights, summing to 1
    weights: Vec<f64>,
}

impl GridMeasure {
    fn from_density<F: Fn(f64, f64) -> f64>(rect: Rect, m: usize, f: F) -> Result<Self> {
        if m < 2 {
            return Err(Error::Parameter(format!(
                "grid measure needs at least a 2x2 grid, got m = {m}"
            )));
        }
        if !(rect.x1 > rect.x0 && rect.y1 > rect.y0) {
            return Err(Error::Parameter(format!(
                "grid rectangle must have positive area: {rect:?}"
            )));
        }
        let rule = quad::GaussLegendre::new(m);
        let map = |lo: f64, hi: f64, t: f64| 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
        let xs: Vec<f64> = rule.nodes().iter().map(|&t| map(rect.x0, rect.x1, t)).collect();
        let ys: Vec<f64> = rule.nodes().iter().map(|&t| map(rect.y0, rect.y1, t)).collect();
        let mut weights = Vec::with_capacity(m * m);
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                let density = f(x, y);
                if !density.is_finite() || density < 0.0 {
                    return Err(Error::Domain(format!(
                        "grid density must be finite and nonnegative, got {density} at ({x}, {y})"
                    )));
                }
                weights.push(rule.weights()[i] * rule.weights()[j] * density);
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::Domain("grid density has zero total mass".into()));
        }
        for w in &mut weights {
            *w /= total;
        }
        Ok(Self { rect, m, xs, ys, weights })
    }

    fn from_weights(rect: Rect, xs: Vec<f64>, ys: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if xs.is_empty() || ys.is_empty() || weights.len() != xs.len() * ys.len() {
            return Err(Error::Size(format!(
                "grid weights: expected {} values, got {}",
                xs.len() * ys.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Domain("grid weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::Domain("grid weights have zero total mass".into()));
        }
        let m = ys.len();
        let weights = weights.iter().map(|w| w / total).collect();
        Ok(Self { rect, m, xs, ys, weights })
    }

    fn integrate<F: Fn(f64, f64) -> f64>(&self, psi: &F) -> f64 {
        let mut acc = 0.0;
        for (i, &x) in self.xs.iter().enumerate() {
            for (j, &y) in self.ys.iter().enumerate() {
                acc += self.weights[i * self.m + j] * psi(x, y);
            }
        }
        acc
    }
}

/// A one-dimensional probability density with a pointwise evaluator and a
/// singularity-free integration route.
#[derive(Clone)]
pub struct DensityCurve {
    name: String,
    support: (f64, f64),
    evaluator: CurveFn,
    integrator: DensityIntegrator,
    moments: Arc<Mutex<HashMap<u32, f64>>>,
}

#[derive(Clone)]
enum DensityIntegrator {
    /// (1/pi) int_0^pi phi(a + 2b cos t) dt
    Angle { a: f64, b: f64 },
    /// (2/pi) int_0^pi phi(r cos t) sin^2 t dt
    Semicircle { radius: f64 },
    /// (1/pi) int_0^pi phi(2 - 2 cos t)(1 + cos t) dt
    MarchenkoPastur,
    Mellin(Arc<NevaiUllman>),
}

impl fmt::Debug for DensityCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityCurve({}, support {:?})", self.name, self.support)
    }
}

impl DensityCurve {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Pointwise density value; zero outside the support.
    pub fn density(&self, x: f64) -> f64 {
        (self.evaluator)(x)
    }

    /// Integral of phi against the density, via the representation's
    /// substitution and panel-doubling refinement.
    pub fn integrate<F: Fn(f64) -> f64>(&self, phi: F) -> f64 {
        match &self.integrator {
            DensityIntegrator::Angle { a, b } => {
                let (a, b) = (*a, *b);
                quad::integrate_refined(0.0, std::f64::consts::PI, 64, 1e-10, |t| {
                    phi(a + 2.0 * b * t.cos())
                }) / std::f64::consts::PI
            }
            DensityIntegrator::Semicircle { radius } => {
                let r = *radius;
                quad::integrate_refined(0.0, std::f64::consts::PI, 64, 1e-10, |t| {
                    phi(r * t.cos()) * t.sin().powi(2)
                }) * 2.0
                    / std::f64::consts::PI
            }
            DensityIntegrator::MarchenkoPastur => {
                quad::integrate_refined(0.0, std::f64::consts::PI, 64, 1e-10, |t| {
                    phi(2.0 - 2.0 * t.cos()) * (1.0 + t.cos())
                }) / std::f64::consts::PI
            }
            DensityIntegrator::Mellin(nu) => nu.integrate(&phi),
        }
    }

    /// Total mass; 1 up to quadrature error for every constructor here.
    pub fn mass(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    /// p-th moment, memoized across calls.
    pub fn moment(&self, p: u32) -> f64 {
        if let Some(&m) = self.moments.lock().unwrap().get(&p) {
            return m;
        }
        let value = self.integrate(|x| x.powi(p as i32));
        self.moments.lock().unwrap().insert(p, value);
        value
    }
}

/// The spectral density of constant coefficient pairs (a, b): the arcsine
/// law 1 / (pi sqrt((a + 2b - x)(x - a + 2b))) on (a - 2b, a + 2b).
pub fn arcsine_density(a: f64, b: f64) -> Result<DensityCurve> {
    if !(b > 0.0) {
        return Err(Error::Parameter(format!(
            "arcsine density needs b > 0, got {b}"
        )));
    }
    let (lo, hi) = (a - 2.0 * b, a + 2.0 * b);
    let evaluator = move |x: f64| {
        if x <= lo || x >= hi {
            0.0
        } else {
            1.0 / (std::f64::consts::PI * ((hi - x) * (x - lo)).sqrt())
        }
    };
    Ok(DensityCurve {
        name: format!("arcsine(a={a}, b={b})"),
        support: (lo, hi),
        evaluator: Arc::new(evaluator),
        integrator: DensityIntegrator::Angle { a, b },
        moments: Arc::new(Mutex::new(HashMap::new())),
    })
}

/// Semicircle density (2 / (pi r^2)) sqrt(r^2 - x^2) on (-r, r).
pub fn semicircle_density(radius: f64) -> Result<DensityCurve> {
    if !(radius > 0.0) {
        return Err(Error::Parameter(format!(
            "semicircle radius must be positive, got {radius}"
        )));
    }
    let r = radius;
    let evaluator = move |x: f64| {
        if x.abs() >= r {
            0.0
        } else {
            2.0 / (std::f64::consts::PI * r * r) * (r * r - x * x).sqrt()
        }
    };
    Ok(DensityCurve {
        name: format!("semicircle(r={radius})"),
        support: (-radius, radius),
        evaluator: Arc::new(evaluator),
        integrator: DensityIntegrator::Semicircle { radius },
        moments: Arc::new(Mutex::new(HashMap::new())),
    })
}

/// Marchenko-Pastur density sqrt(4x - x^2) / (2 pi x) on (0, 4].
pub fn marchenko_pastur_density() -> DensityCurve {
    let evaluator = |x: f64| {
        if x <= 0.0 || x > 4.0 {
            0.0
        } else {
            (4.0 * x - x * x).sqrt() / (2.0 * std::f64::consts::PI * x)
        }
    };
    DensityCurve {
        name: "marchenko-pastur".into(),
        support: (0.0, 4.0),
        evaluator: Arc::new(evaluator),
        integrator: DensityIntegrator::MarchenkoPastur,
        moments: Arc::new(Mutex::new(HashMap::new())),
    }
}

/// Mellin convolution v = p * w_(a,b) with p the distribution of s^alpha for
/// uniform s, i.e. p(y) = lambda y^(lambda - 1) on (0, 1) with lambda = 1/alpha:
/// v(x) = int_0^1 p(y) w_(a,b)(x/y) dy / y.
///
/// This is the density of the product X * Y with X arcsine(a, b) and
/// Y = s^alpha, which is what contracting regularly varying coefficients of
/// index alpha produces. Collapsing the arcsine factor leaves
/// v(x) = (lambda/pi) |x|^(lambda-1) * I(|x|) with
/// I(x) = int u^(-lambda) ((U - u)(u - L))^(-1/2) du over u in (max(x, L), U)
/// after mirroring negative x to the reflected parameters (U, L) -> (-L, -U).
struct NevaiUllman {
    lambda: f64,
    a: f64,
    b: f64,
    /// panel budget of the substituted u-integrals
    panels: usize,
}

impl NevaiUllman {
    fn upper_edge(&self) -> f64 {
        self.a + 2.0 * self.b
    }

    fn lower_edge(&self) -> f64 {
        self.a - 2.0 * self.b
    }

    /// I(x; U, L) with both integrable endpoint structures removed by
    /// substitution: U - u = p^2 flattens the upper square-root edge, and on
    /// the lower side either u - L = q^2 (when the edge is L) or the
    /// logarithmic u = x e^tau (when the steep u^(-lambda) factor dominates).
    fn edge_integral(&self, x: f64, upper: f64, lower: f64) -> f64 {
        let lam = self.lambda;
        let u_lo = x.max(lower);
        if u_lo >= upper {
            return 0.0;
        }
        let mid = 0.5 * (u_lo + upper);
        let weight = move |u: f64| ((upper - u) * (u - lower)).max(f64::MIN_POSITIVE);
        // upper half: U - u = p^2
        let p_max = (upper - mid).sqrt();
        let upper_half = quad::integrate(0.0, p_max, self.panels, |p| {
            let u = upper - p * p;
            2.0 * u.powf(-lam) * (u - lower).max(f64::MIN_POSITIVE).sqrt().recip()
        });
        // lower half
        let lower_half = if x <= lower {
            // square-root edge at L; L > 0 here because x > 0
            let q_max = (mid - lower).sqrt();
            quad::integrate(0.0, q_max, self.panels, |q| {
                let u = lower + q * q;
                2.0 * u.powf(-lam) * (upper - u).max(f64::MIN_POSITIVE).sqrt().recip()
            })
        } else {
            // steep power factor at u = x: u = x e^tau keeps the decaying
            // layer exp((1 - lambda) tau) resolved uniformly in x
            let t_max = (mid / x).ln();
            let panels = self.panels.max((t_max * (lam - 1.0).max(1.0)).ceil() as usize);
            x.powf(1.0 - lam)
                * quad::integrate(0.0, t_max, panels, |tau| {
                    let u = x * tau.exp();
                    ((1.0 - lam) * tau).exp() / weight(u).sqrt()
                })
        };
        upper_half + lower_half
    }

    fn density(&self, x: f64) -> f64 {
        let hi = self.upper_edge();
        let lo = self.lower_edge().min(0.0);
        if x <= lo || x >= hi {
            return 0.0;
        }
        let lam = self.lambda;
        if x == 0.0 {
            // removable point: x^(lambda-1) int_x u^(-lambda) w(u) du tends
            // to w(0) / (lambda - 1), with w the arcsine edge weight
            if self.lower_edge() >= 0.0 {
                return 0.0;
            }
            let w0 = (hi * -self.lower_edge()).sqrt().recip();
            return lam / (lam - 1.0) * w0 / std::f64::consts::PI;
        }
        let integral = if x > 0.0 {
            self.edge_integral(x, hi, self.lower_edge())
        } else {
            // mirror: u and x flip sign, so (U, L) becomes (-L, -U)
            self.edge_integral(-x, -self.lower_edge(), -hi)
        };
        lam / std::f64::consts::PI * x.abs().powf(lam - 1.0) * integral
    }

    /// Outer integral of phi against the density. The density vanishes like
    /// a square root at the outer edges; substituting edge - x = p^2 there
    /// keeps the panel-doubling refinement fast.
    fn integrate<F: Fn(f64) -> f64>(&self, phi: &F) -> f64 {
        let hi = self.upper_edge();
        let lo = self.lower_edge().min(0.0);
        let mut total = 0.0;
        if hi > 0.0 {
            total += self.integrate_half(phi, hi, 1.0);
        }
        if lo < 0.0 {
            total += self.integrate_half(phi, -lo, -1.0);
        }
        total
    }

    fn integrate_half<F: Fn(f64) -> f64>(&self, phi: &F, edge: f64, sign: f64) -> f64 {
        let mid = 0.5 * edge;
        let inner = quad::integrate_refined(0.0, mid, 128, 1e-9, |x| {
            let x = sign * x;
            phi(x) * self.density(x)
        });
        let outer = quad::integrate_refined(0.0, mid.sqrt(), 128, 1e-9, |p| {
            let x = sign * (edge - p * p);
            2.0 * p * phi(x) * self.density(x)
        });
        inner + outer
    }
}

/// Nevai-Ullman density for contraction parameter alpha in (0, 1): the
/// Mellin convolution of the arcsine density of (a, b) with the power
/// density of s^alpha, evaluated pointwise by quadrature with `grid` panels
/// per substituted piece.
pub fn nevai_ullman_density(alpha: f64, a: f64, b: f64, grid: usize) -> Result<DensityCurve> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!(
            "Nevai-Ullman parameter alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if !(b > 0.0) {
        return Err(Error::Parameter(format!(
            "Nevai-Ullman density needs b > 0, got {b}"
        )));
    }
    if grid == 0 {
        return Err(Error::Parameter("quadrature grid must be positive".into()));
    }
    let nu = Arc::new(NevaiUllman {
        lambda: 1.0 / alpha,
        a,
        b,
        panels: grid,
    });
    let support = ((a - 2.0 * b).min(0.0), a + 2.0 * b);
    let eval = Arc::clone(&nu);
    Ok(DensityCurve {
        name: format!("nevai-ullman(alpha={alpha}, a={a}, b={b})"),
        support,
        evaluator: Arc::new(move |x| eval.density(x)),
        integrator: DensityIntegrator::Mellin(nu),
        moments: Arc::new(Mutex::new(HashMap::new())),
    })
}
