//! Ready-made (sequence, contraction, limit measure) triples: classical
//! recurrences, sampled curves, and random models, each wired to the measure
//! its trace averages converge to.

use std::sync::Arc;

use crate::eigensolve::{all_eigenvalues_default, Spectrum};
use crate::error::{Error, Result};
use crate::jacobi::JacobiMatrix;
use crate::measures::{
    arcsine_density, marchenko_pastur_density, nevai_ullman_density, semicircle_density,
    DensityCurve, LimitMeasure,
};
use crate::sequences::{
    CoefficientSequence, CurveFn, DeclaredClass, FunctionSpec, RandomModel, RecurrenceFamily,
    ScalingFn,
};

/// Ids accepted by [`builtin`].
pub const BUILTIN_IDS: [&str; 9] = [
    "toeplitz",
    "ramp",
    "vanvleck",
    "hermite",
    "laguerre",
    "nevai-ullman",
    "gaussian",
    "order-stats",
    "alternating",
];

/// A named experiment: base sequence, optional contraction, limit measure,
/// and (when a closed form exists) the induced spectral density.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub id: String,
    pub sequence: CoefficientSequence,
    pub contraction: Option<ScalingFn>,
    pub mu: LimitMeasure,
    pub expected_density: Option<DensityCurve>,
    pub provenance: String,
}

impl Ensemble {
    /// The sequence whose matrices are actually analyzed: contracted when a
    /// contraction is configured, the base sequence otherwise.
    pub fn effective_sequence(&self) -> CoefficientSequence {
        match &self.contraction {
            Some(r) => self.sequence.contract(r.clone()),
            None => self.sequence.clone(),
        }
    }

    pub fn matrix(&self, k: usize) -> Result<JacobiMatrix> {
        JacobiMatrix::from_sequence(&self.effective_sequence(), k)
    }

    /// Certified spectrum at the default tolerance.
    pub fn spectrum(&self, k: usize) -> Result<Spectrum> {
        all_eigenvalues_default(&self.matrix(k)?)
    }
}

/// Optional parameters of built-in ensembles. Fields not consumed by a given
/// id are ignored.
#[derive(Debug, Clone, Copy, Default)]
pub struct EnsembleParams {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
}

/// Builds an ensemble from the registry. Random ensembles require a seed.
pub fn builtin(id: &str, params: &EnsembleParams) -> Result<Ensemble> {
    match id {
        "toeplitz" => {
            let a = params.a.unwrap_or(0.0);
            let b = params.b.unwrap_or(0.5);
            let unit_box = (0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b);
            let sequence = CoefficientSequence::constant("toeplitz", a, b)
                .with_declared_class(if unit_box {
                    DeclaredClass::S
                } else {
                    DeclaredClass::Unknown
                });
            let expected_density = (b > 0.0).then(|| arcsine_density(a, b)).transpose()?;
            Ok(Ensemble {
                id: "toeplitz".into(),
                sequence,
                contraction: None,
                mu: LimitMeasure::product_atoms(a, b),
                expected_density,
                provenance: format!(
                    "constant bands a = {a}, b = {b}; arcsine spectral limit on (a-2b, a+2b)"
                ),
            })
        }
        "ramp" => {
            let sequence = CoefficientSequence::sampled(
                "ramp",
                FunctionSpec::Linear { slope: 1.0, intercept: 0.0 },
                FunctionSpec::Constant { value: 0.5 },
            )
            .with_declared_class(DeclaredClass::S);
            Ok(Ensemble {
                id: "ramp".into(),
                sequence,
                contraction: None,
                mu: LimitMeasure::curve(|s| s, |_| 0.5),
                expected_density: None,
                provenance: "diagonal ramp i/k with constant off-diagonal 1/2".into(),
            })
        }
        "vanvleck" => {
            let sequence =
                CoefficientSequence::recurrence("vanvleck", RecurrenceFamily::VanVleck)
                    .with_declared_class(DeclaredClass::S);
            // a_j tracks j/k and b_j tracks (j/k) sqrt(1-(j/k)^2), so the
            // joint limit is the unit-speed pushforward of that curve (the
            // pairs sit on y = x sqrt(1-x^2) with uniform x-marginal).
            let mu = LimitMeasure::curve(|s| s, |s| s * (1.0 - s * s).max(0.0).sqrt());
            Ok(Ensemble {
                id: "vanvleck".into(),
                sequence,
                contraction: None,
                mu,
                expected_density: None,
                provenance: "Van Vleck recurrence a_j = (j-1)/k, b_j = j sqrt(1-(j/k)^2)/k".into(),
            })
        }
        "hermite" => {
            let sequence = CoefficientSequence::recurrence("hermite", RecurrenceFamily::Hermite)
                .with_declared_class(DeclaredClass::Neither);
            // Contracted off-diagonals are sqrt(j/k)/2, so the pushforward
            // curve is (0, sqrt(s)/2) and the spectral limit is the
            // semicircle of radius 1; the radius was pinned against
            // contracted spectra at large k (see the acceptance suite).
            Ok(Ensemble {
                id: "hermite".into(),
                sequence,
                contraction: Some(ScalingFn::sqrt_of(2.0)),
                mu: LimitMeasure::curve(|_| 0.0, |s| s.sqrt() / 2.0),
                expected_density: Some(semicircle_density(1.0)?),
                provenance: "Hermite recurrence contracted by sqrt(2k); semicircle limit of radius 1"
                    .into(),
            })
        }
        "laguerre" => {
            let sequence =
                CoefficientSequence::recurrence("laguerre", RecurrenceFamily::Laguerre)
                    .with_declared_class(DeclaredClass::Neither);
            Ok(Ensemble {
                id: "laguerre".into(),
                sequence,
                contraction: Some(ScalingFn::linear(1.0)),
                mu: LimitMeasure::curve(|s| 2.0 * s, |s| s),
                expected_density: Some(marchenko_pastur_density()),
                provenance: "Laguerre recurrence contracted by k; Marchenko-Pastur limit on (0, 4]"
                    .into(),
            })
        }
        "nevai-ullman" => {
            let alpha = params.alpha.unwrap_or(0.5);
            let a = params.a.unwrap_or(0.0);
            let b = params.b.unwrap_or(0.5);
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::Parameter(format!(
                    "nevai-ullman needs alpha in (0, 1), got {alpha}"
                )));
            }
            let sequence = CoefficientSequence::sampled(
                "nevai-ullman",
                FunctionSpec::Power { scale: a, exponent: alpha },
                FunctionSpec::Power { scale: b, exponent: alpha },
            );
            let mu = LimitMeasure::curve(
                move |s: f64| a * s.powf(alpha),
                move |s: f64| b * s.powf(alpha),
            );
            Ok(Ensemble {
                id: "nevai-ullman".into(),
                sequence,
                contraction: None,
                mu,
                expected_density: Some(nevai_ullman_density(alpha, a, b, 64)?),
                provenance: format!(
                    "power-sampled bands (a s^alpha, b s^alpha), alpha = {alpha}; Mellin-convolved arcsine limit"
                ),
            })
        }
        "gaussian" => {
            let seed = require_seed(id, params)?;
            let sequence = CoefficientSequence::random(
                "gaussian",
                RandomModel::GaussianDecay { sigma_exponent: 0.5 },
                seed,
            )
            .with_declared_class(DeclaredClass::SPrime);
            Ok(Ensemble {
                id: "gaussian".into(),
                sequence,
                contraction: None,
                mu: LimitMeasure::product_atoms(0.0, 0.0),
                expected_density: None,
                provenance: format!(
                    "i.i.d. centered Gaussians, sigma(k) = k^(-1/2), seed {seed}; trace averages collapse to phi(0)"
                ),
            })
        }
        "order-stats" => {
            let seed = require_seed(id, params)?;
            let sequence = CoefficientSequence::random(
                "order-stats",
                RandomModel::UniformOrderStats,
                seed,
            )
            .with_declared_class(DeclaredClass::S);
            // Sorting both bands independently pairs the j-th smallest
            // entries with each other, so the joint limit is the comonotone
            // coupling of the uniform marginals: the diagonal curve (s, s).
            // Product-Lebesgue limits remain correct for functionals that
            // only see the marginals (polynomials of degree <= 2 in the
            // trace formula).
            Ok(Ensemble {
                id: "order-stats".into(),
                sequence,
                contraction: None,
                mu: LimitMeasure::curve(|s| s, |s| s),
                expected_density: None,
                provenance: format!(
                    "sorted i.i.d. uniform [0, 1] bands, seed {seed}; comonotone (diagonal) joint limit"
                ),
            })
        }
        "alternating" => {
            let sequence = CoefficientSequence::recurrence(
                "alternating",
                RecurrenceFamily::Alternating {
                    even: (0.0, 1.0),
                    odd: (1.0, 1.0),
                },
            )
            .with_declared_class(DeclaredClass::S);
            // The full family has no joint limit; the registered measure is
            // the limit along even sizes, the class the greedy subsequence
            // selection picks when the ladder starts even.
            Ok(Ensemble {
                id: "alternating".into(),
                sequence,
                contraction: None,
                mu: LimitMeasure::product_atoms(0.0, 1.0),
                expected_density: None,
                provenance: "parity-switching constant bands (0,1)/(1,1); even-subsequence limit"
                    .into(),
            })
        }
        other => Err(Error::Registry(other.into())),
    }
}

fn require_seed(id: &str, params: &EnsembleParams) -> Result<u64> {
    params.seed.ok_or_else(|| {
        Error::Config(format!("random ensemble `{id}` requires a seed parameter"))
    })
}

/// Ensemble from two bounded coefficient functions on [0, 1]: the sequence
/// samples them on the grid i/k and the limit measure is the pushforward of
/// Lebesgue measure under s -> (a(s), b(s)).
pub fn ksc_from_functions<F, G>(id: impl Into<String>, a: F, b: G) -> Result<Ensemble>
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
    G: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let id = id.into();
    let a: CurveFn = Arc::new(a);
    let b: CurveFn = Arc::new(b);
    // Probe for non-finite values before wiring anything up.
    for i in 0..=1024 {
        let s = i as f64 / 1024.0;
        for (name, f) in [("a", &a), ("b", &b)] {
            let v = f(s);
            if !v.is_finite() {
                return Err(Error::Domain(format!(
                    "ensemble `{id}`: function {name} returned {v} at s = {s}"
                )));
            }
        }
    }
    let (a_seq, b_seq) = (Arc::clone(&a), Arc::clone(&b));
    let sequence = CoefficientSequence::from_functions(
        id.clone(),
        move |s| a_seq(s),
        move |s| b_seq(s),
    );
    let (a_mu, b_mu) = (Arc::clone(&a), Arc::clone(&b));
    Ok(Ensemble {
        id: id.clone(),
        sequence,
        contraction: None,
        mu: LimitMeasure::curve(move |s| a_mu(s), move |s| b_mu(s)),
        expected_density: None,
        provenance: format!("ensemble `{id}` sampled from caller-supplied coefficient functions"),
    })
}
