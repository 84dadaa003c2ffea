//! Coefficient sequences: for every size k they emit the diagonal vector
//! a^k of length k and the off-diagonal vector b^k of length k-1 that define
//! a Jacobi matrix.
//!
//! A sequence is a pure, deterministic map from k to that pair. Random kinds
//! are deterministic too: the per-k stream is seeded with `seed XOR k`, so a
//! ladder of sizes can be re-run bit-identically. Transformations
//! (unit-box normalization, contraction by r(k)) stack on top of the base
//! generator and are applied at generation time.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shared evaluator for curves and sampled coefficient functions on [0, 1].
pub type CurveFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Self-declared small-deviation class of a sequence.
///
/// `S` promises unit-box values with total variation o(k); `SPrime` promises
/// O(k^(1-delta)) variation with O(log k) magnitudes. The declaration is an
/// assertion by the sequence author, not something the crate can prove; only
/// the unit-box part of `S` is enforced at generation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeclaredClass {
    S,
    SPrime,
    Neither,
    Unknown,
}

/// Named one-dimensional functions on [0, 1], expressible in JSON configs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum FunctionSpec {
    Constant { value: f64 },
    Linear { slope: f64, intercept: f64 },
    /// scale * s^exponent
    Power { scale: f64, exponent: f64 },
}

impl FunctionSpec {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            FunctionSpec::Constant { value } => *value,
            FunctionSpec::Linear { slope, intercept } => slope * s + intercept,
            FunctionSpec::Power { scale, exponent } => scale * s.powf(*exponent),
        }
    }
}

/// A coefficient function: either a named JSON-expressible form or an
/// arbitrary evaluator supplied through the API.
#[derive(Clone)]
pub enum ShapeFn {
    Named(FunctionSpec),
    Custom(CurveFn),
}

impl ShapeFn {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            ShapeFn::Named(spec) => spec.eval(s),
            ShapeFn::Custom(f) => f(s),
        }
    }
}

impl fmt::Debug for ShapeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeFn::Named(spec) => write!(f, "ShapeFn::Named({spec:?})"),
            ShapeFn::Custom(_) => write!(f, "ShapeFn::Custom(..)"),
        }
    }
}

impl From<FunctionSpec> for ShapeFn {
    fn from(spec: FunctionSpec) -> Self {
        ShapeFn::Named(spec)
    }
}

/// Built-in k-dependent coefficient families.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum RecurrenceFamily {
    /// a_j = 0, b_j = sqrt(j/2): symmetrized Hermite recurrence.
    Hermite,
    /// a_j = 2j - 1, b_j = j: Laguerre recurrence.
    Laguerre,
    /// a_j = (j-1)/k, b_j = j*sqrt(1 - (j/k)^2)/k.
    VanVleck,
    /// Constant pair (a, b) chosen by the parity of k. This family has no
    /// joint limit distribution; it exists to exercise subsequence selection.
    Alternating {
        even: (f64, f64),
        odd: (f64, f64),
    },
}

/// Built-in random coefficient models. All are i.i.d. per entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum RandomModel {
    /// Centered Gaussians with standard deviation sigma(k) = k^(-sigma_exponent).
    GaussianDecay { sigma_exponent: f64 },
    /// Uniform [0, 1] draws sorted ascending (order statistics).
    UniformOrderStats,
    /// Uniform [0, 1] draws left unsorted.
    UniformIid,
}

/// The base generator of a sequence, before any transformation.
#[derive(Clone)]
pub enum Generator {
    /// Fixed tables; size-k requests take the first k (resp. k-1) entries.
    ExplicitTable {
        diagonal: Vec<f64>,
        offdiagonal: Vec<f64>,
    },
    /// a_i = a(i/k) for i = 1..k and b_i = b(i/k) for i = 1..k-1.
    SampledFunction { a: ShapeFn, b: ShapeFn },
    RecurrenceFamily(RecurrenceFamily),
    Random(RandomModel),
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::ExplicitTable { diagonal, offdiagonal } => f
                .debug_struct("ExplicitTable")
                .field("diagonal_len", &diagonal.len())
                .field("offdiagonal_len", &offdiagonal.len())
                .finish(),
            Generator::SampledFunction { a, b } => f
                .debug_struct("SampledFunction")
                .field("a", a)
                .field("b", b)
                .finish(),
            Generator::RecurrenceFamily(fam) => write!(f, "RecurrenceFamily({fam:?})"),
            Generator::Random(model) => write!(f, "Random({model:?})"),
        }
    }
}

/// A positive scaling factor r(k) used to contract sequences.
#[derive(Clone)]
pub enum ScalingFn {
    Constant(f64),
    /// scale * k^exponent
    PowerOfK { scale: f64, exponent: f64 },
    Custom(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl ScalingFn {
    /// sqrt(c * k), the form used by the Hermite contraction.
    pub fn sqrt_of(c: f64) -> Self {
        ScalingFn::PowerOfK {
            scale: c.sqrt(),
            exponent: 0.5,
        }
    }

    /// c * k, the form used by the Laguerre contraction.
    pub fn linear(c: f64) -> Self {
        ScalingFn::PowerOfK {
            scale: c,
            exponent: 1.0,
        }
    }

    pub fn eval(&self, k: usize) -> f64 {
        match self {
            ScalingFn::Constant(c) => *c,
            ScalingFn::PowerOfK { scale, exponent } => scale * (k as f64).powf(*exponent),
            ScalingFn::Custom(f) => f(k),
        }
    }
}

impl fmt::Debug for ScalingFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalingFn::Constant(c) => write!(f, "ScalingFn::Constant({c})"),
            ScalingFn::PowerOfK { scale, exponent } => {
                write!(f, "ScalingFn::PowerOfK({scale} * k^{exponent})")
            }
            ScalingFn::Custom(_) => write!(f, "ScalingFn::Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
enum Transform {
    NormalizeToUnitBox { bound: f64 },
    Contract { scaling: ScalingFn },
}

/// A deterministic generator of coefficient pairs for every size k.
#[derive(Debug, Clone)]
pub struct CoefficientSequence {
    id: String,
    generator: Generator,
    seed: Option<u64>,
    declared_class: DeclaredClass,
    transforms: Vec<Transform>,
}

impl CoefficientSequence {
    pub fn new(id: impl Into<String>, generator: Generator) -> Self {
        Self {
            id: id.into(),
            generator,
            seed: None,
            declared_class: DeclaredClass::Unknown,
            transforms: Vec::new(),
        }
    }

    /// Sequence backed by fixed tables; generation takes prefixes.
    pub fn explicit_table(
        id: impl Into<String>,
        diagonal: Vec<f64>,
        offdiagonal: Vec<f64>,
    ) -> Self {
        Self::new(id, Generator::ExplicitTable { diagonal, offdiagonal })
    }

    /// Sequence sampling two functions on the uniform grid i/k.
    pub fn sampled(id: impl Into<String>, a: impl Into<ShapeFn>, b: impl Into<ShapeFn>) -> Self {
        Self::new(
            id,
            Generator::SampledFunction {
                a: a.into(),
                b: b.into(),
            },
        )
    }

    /// Sequence sampling two arbitrary evaluators on the uniform grid i/k.
    pub fn from_functions<F, G>(id: impl Into<String>, a: F, b: G) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(
            id,
            Generator::SampledFunction {
                a: ShapeFn::Custom(Arc::new(a)),
                b: ShapeFn::Custom(Arc::new(b)),
            },
        )
    }

    /// Constant-band sequence a_i = a, b_i = b (the Toeplitz case).
    pub fn constant(id: impl Into<String>, a: f64, b: f64) -> Self {
        Self::sampled(
            id,
            FunctionSpec::Constant { value: a },
            FunctionSpec::Constant { value: b },
        )
    }

    pub fn recurrence(id: impl Into<String>, family: RecurrenceFamily) -> Self {
        Self::new(id, Generator::RecurrenceFamily(family))
    }

    pub fn random(id: impl Into<String>, model: RandomModel, seed: u64) -> Self {
        let mut seq = Self::new(id, Generator::Random(model));
        seq.seed = Some(seed);
        seq
    }

    pub fn with_declared_class(mut self, class: DeclaredClass) -> Self {
        self.declared_class = class;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn declared_class(&self) -> DeclaredClass {
        self.declared_class
    }

    /// Builds a sequence from its JSON configuration.
    pub fn from_config(config: &SequenceConfig) -> Result<Self> {
        let generator = match &config.generator {
            GeneratorConfig::ExplicitTable { diagonal, offdiagonal } => Generator::ExplicitTable {
                diagonal: diagonal.clone(),
                offdiagonal: offdiagonal.clone(),
            },
            GeneratorConfig::SampledFunction { a, b } => Generator::SampledFunction {
                a: ShapeFn::Named(a.clone()),
                b: ShapeFn::Named(b.clone()),
            },
            GeneratorConfig::RecurrenceFamily { family } => {
                Generator::RecurrenceFamily(family.clone())
            }
            GeneratorConfig::Random { model } => Generator::Random(model.clone()),
        };
        if matches!(generator, Generator::Random(_)) && config.seed.is_none() {
            return Err(Error::Config(format!(
                "sequence `{}` has a random kind but no seed",
                config.id
            )));
        }
        Ok(Self {
            id: config.id.clone(),
            generator,
            seed: config.seed,
            declared_class: config.declared_class,
            transforms: Vec::new(),
        })
    }

    /// Emits the coefficient pair (a^k, b^k) for the requested size.
    pub fn generate(&self, k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if k == 0 {
            return Err(Error::Size("requested size k must be at least 1".into()));
        }
        let (mut diag, mut off) = self.generate_base(k)?;
        debug_assert_eq!(diag.len(), k);
        debug_assert_eq!(off.len(), k - 1);
        for transform in &self.transforms {
            match transform {
                Transform::NormalizeToUnitBox { bound } => {
                    normalize_in_place(&mut diag, *bound, k)?;
                    normalize_in_place(&mut off, *bound, k)?;
                }
                Transform::Contract { scaling } => {
                    let r = scaling.eval(k);
                    if !(r > 0.0) {
                        return Err(Error::Scaling { k, value: r });
                    }
                    for v in diag.iter_mut().chain(off.iter_mut()) {
                        *v /= r;
                    }
                }
            }
        }
        if self.declared_class == DeclaredClass::S {
            for (i, v) in diag.iter().chain(off.iter()).enumerate() {
                if !(0.0..=1.0).contains(v) {
                    return Err(Error::Config(format!(
                        "sequence `{}` is declared in class S but emits {v} at k = {k}, position {}",
                        self.id,
                        i + 1
                    )));
                }
            }
        }
        Ok((diag, off))
    }

    fn generate_base(&self, k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        match &self.generator {
            Generator::ExplicitTable { diagonal, offdiagonal } => {
                if diagonal.len() < k || offdiagonal.len() < k.saturating_sub(1) {
                    return Err(Error::Size(format!(
                        "explicit table `{}` holds {} diagonal / {} off-diagonal entries, too short for k = {k}",
                        self.id,
                        diagonal.len(),
                        offdiagonal.len()
                    )));
                }
                Ok((diagonal[..k].to_vec(), offdiagonal[..k - 1].to_vec()))
            }
            Generator::SampledFunction { a, b } => {
                let diag = sample_on_grid(a, k, k, &self.id)?;
                let off = sample_on_grid(b, k - 1, k, &self.id)?;
                Ok((diag, off))
            }
            Generator::RecurrenceFamily(family) => Ok(family.generate(k)),
            Generator::Random(model) => {
                let seed = self.seed.ok_or_else(|| {
                    Error::Config(format!("random sequence `{}` has no seed", self.id))
                })?;
                Ok(model.generate(seed, k))
            }
        }
    }

    /// Shifts and rescales values from [-bound, bound] into [0, 1] via
    /// x -> 1/2 + x/(2*bound). Emitted values outside the bound fail at
    /// generation time.
    pub fn normalize_to_unit_box(&self, bound: f64) -> Result<CoefficientSequence> {
        if !(bound > 0.0) {
            return Err(Error::Parameter(format!(
                "normalization bound must be positive, got {bound}"
            )));
        }
        let mut out = self.clone();
        out.transforms.push(Transform::NormalizeToUnitBox { bound });
        // Normalization lands any small-deviation sequence in the unit box.
        out.declared_class = match self.declared_class {
            DeclaredClass::S | DeclaredClass::SPrime => DeclaredClass::S,
            other => other,
        };
        Ok(out)
    }

    /// Divides every emitted value by r(k).
    pub fn contract(&self, scaling: ScalingFn) -> CoefficientSequence {
        let mut out = self.clone();
        out.transforms.push(Transform::Contract { scaling });
        // Class membership of the contracted sequence is the caller's claim.
        out.declared_class = DeclaredClass::Unknown;
        out
    }
}

fn sample_on_grid(f: &ShapeFn, count: usize, k: usize, id: &str) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(count);
    for i in 1..=count {
        let v = f.eval(i as f64 / k as f64);
        if !v.is_finite() {
            return Err(Error::Domain(format!(
                "sequence `{id}`: sampled function returned {v} at {i}/{k}"
            )));
        }
        values.push(v);
    }
    Ok(values)
}

fn normalize_in_place(values: &mut [f64], bound: f64, k: usize) -> Result<()> {
    for (i, v) in values.iter_mut().enumerate() {
        if v.abs() > bound {
            return Err(Error::BoundViolation {
                k,
                index: i + 1,
                value: *v,
                bound,
            });
        }
        *v = 0.5 + *v / (2.0 * bound);
    }
    Ok(())
}

impl RecurrenceFamily {
    fn generate(&self, k: usize) -> (Vec<f64>, Vec<f64>) {
        match self {
            RecurrenceFamily::Hermite => {
                let diag = vec![0.0; k];
                let off = (1..k).map(|j| (j as f64 / 2.0).sqrt()).collect();
                (diag, off)
            }
            RecurrenceFamily::Laguerre => {
                let diag = (1..=k).map(|j| 2.0 * j as f64 - 1.0).collect();
                let off = (1..k).map(|j| j as f64).collect();
                (diag, off)
            }
            RecurrenceFamily::VanVleck => {
                let kf = k as f64;
                let diag = (1..=k).map(|j| (j as f64 - 1.0) / kf).collect();
                let off = (1..k)
                    .map(|j| {
                        let s = j as f64 / kf;
                        j as f64 * (1.0 - s * s).max(0.0).sqrt() / kf
                    })
                    .collect();
                (diag, off)
            }
            RecurrenceFamily::Alternating { even, odd } => {
                let (a, b) = if k % 2 == 0 { *even } else { *odd };
                (vec![a; k], vec![b; k - 1])
            }
        }
    }
}

impl RandomModel {
    /// Deterministic generation: the ChaCha8 stream cipher seeded with
    /// `seed XOR k` drives both bands, on separate stream ids.
    fn generate(&self, seed: u64, k: usize) -> (Vec<f64>, Vec<f64>) {
        let sub_seed = seed ^ k as u64;
        let mut diag_rng = ChaCha8Rng::seed_from_u64(sub_seed);
        diag_rng.set_stream(0);
        let mut off_rng = ChaCha8Rng::seed_from_u64(sub_seed);
        off_rng.set_stream(1);
        match self {
            RandomModel::GaussianDecay { sigma_exponent } => {
                let sigma = (k as f64).powf(-sigma_exponent);
                (
                    gaussian_vec(&mut diag_rng, k, sigma),
                    gaussian_vec(&mut off_rng, k - 1, sigma),
                )
            }
            RandomModel::UniformOrderStats => {
                let mut diag = uniform_vec(&mut diag_rng, k);
                // Draw k for both bands and drop the largest off-diagonal
                // entry, mirroring the first-(k-1)-samples convention.
                let mut off = uniform_vec(&mut off_rng, k);
                diag.sort_by(f64::total_cmp);
                off.sort_by(f64::total_cmp);
                off.truncate(k - 1);
                (diag, off)
            }
            RandomModel::UniformIid => (
                uniform_vec(&mut diag_rng, k),
                uniform_vec(&mut off_rng, k - 1),
            ),
        }
    }
}

fn uniform_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>()).collect()
}

/// Standard normals by the Box-Muller transform, scaled by sigma.
fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize, sigma: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
        let u2: f64 = rng.random();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        out.push(sigma * radius * angle.cos());
        if out.len() < n {
            out.push(sigma * radius * angle.sin());
        }
    }
    out
}

/// JSON-facing description of a sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceConfig {
    pub id: String,
    #[serde(flatten)]
    pub generator: GeneratorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub declared_class: DeclaredClass,
}

/// The `kind`/`params` pair of a sequence configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum GeneratorConfig {
    ExplicitTable {
        diagonal: Vec<f64>,
        offdiagonal: Vec<f64>,
    },
    SampledFunction {
        a: FunctionSpec,
        b: FunctionSpec,
    },
    RecurrenceFamily {
        family: RecurrenceFamily,
    },
    Random {
        model: RandomModel,
    },
}
