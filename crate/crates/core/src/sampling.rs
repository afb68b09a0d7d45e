//! Dataset generation: IID sampling, the Y-oblivious sequential sampler, and
//! the mutilated-model draw for the next label.
//!
//! Every sampler is a pure function of (model, parameters, [`RngSpec`]). The
//! generator is ChaCha8 as shipped by `rand_chacha`: the 64-bit seed is
//! expanded with `SeedableRng::seed_from_u64` and the stream id selects one of
//! ChaCha's 2^64 independent streams, so identical (seed, stream) pairs
//! reproduce identical datasets on every platform. Concurrent trials must use
//! distinct streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{JointModel, ModelError};

#[derive(Debug, Error, PartialEq)]
pub enum SamplingError {
    #[error("strategy returned x={x} at step {step}, but x_size is {x_size}")]
    StrategyRange {
        step: usize,
        x: usize,
        x_size: usize,
    },
    #[error("unknown strategy `{0}` (expected constant:<k>, uniform, copy-z or majority-z)")]
    UnknownStrategy(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Seed and stream id identifying one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: u64,
}

impl RngSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngSpec { seed, stream }
    }

    /// Instantiates the ChaCha8 generator for this (seed, stream) pair.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// An ordered sample of (x, y, z) category-index triples.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Dataset {
    pub rows: Vec<(usize, usize, usize)>,
}

impl Dataset {
    pub fn new(rows: Vec<(usize, usize, usize)>) -> Self {
        Dataset { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Inverse-CDF draw: the first index whose running total exceeds `u`.
///
/// `weights` must be nonnegative and sum to (approximately) 1; the last index
/// absorbs any shortfall left by floating-point accumulation.
fn inverse_cdf(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

fn unflatten(model: &JointModel, cell: usize) -> (usize, usize, usize) {
    let z = cell % model.z_size();
    let y = (cell / model.z_size()) % model.y_size();
    let x = cell / (model.z_size() * model.y_size());
    (x, y, z)
}

/// Draws `n` IID rows from the model via inverse-CDF over the flat table.
pub fn sample_iid(model: &JointModel, n: usize, rng_spec: RngSpec) -> Dataset {
    let mut rng = rng_spec.rng();
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.gen();
        rows.push(unflatten(model, inverse_cdf(model.probs(), u)));
    }
    Dataset { rows }
}

/// Draws one label from the interventional distribution after setting X to `x`.
///
/// Callers pairing this with a sampled dataset must pass a distinct stream;
/// the draw is meant to be independent of everything else.
pub fn sample_mutilated_y(
    model: &JointModel,
    x: usize,
    rng_spec: RngSpec,
) -> Result<usize, ModelError> {
    let dist = model.interventional_py(x)?;
    let mut rng = rng_spec.rng();
    let u: f64 = rng.gen();
    Ok(inverse_cdf(&dist.p, u))
}

/// Decision rule choosing the next treatment in the sequential sampler.
///
/// The rule sees the completed (x, z) pairs of all earlier steps, the current
/// step's z (`None` when the sampler runs in strict-past mode), and the
/// sampler's randomness. No y value is ever passed in, which is what makes
/// the sequential guarantees go through.
pub trait XStrategy {
    fn next_x(
        &mut self,
        x_size: usize,
        history: &[(usize, usize)],
        current_z: Option<usize>,
        rng: &mut ChaCha8Rng,
    ) -> usize;
}

/// The built-in strategy registry.
///
/// Names accepted by [`StrategyKind::parse`]: `constant:<k>`, `uniform`,
/// `copy-z`, `majority-z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StrategyKind {
    /// Always picks the fixed index k.
    Constant(usize),
    /// Picks uniformly at random, ignoring history.
    Uniform,
    /// Copies the previous step's z; 0 at the first step.
    CopyZ,
    /// Picks the historically most frequent z; any tie resolves to 0.
    MajorityZ,
}

impl StrategyKind {
    pub fn parse(name: &str) -> Result<Self, SamplingError> {
        if let Some(arg) = name.strip_prefix("constant:") {
            return arg
                .parse::<usize>()
                .map(StrategyKind::Constant)
                .map_err(|_| SamplingError::UnknownStrategy(name.to_owned()));
        }
        match name {
            "uniform" => Ok(StrategyKind::Uniform),
            "copy-z" => Ok(StrategyKind::CopyZ),
            "majority-z" => Ok(StrategyKind::MajorityZ),
            _ => Err(SamplingError::UnknownStrategy(name.to_owned())),
        }
    }

    pub fn name(&self) -> String {
        match self {
            StrategyKind::Constant(k) => format!("constant:{k}"),
            StrategyKind::Uniform => "uniform".to_owned(),
            StrategyKind::CopyZ => "copy-z".to_owned(),
            StrategyKind::MajorityZ => "majority-z".to_owned(),
        }
    }
}

impl XStrategy for StrategyKind {
    fn next_x(
        &mut self,
        x_size: usize,
        history: &[(usize, usize)],
        _current_z: Option<usize>,
        rng: &mut ChaCha8Rng,
    ) -> usize {
        match *self {
            StrategyKind::Constant(k) => k,
            StrategyKind::Uniform => rng.gen_range(0..x_size),
            StrategyKind::CopyZ => history.last().map(|&(_, z)| z).unwrap_or(0),
            StrategyKind::MajorityZ => {
                let mut counts: Vec<usize> = Vec::new();
                for &(_, z) in history {
                    if z >= counts.len() {
                        counts.resize(z + 1, 0);
                    }
                    counts[z] += 1;
                }
                let best = counts.iter().copied().max().unwrap_or(0);
                if best == 0 {
                    return 0;
                }
                let mut winners = counts.iter().enumerate().filter(|&(_, &c)| c == best);
                let first = winners.next().map(|(z, _)| z).unwrap_or(0);
                if winners.next().is_some() {
                    0
                } else {
                    first
                }
            }
        }
    }
}

/// Sequential sampler for the setting where X has no stable mechanism.
///
/// Per step, in this order: z is drawn from the model's Z marginal, the
/// strategy picks x (seeing the completed history and, unless `strict_past`,
/// the freshly drawn z), and y is drawn from P(Y | X=x, Z=z). The history
/// handed to the strategy only ever contains (x, z) pairs.
pub fn sample_oblivious(
    model: &JointModel,
    strategy: &mut dyn XStrategy,
    n: usize,
    rng_spec: RngSpec,
    strict_past: bool,
) -> Result<Dataset, SamplingError> {
    let mut rng = rng_spec.rng();
    let marginal = model.marginal_z();
    let mut history: Vec<(usize, usize)> = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for step in 0..n {
        let u: f64 = rng.gen();
        let z = inverse_cdf(&marginal, u);
        let shown_z = if strict_past { None } else { Some(z) };
        let x = strategy.next_x(model.x_size(), &history, shown_z, &mut rng);
        if x >= model.x_size() {
            return Err(SamplingError::StrategyRange {
                step,
                x,
                x_size: model.x_size(),
            });
        }
        let conditional = model
            .conditional_y_given_xz(x, z)
            .expect("x and z are in range");
        let u: f64 = rng.gen();
        let y = inverse_cdf(&conditional, u);
        rows.push((x, y, z));
        history.push((x, z));
    }
    Ok(Dataset { rows })
}
