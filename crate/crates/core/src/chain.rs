//! Posterior chains and prediction from retained draws.

use alloc::vec;
use alloc::vec::Vec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::basis::build_component_basis;
use crate::dataset::{Features, RawTable, Standardization};
use crate::error::{Error, Result};
use crate::hyper::Hyperparams;
use crate::math;
use crate::model::ModelState;
use crate::sampler::{StepKind, StepOutcome};

/// Proposal and acceptance counts per move type.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MoveCounts {
    pub birth: [usize; 2],
    pub death: [usize; 2],
    pub change: [usize; 2],
    pub skipped: usize,
}

/// Per-iteration scalar traces over the whole run, burn-in included.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Traces {
    /// Noise standard deviation.
    pub sigma: Vec<f64>,
    pub m: Vec<usize>,
    pub tau: Vec<f64>,
    pub moves: MoveCounts,
}

impl Traces {
    pub fn with_capacity(n: usize) -> Self {
        Self { sigma: Vec::with_capacity(n), m: Vec::with_capacity(n), tau: Vec::with_capacity(n), ..Self::default() }
    }

    pub fn record(&mut self, model: &ModelState, outcome: &StepOutcome) {
        self.sigma.push(math::sqrt(model.sigma2));
        self.m.push(model.m());
        self.tau.push(model.tau);
        let slot = match outcome.kind {
            StepKind::Birth => &mut self.moves.birth,
            StepKind::Death => &mut self.moves.death,
            StepKind::Change => &mut self.moves.change,
            StepKind::Skipped => {
                self.moves.skipped += 1;
                return;
            }
        };
        slot[0] += 1;
        slot[1] += usize::from(outcome.accepted);
    }
}

/// Retained post-burn-in states plus everything needed to predict on
/// raw-scale inputs.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PosteriorChain {
    pub hyper: Hyperparams,
    pub standardization: Standardization,
    pub states: Vec<ModelState>,
    pub traces: Traces,
}

impl PosteriorChain {
    /// Posterior draws of `sigma` over the retained states.
    pub fn retained_sigma(&self) -> Vec<f64> {
        self.states.iter().map(|s| math::sqrt(s.sigma2)).collect()
    }
}

/// Noiseless response `f(x)` of one state at every row of `features`.
pub fn evaluate(state: &ModelState, features: &Features) -> Result<Vec<f64>> {
    let n = features.n();
    let mut out = vec![state.beta[0]; n];
    let mut offset = 1;
    for c in &state.components {
        let block = build_component_basis(features, c)?;
        let coef = &state.beta[offset..offset + block.cols()];
        for (l, b) in coef.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(block.col(l)) {
                *o += b * v;
            }
        }
        offset += block.cols();
    }
    if offset != state.beta.len() {
        return Err(Error::DimensionMismatch("coefficient count does not match ridge widths"));
    }
    Ok(out)
}

/// Per-draw noiseless predictions with the matching noise levels.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    /// `draws[s][i]` is `f^(s)(x_i)`.
    pub draws: Vec<Vec<f64>>,
    pub sigma: Vec<f64>,
}

impl Prediction {
    pub fn n_rows(&self) -> usize {
        self.draws.first().map_or(0, Vec::len)
    }

    pub fn n_draws(&self) -> usize {
        self.draws.len()
    }

    /// Pointwise posterior mean.
    pub fn mean(&self) -> Vec<f64> {
        let s = self.n_draws() as f64;
        let mut out = vec![0.0; self.n_rows()];
        for d in &self.draws {
            for (o, v) in out.iter_mut().zip(d) {
                *o += v;
            }
        }
        out.iter_mut().for_each(|o| *o /= s);
        out
    }

    /// Equal-tailed credible interval for `f(x)` at each row.
    pub fn credible(&self, level: f64) -> (Vec<f64>, Vec<f64>) {
        interval_from_draws(&self.draws, self.n_rows(), level)
    }

    /// Posterior predictive draws: each noiseless draw plus `N(0, sigma_s^2)`
    /// noise from a generator seeded with `seed`.
    pub fn predictive_draws(&self, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.draws
            .iter()
            .zip(&self.sigma)
            .map(|(d, s)| {
                d.iter()
                    .map(|v| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        v + s * z
                    })
                    .collect()
            })
            .collect()
    }

    /// Equal-tailed prediction interval for a new noisy response.
    pub fn predictive(&self, level: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
        interval_from_draws(&self.predictive_draws(seed), self.n_rows(), level)
    }
}

fn interval_from_draws(draws: &[Vec<f64>], n: usize, level: f64) -> (Vec<f64>, Vec<f64>) {
    let lo_q = 0.5 * (1.0 - level);
    let hi_q = 1.0 - lo_q;
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    let mut column = Vec::with_capacity(draws.len());
    for i in 0..n {
        column.clear();
        column.extend(draws.iter().map(|d| d[i]));
        math::sort_floats(&mut column);
        lower.push(math::quantile_sorted(&column, lo_q));
        upper.push(math::quantile_sorted(&column, hi_q));
    }
    (lower, upper)
}

/// Predicts at standardized features.
pub fn predict_features(chain: &PosteriorChain, features: &Features) -> Result<Prediction> {
    if features.p() != chain.standardization.p() {
        return Err(Error::DimensionMismatch("feature count differs from training"));
    }
    let draws = chain.states.iter().map(|s| evaluate(s, features)).collect::<Result<Vec<_>>>()?;
    Ok(Prediction { draws, sigma: chain.retained_sigma() })
}

/// Predicts at raw-scale inputs using the chain's stored standardization.
pub fn predict(chain: &PosteriorChain, table: &RawTable) -> Result<Prediction> {
    let features = chain.standardization.apply(table)?;
    predict_features(chain, &features)
}
