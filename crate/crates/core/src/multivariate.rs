//! Multivariate responses: project centered outputs onto a truncated
//! principal-component basis, fit one independent chain per component score,
//! and map draws back to the output space.

use alloc::vec;
use alloc::vec::Vec;

use crate::chain::{predict_features, PosteriorChain, Prediction};
use crate::dataset::{Dataset, Features};
use crate::error::{Error, Result};
use crate::hyper::Hyperparams;
use crate::linalg::{symmetric_eigen, Matrix};
use crate::math;
use crate::sampler::run_chain;

/// How many components to keep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    Components(usize),
    /// Smallest count whose cumulative explained variance reaches this fraction.
    VarianceFraction(f64),
}

/// Orthonormal output basis with the centering vector.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ResponseBasis {
    /// `D x D-` with orthonormal columns.
    pub h: Matrix,
    pub y_mean: Vec<f64>,
    /// Sample variance of each retained score, nonincreasing.
    pub explained_variance: Vec<f64>,
}

impl ResponseBasis {
    pub fn output_dim(&self) -> usize {
        self.h.rows()
    }

    pub fn d_minus(&self) -> usize {
        self.h.cols()
    }

    /// Scores `H'(y_i - mean)` for each row, as an `n x D-` matrix.
    pub fn transform(&self, y: &Matrix) -> Result<Matrix> {
        if y.cols() != self.output_dim() {
            return Err(Error::DimensionMismatch("response width differs from the basis"));
        }
        let mut out = Matrix::zeros(y.rows(), self.d_minus());
        for i in 0..y.rows() {
            for d in 0..self.d_minus() {
                let h = self.h.col(d);
                out[(i, d)] = (0..self.output_dim()).map(|k| h[k] * (y[(i, k)] - self.y_mean[k])).sum();
            }
        }
        Ok(out)
    }

    /// `mean + H eta_i` for each row of an `n x D-` score matrix.
    pub fn reconstruct(&self, eta: &Matrix) -> Result<Matrix> {
        if eta.cols() != self.d_minus() {
            return Err(Error::DimensionMismatch("score width differs from the basis"));
        }
        let mut out = Matrix::zeros(eta.rows(), self.output_dim());
        for i in 0..eta.rows() {
            for k in 0..self.output_dim() {
                out[(i, k)] = self.y_mean[k] + (0..self.d_minus()).map(|d| self.h[(k, d)] * eta[(i, d)]).sum::<f64>();
            }
        }
        Ok(out)
    }
}

/// Principal-component basis of the column-centered responses.
pub fn fit_response_basis(y: &Matrix, truncation: Truncation) -> Result<ResponseBasis> {
    let (n, d) = (y.rows(), y.cols());
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    let y_mean: Vec<f64> = (0..d).map(|k| math::mean(y.col(k))).collect();
    let mut centered = y.clone();
    for (k, m) in y_mean.iter().enumerate() {
        centered.col_mut(k).iter_mut().for_each(|v| *v -= m);
    }
    let (values, vectors) = symmetric_eigen(&centered.gram());
    let total: f64 = values.iter().map(|v| v.max(0.0)).sum();
    let scale = centered.as_col_major().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if !(scale > 0.0) || !(total > 0.0) {
        return Err(Error::DegenerateResponse);
    }
    let keep = match truncation {
        Truncation::Components(k) => {
            if k == 0 || k > n.min(d) {
                return Err(Error::InvalidArgument("component count must be between 1 and min(n, D)".into()));
            }
            k
        }
        Truncation::VarianceFraction(f) => {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::InvalidArgument("variance fraction must be in (0, 1]".into()));
            }
            let mut acc = 0.0;
            let mut k = 0;
            while k < values.len() && acc < f * total * (1.0 - 1e-12) {
                acc += values[k].max(0.0);
                k += 1;
            }
            k.clamp(1, n.min(d))
        }
    };
    let columns: Vec<Vec<f64>> = (0..keep).map(|c| vectors.col(c).to_vec()).collect();
    let explained_variance = values[..keep].iter().map(|v| v.max(0.0) / (n as f64 - 1.0)).collect();
    Ok(ResponseBasis { h: Matrix::from_columns(d, &columns), y_mean, explained_variance })
}

/// Per-component seed: a splitmix64 hash of the master seed and the index.
pub fn component_seed(seed: u64, d: usize) -> u64 {
    let mut z = seed.wrapping_add((d as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fits the chain for score column `d`.
pub fn fit_component(features: &Features, scores: &Matrix, hyper: &Hyperparams, d: usize) -> Result<PosteriorChain> {
    let data = Dataset { features: features.clone(), y: scores.col(d).to_vec() };
    let mut h = hyper.clone();
    h.seed = component_seed(hyper.seed, d);
    run_chain(&data, &h)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultivariateFit {
    pub basis: ResponseBasis,
    pub chains: Vec<PosteriorChain>,
}

/// Fits every component sequentially.
pub fn fit_multivariate(features: &Features, y: &Matrix, hyper: &Hyperparams, truncation: Truncation) -> Result<MultivariateFit> {
    if y.rows() != features.n() {
        return Err(Error::DimensionMismatch("response rows differ from feature rows"));
    }
    let basis = fit_response_basis(y, truncation)?;
    let scores = basis.transform(y)?;
    let chains = (0..basis.d_minus()).map(|d| fit_component(features, &scores, hyper, d)).collect::<Result<Vec<_>>>()?;
    Ok(MultivariateFit { basis, chains })
}

/// Per-component predictions together with the basis that maps them back.
#[derive(Debug, Clone, PartialEq)]
pub struct MultivariatePrediction {
    pub basis: ResponseBasis,
    pub components: Vec<Prediction>,
}

impl MultivariatePrediction {
    pub fn n_rows(&self) -> usize {
        self.components.first().map_or(0, Prediction::n_rows)
    }

    /// Posterior mean in output space, `n x D`.
    pub fn mean(&self) -> Result<Matrix> {
        let means: Vec<Vec<f64>> = self.components.iter().map(Prediction::mean).collect();
        self.basis.reconstruct(&Matrix::from_columns(self.n_rows(), &means))
    }

    /// Draws for output dimension `k`: `mean_k + sum_d H_kd eta_d^(s)`, with
    /// noise level `sqrt(sum_d H_kd^2 sigma_d^(s)^2)` (the exact marginal of
    /// independent component noise).
    pub fn output(&self, k: usize) -> Prediction {
        let n = self.n_rows();
        let n_draws = self.components.first().map_or(0, Prediction::n_draws);
        let mut draws = vec![vec![self.basis.y_mean[k]; n]; n_draws];
        let mut var = vec![0.0; n_draws];
        for (d, comp) in self.components.iter().enumerate() {
            let h = self.basis.h[(k, d)];
            for s in 0..n_draws {
                for (o, v) in draws[s].iter_mut().zip(&comp.draws[s]) {
                    *o += h * v;
                }
                var[s] += h * h * comp.sigma[s] * comp.sigma[s];
            }
        }
        Prediction { draws, sigma: var.into_iter().map(math::sqrt).collect() }
    }
}

pub fn predict_multivariate(fit: &MultivariateFit, features: &Features) -> Result<MultivariatePrediction> {
    let components = fit.chains.iter().map(|c| predict_features(c, features)).collect::<Result<Vec<_>>>()?;
    if components.windows(2).any(|w| w[0].n_draws() != w[1].n_draws()) {
        return Err(Error::DimensionMismatch("component chains retain different numbers of draws"));
    }
    Ok(MultivariatePrediction { basis: fit.basis.clone(), components })
}
