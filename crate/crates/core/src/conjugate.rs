//! Zellner–Siow marginal likelihood and the Gibbs draws for the
//! coefficients, noise variance and shrinkage.
//!
//! With `beta | sigma2, tau ~ N(0, tau sigma2 (B'B)^-1)` and
//! `pi(sigma2) ∝ 1/sigma2`, integrating out `beta` and `sigma2` leaves
//!
//! ```text
//! pi(y | B, tau) ∝ (1 + tau)^(-w/2) (y'y - tau/(1+tau) y'B(B'B)^-1 B'y)^(-n/2)
//! ```
//!
//! for a design with `w` columns. The power of `(1 + tau)` depends only on
//! the column count, so proposal ratios apply it separately.

use alloc::vec::Vec;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{householder_qr, norm_sq, Cholesky, Matrix};
use crate::math;

/// Largest Gram condition number accepted before a design is treated as
/// singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Factorized design statistics against the response.
///
/// The factor comes from a Householder QR of the design rather than from
/// `B'B`, so the residual sum of squares is read off `Q'y` directly and
/// keeps its accuracy for poorly conditioned spline blocks.
#[derive(Debug, Clone)]
pub struct GramCache {
    pub btb: Matrix,
    pub bty: Vec<f64>,
    pub yty: f64,
    /// `L = R'` with `L L' = B'B`.
    pub chol: Cholesky,
    /// Leading `w` entries of `Q'y`.
    pub qty: Vec<f64>,
    /// `y'B(B'B)^-1 B'y`.
    pub ssq_fit: f64,
    /// `y'y - ssq_fit`, accumulated from the trailing entries of `Q'y`.
    pub rss: f64,
    pub n: usize,
}

impl GramCache {
    pub fn width(&self) -> usize {
        self.bty.len()
    }
}

pub fn gram_cache(design: &Matrix, y: &[f64]) -> Result<GramCache> {
    let (n, w) = (design.rows(), design.cols());
    if n != y.len() {
        return Err(Error::DimensionMismatch("design rows and response length differ"));
    }
    if w > n {
        return Err(Error::SingularDesign);
    }
    let (lower, mut qty) = householder_qr(design, y);
    let diag: Vec<f64> = (0..w).map(|j| norm_sq(design.col(j))).collect();
    let chol = Cholesky::from_lower(lower, &diag, MAX_CONDITION)?;
    let rss = norm_sq(&qty[w..]);
    qty.truncate(w);
    let ssq_fit = norm_sq(&qty);
    let l = chol.lower();
    let mut btb = Matrix::zeros(w, w);
    for i in 0..w {
        for j in 0..=i {
            let v: f64 = (0..=j).map(|k| l[(i, k)] * l[(j, k)]).sum();
            btb[(i, j)] = v;
            btb[(j, i)] = v;
        }
    }
    let bty = (0..w).map(|i| (0..=i).map(|k| l[(i, k)] * qty[k]).sum()).collect();
    Ok(GramCache { btb, bty, yty: norm_sq(y), chol, qty, ssq_fit, rss, n })
}

/// `-(n/2) log(y'y - tau/(1+tau) ssq_fit)`, with the bracket evaluated as
/// `y'y/(1+tau) + tau/(1+tau) rss` to avoid cancellation.
pub fn log_marginal_quadform(cache: &GramCache, tau: f64) -> Result<f64> {
    let shrink = tau / (1.0 + tau);
    let q = cache.yty / (1.0 + tau) + shrink * cache.rss;
    if !(q > 0.0) {
        return Err(Error::SingularDesign);
    }
    Ok(-0.5 * cache.n as f64 * math::ln(q))
}

/// Full log marginal likelihood up to a constant shared by all designs.
pub fn log_marginal(cache: &GramCache, tau: f64) -> Result<f64> {
    Ok(-0.5 * cache.width() as f64 * math::log1p(tau) + log_marginal_quadform(cache, tau)?)
}

/// `tau/(1+tau) (B'B)^-1 B'y`.
pub fn posterior_mean(cache: &GramCache, tau: f64) -> Vec<f64> {
    let shrink = tau / (1.0 + tau);
    cache.chol.solve_upper(&cache.qty).into_iter().map(|b| shrink * b).collect()
}

/// Draws `beta ~ N(Lambda B'y, sigma2 Lambda)` with
/// `Lambda = tau/(1+tau) (B'B)^-1`.
pub fn gibbs_beta<R: Rng + ?Sized>(cache: &GramCache, sigma2: f64, tau: f64, rng: &mut R) -> Vec<f64> {
    let shrink = tau / (1.0 + tau);
    let mean = posterior_mean(cache, tau);
    let z: Vec<f64> = (0..cache.width()).map(|_| StandardNormal.sample(rng)).collect();
    // L^-T z has covariance (B'B)^-1.
    let noise = cache.chol.solve_upper(&z);
    let scale = math::sqrt(sigma2 * shrink);
    mean.into_iter().zip(noise).map(|(m, e)| m + scale * e).collect()
}

/// Draws from Inv-Gamma(shape, rate).
pub fn inverse_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> f64 {
    let g = Gamma::new(shape, 1.0 / rate).expect("positive inverse-gamma parameters");
    1.0 / g.sample(rng)
}

/// `sigma2 ~ Inv-Gamma(n/2, ||y - B beta||^2 / 2)`.
pub fn gibbs_sigma2<R: Rng + ?Sized>(residual_ssq: f64, n: usize, rng: &mut R) -> f64 {
    inverse_gamma(0.5 * n as f64, 0.5 * residual_ssq, rng)
}

/// `tau ~ Inv-Gamma(1 + K_total/2, (n + ||B beta||^2 / sigma2) / 2)`, where
/// `fitted_ssq = ||B beta||^2` includes the intercept column.
pub fn gibbs_tau<R: Rng + ?Sized>(fitted_ssq: f64, sigma2: f64, k_total: usize, n: usize, rng: &mut R) -> f64 {
    inverse_gamma(1.0 + 0.5 * k_total as f64, 0.5 * (n as f64 + fitted_ssq / sigma2), rng)
}

/// `||y - B beta||^2` and `||B beta||^2` through the triangular factor:
/// `B beta = Q R beta`, so both are norms in the rotated coordinates.
pub fn fit_sums(cache: &GramCache, beta: &[f64]) -> (f64, f64) {
    let l = cache.chol.lower();
    let w = cache.width();
    let (mut fitted, mut residual) = (0.0, cache.rss);
    for i in 0..w {
        let rb: f64 = (i..w).map(|k| l[(k, i)] * beta[k]).sum();
        fitted += rb * rb;
        residual += (cache.qty[i] - rb) * (cache.qty[i] - rb);
    }
    (residual, fitted)
}
