//! User-tunable constants and their data-dependent defaults.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use alloc::string::ToString;

/// Prior, proposal and run-length settings for one chain.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Hyperparams {
    /// Poisson mean of the ridge count.
    pub lambda: f64,
    /// Spline basis functions per ridge.
    pub basis_size: usize,
    /// Maximum number of active features in one ridge.
    pub max_active: usize,
    /// Prior probability that a ridge's initial knot lies inside the data.
    pub p0: f64,
    /// Quantile of the projections used as the initial knot's upper bound.
    pub q: f64,
    pub omega0: f64,
    pub upsilon0: f64,
    /// Concentration of the power spherical direction proposal.
    pub kappa: f64,
    pub n_mcmc: usize,
    pub n_burn: usize,
    pub seed: u64,
}

impl Hyperparams {
    /// Defaults for `n` rows with `p_real` real and `p_dummy` dummy features.
    pub fn defaults(n: usize, p_real: usize, p_dummy: usize) -> Self {
        Self {
            lambda: 10.0,
            basis_size: 4,
            max_active: default_max_active(p_real, p_dummy),
            p0: 2.0 / 3.0,
            q: default_q(n),
            omega0: 1.0,
            upsilon0: 1.0,
            kappa: 1000.0,
            n_mcmc: 10_000,
            n_burn: 9_000,
            seed: 0,
        }
    }

    pub fn defaults_for(data: &Dataset) -> Self {
        let f = &data.features;
        Self::defaults(f.n(), f.p_real(), f.p_dummy())
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidArgument(what.to_string()));
        if !(self.lambda > 0.0) {
            return bad("lambda must be positive");
        }
        if self.basis_size == 0 {
            return bad("basis size must be positive");
        }
        if self.max_active == 0 || self.max_active > p {
            return bad("max_active must lie in 1..=p");
        }
        if !(self.p0 > 0.0 && self.p0 <= 1.0) {
            return bad("p0 must lie in (0, 1]");
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            return bad("q must lie in (0, 1)");
        }
        if !(self.omega0 > 0.0) || !(self.upsilon0 > 0.0) {
            return bad("omega0 and upsilon0 must be positive");
        }
        if !(self.kappa >= 0.0) {
            return bad("kappa must be nonnegative");
        }
        if self.n_mcmc == 0 || self.n_burn >= self.n_mcmc {
            return bad("need n_mcmc > n_burn >= 0");
        }
        Ok(())
    }
}

/// `min(3, p)` for real inputs, plus `min(3, ceil(p_dummy / 2))` when
/// dummies are present.
pub fn default_max_active(p_real: usize, p_dummy: usize) -> usize {
    let a = p_real.min(3) + p_dummy.div_ceil(2).min(3);
    a.max(1)
}

/// Leaves roughly `max(20, 5%)` of the projections above the upper knot
/// bound; clamped to `[0.5, 1)`.
pub fn default_q(n: usize) -> f64 {
    if n == 0 {
        return 0.5;
    }
    let keep = 20usize.max(libm::ceil(n as f64 * 0.05) as usize);
    let q = (n as f64 - keep as f64) / n as f64;
    q.clamp(0.5, 1.0 - 1e-12)
}
