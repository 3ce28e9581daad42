//! Proposal distributions for ridge structure: adaptive complexity and
//! feature weights, weighted feature-set sampling (Wallenius), uniform
//! directions, and power spherical perturbations of a direction.

use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::hyper::Hyperparams;
use crate::linalg::{dot, norm_sq};
use crate::math;
use crate::model::RidgeComponent;

/// Unnormalized proposal weights for the active-feature count (`omega`,
/// indexed by `a - 1`) and for each feature (`upsilon`).
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveWeights {
    pub omega: Vec<f64>,
    pub upsilon: Vec<f64>,
}

impl AdaptiveWeights {
    /// `omega_a / sum(omega)`.
    pub fn omega_normalized(&self, a: usize) -> f64 {
        self.omega[a - 1] / self.omega.iter().sum::<f64>()
    }
}

/// Counts current usage: `omega_a = omega0 + #{m : a_m = a}` and
/// `upsilon_j = upsilon0 + #{m : j in J_m}`.
pub fn adaptive_weights(components: &[RidgeComponent], hyper: &Hyperparams, p: usize) -> AdaptiveWeights {
    let mut omega = vec![hyper.omega0; hyper.max_active];
    let mut upsilon = vec![hyper.upsilon0; p];
    for c in components {
        omega[c.active() - 1] += 1.0;
        for &j in &c.features {
            upsilon[j] += 1.0;
        }
    }
    AdaptiveWeights { omega, upsilon }
}

/// Index drawn with probability proportional to `weights`.
pub fn sample_categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

/// Draws `a` distinct features. A single feature is drawn uniformly; larger
/// sets are drawn one at a time without replacement with probability
/// proportional to `upsilon`. Returns the sorted set.
pub fn sample_feature_set<R: Rng + ?Sized>(upsilon: &[f64], a: usize, rng: &mut R) -> Vec<usize> {
    let p = upsilon.len();
    assert!(a >= 1 && a <= p);
    if a == 1 {
        return vec![rng.random_range(0..p)];
    }
    let mut remaining = upsilon.to_vec();
    let mut chosen = Vec::with_capacity(a);
    for _ in 0..a {
        let j = sample_categorical(&remaining, rng);
        chosen.push(j);
        remaining[j] = 0.0;
    }
    chosen.sort_unstable();
    chosen
}

/// Log probability that sequential weighted sampling without replacement
/// yields the unordered set `set`: the sum over draw orders of
/// `prod_k w_(k) / (W - sum_{i<k} w_(i))`. Orders sharing a drawn prefix
/// share a factor, so the sum is accumulated over subsets of `set`.
pub fn wallenius_log_pmf(set: &[usize], upsilon: &[f64]) -> Result<f64> {
    let a = set.len();
    if a > 8 {
        return Err(Error::Unsupported("Wallenius probability for more than 8 features"));
    }
    let total: f64 = upsilon.iter().sum();
    let w: Vec<f64> = set.iter().map(|&j| upsilon[j]).collect();
    let full = (1usize << a) - 1;
    let mut prob = vec![0.0; 1 << a];
    let mut used = vec![0.0; 1 << a];
    prob[0] = 1.0;
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        used[mask] = used[mask & (mask - 1)] + w[low];
        let mut acc = 0.0;
        for (k, wk) in w.iter().enumerate() {
            if mask & (1 << k) != 0 {
                let prev = mask & !(1 << k);
                acc += prob[prev] * wk / (total - used[prev]);
            }
        }
        prob[mask] = acc;
    }
    Ok(math::ln(prob[full]))
}

/// Log proposal probability of a feature set: uniform for one feature,
/// Wallenius otherwise.
pub fn feature_set_log_prob(set: &[usize], upsilon: &[f64]) -> Result<f64> {
    if set.len() == 1 {
        Ok(-math::ln(upsilon.len() as f64))
    } else {
        wallenius_log_pmf(set, upsilon)
    }
}

/// Isotropic unit vector in `a` dimensions.
pub fn sample_uniform_subsphere<R: Rng + ?Sized>(a: usize, rng: &mut R) -> Vec<f64> {
    assert!(a >= 1);
    loop {
        let v: Vec<f64> = (0..a).map(|_| StandardNormal.sample(rng)).collect();
        let norm = math::sqrt(norm_sq(&v));
        if norm > 1e-300 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Exact draw from the power spherical density `∝ (1 + mu'theta)^kappa`.
///
/// The cosine `t = mu'theta` has density `∝ (1+t)^(kappa+(a-3)/2) (1-t)^((a-3)/2)`,
/// i.e. `(t+1)/2 ~ Beta(kappa + (a-1)/2, (a-1)/2)`. The tangential part is
/// uniform on the orthogonal sphere, and a Householder reflection carries
/// the first axis onto `mu`. On the 0-sphere (`a = 1`) the two points carry
/// weights `2^kappa` and `0^kappa`.
pub fn sample_power_spherical<R: Rng + ?Sized>(mu: &[f64], kappa: f64, rng: &mut R) -> Result<Vec<f64>> {
    let a = mu.len();
    let norm = math::sqrt(norm_sq(mu));
    if a == 0 || !(norm > 0.0) {
        return Err(Error::InvalidArgument("power spherical mode must be a nonzero vector".into()));
    }
    let mu: Vec<f64> = mu.iter().map(|m| m / norm).collect();
    if a == 1 {
        let flip = kappa == 0.0 && rng.random::<bool>();
        return Ok(vec![if flip { -mu[0] } else { mu[0] }]);
    }
    let half = 0.5 * (a as f64 - 1.0);
    let z = Beta::new(kappa + half, half).expect("valid beta parameters").sample(rng);
    let t = (2.0 * z - 1.0).clamp(-1.0, 1.0);
    let tangent = sample_uniform_subsphere(a - 1, rng);
    let s = math::sqrt((1.0 - t * t).max(0.0));
    let mut y = Vec::with_capacity(a);
    y.push(t);
    y.extend(tangent.iter().map(|v| s * v));
    Ok(reflect_first_axis_to(&mu, y))
}

/// Applies the Householder reflection that maps `e_1` onto `mu`.
fn reflect_first_axis_to(mu: &[f64], mut y: Vec<f64>) -> Vec<f64> {
    let mut u: Vec<f64> = mu.iter().map(|m| -m).collect();
    u[0] += 1.0;
    let uu = norm_sq(&u);
    if uu < 1e-30 {
        return y;
    }
    let c = 2.0 * dot(&u, &y) / uu;
    for (yi, ui) in y.iter_mut().zip(&u) {
        *yi -= c * ui;
    }
    y
}
