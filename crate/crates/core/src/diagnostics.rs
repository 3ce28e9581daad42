//! Convergence diagnostics, interval coverage and one-way accumulated local
//! effects.

use alloc::vec;
use alloc::vec::Vec;

use crate::chain::{evaluate, PosteriorChain};
use crate::dataset::Features;
use crate::error::{Error, Result};
use crate::math;

/// Effective sample size with Geyer's initial positive sequence: lag
/// autocorrelations are summed in adjacent pairs until the first pair with
/// a nonpositive sum. Capped at the trace length.
pub fn effective_sample_size(trace: &[f64]) -> Result<f64> {
    let n = trace.len();
    if n < 10 {
        return Err(Error::TooFewRows { needed: 10, got: n });
    }
    let mean = math::mean(trace);
    let centered: Vec<f64> = trace.iter().map(|x| x - mean).collect();
    let autocov = |lag: usize| -> f64 {
        centered[..n - lag].iter().zip(&centered[lag..]).map(|(a, b)| a * b).sum::<f64>() / n as f64
    };
    let gamma0 = autocov(0);
    if !(gamma0 > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let mut sum_pairs = 0.0;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = (autocov(lag) + autocov(lag + 1)) / gamma0;
        if pair <= 0.0 {
            break;
        }
        sum_pairs += pair;
        lag += 2;
    }
    // tau = 1 + 2 sum_{t>=1} rho_t = 2 sum_pairs - 1 (the first pair holds rho_0 = 1).
    let tau = (2.0 * sum_pairs - 1.0).max(1.0);
    Ok(n as f64 / tau)
}

/// Split R-hat: the trace is cut into `n_splits` contiguous sub-chains of
/// equal length (remainder dropped) and compared through the between- and
/// within-chain variances.
pub fn split_rhat(trace: &[f64], n_splits: usize) -> Result<f64> {
    if n_splits < 2 {
        return Err(Error::InvalidArgument("split R-hat needs at least 2 sub-chains".into()));
    }
    if trace.len() < 10 * n_splits {
        return Err(Error::TooFewRows { needed: 10 * n_splits, got: trace.len() });
    }
    let len = trace.len() / n_splits;
    let chains: Vec<&[f64]> = (0..n_splits).map(|k| &trace[k * len..(k + 1) * len]).collect();
    let means: Vec<f64> = chains.iter().map(|c| math::mean(c)).collect();
    let w = chains.iter().map(|c| math::variance(c)).sum::<f64>() / n_splits as f64;
    if !(w > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let b = len as f64 * math::variance(&means);
    let nf = len as f64;
    Ok(math::sqrt(((nf - 1.0) / nf * w + b / nf) / w))
}

/// Fraction of `truth` values inside `[lower, upper]`.
pub fn coverage(lower: &[f64], upper: &[f64], truth: &[f64]) -> f64 {
    let n = truth.len();
    let inside = lower.iter().zip(upper).zip(truth).filter(|((l, u), t)| *l <= *t && *t <= *u).count();
    inside as f64 / n as f64
}

/// Root mean squared difference.
pub fn rmse(prediction: &[f64], truth: &[f64]) -> f64 {
    let ss: f64 = prediction.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    math::sqrt(ss / truth.len() as f64)
}

/// One-way accumulated local effects of a feature over the posterior.
#[derive(Debug, Clone, PartialEq)]
pub struct AleCurve {
    pub feature: usize,
    /// Bin edges on the raw feature scale.
    pub edges: Vec<f64>,
    pub centers: Vec<f64>,
    /// Rows falling in each bin.
    pub counts: Vec<usize>,
    /// `draws[s][k]`: centered effect of draw `s` at bin center `k`.
    pub draws: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// ALE curve of real feature `j` with bins at empirical quantiles of its
/// raw values. Per draw, local differences `f(x_j = upper edge) - f(x_j =
/// lower edge)` are averaged over the rows in each bin and accumulated; the
/// value at a bin center is the average of the accumulated effect at its two
/// edges, centered so the count-weighted mean over bins is zero. The band
/// is the equal-tailed `level` interval across draws.
pub fn ale_one_way(chain: &PosteriorChain, features: &Features, j: usize, n_bins: usize, level: f64) -> Result<AleCurve> {
    if j >= features.p() {
        return Err(Error::InvalidArgument("feature index out of range".into()));
    }
    if features.is_dummy(j) {
        return Err(Error::InvalidArgument("ALE is only defined for real-valued features".into()));
    }
    if n_bins < 2 {
        return Err(Error::InvalidArgument("ALE needs at least 2 bins".into()));
    }
    if chain.states.is_empty() {
        return Err(Error::InvalidArgument("chain has no retained states".into()));
    }
    let column = &features.standardization.features[j];
    let (mu, sd) = (column.mean, column.sd);
    let raw: Vec<f64> = features.x_std.col(j).iter().map(|z| z * sd + mu).collect();
    let mut sorted = raw.clone();
    math::sort_floats(&mut sorted);
    let mut distinct = sorted.clone();
    distinct.dedup();
    if distinct.len() < n_bins {
        return Err(Error::TooFewDistinct { feature: j, bins: n_bins });
    }
    let mut edges: Vec<f64> = (0..=n_bins).map(|k| math::quantile_sorted(&sorted, k as f64 / n_bins as f64)).collect();
    edges.dedup();
    let bins = edges.len() - 1;

    let n = raw.len();
    let bin_of: Vec<usize> = raw.iter().map(|&x| edges[1..].partition_point(|&e| e < x).min(bins - 1)).collect();
    let mut counts = vec![0usize; bins];
    for &b in &bin_of {
        counts[b] += 1;
    }

    let mut at_lower = features.clone();
    let mut at_upper = features.clone();
    for i in 0..n {
        at_lower.x_std[(i, j)] = (edges[bin_of[i]] - mu) / sd;
        at_upper.x_std[(i, j)] = (edges[bin_of[i] + 1] - mu) / sd;
    }

    let total = n as f64;
    let mut draws = Vec::with_capacity(chain.states.len());
    for state in &chain.states {
        let lo = evaluate(state, &at_lower)?;
        let hi = evaluate(state, &at_upper)?;
        let mut effect = vec![0.0; bins];
        for i in 0..n {
            effect[bin_of[i]] += hi[i] - lo[i];
        }
        let mut acc = 0.0;
        let mut prev_edge = 0.0;
        let mut values = Vec::with_capacity(bins);
        for (e, &c) in effect.iter().zip(&counts) {
            if c > 0 {
                acc += e / c as f64;
            }
            values.push(0.5 * (prev_edge + acc));
            prev_edge = acc;
        }
        let center = values.iter().zip(&counts).map(|(v, &c)| v * c as f64).sum::<f64>() / total;
        values.iter_mut().for_each(|v| *v -= center);
        draws.push(values);
    }

    let s = draws.len() as f64;
    let mut mean = vec![0.0; bins];
    for d in &draws {
        for (m, v) in mean.iter_mut().zip(d) {
            *m += v / s;
        }
    }
    let lo_q = 0.5 * (1.0 - level);
    let mut lower = Vec::with_capacity(bins);
    let mut upper = Vec::with_capacity(bins);
    let mut col = Vec::with_capacity(draws.len());
    for k in 0..bins {
        col.clear();
        col.extend(draws.iter().map(|d| d[k]));
        math::sort_floats(&mut col);
        lower.push(math::quantile_sorted(&col, lo_q));
        upper.push(math::quantile_sorted(&col, 1.0 - lo_q));
    }
    let centers = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    Ok(AleCurve { feature: j, edges, centers, counts, draws, mean, lower, upper })
}
