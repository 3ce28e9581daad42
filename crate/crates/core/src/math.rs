//! Scalar helpers over `libm` plus the sample quantile used for knots.

pub use libm::{cos, exp, fabs as abs, log as ln, log1p, pow, sin, sqrt};

pub fn lgamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

/// Natural log of the binomial coefficient `n choose k`.
pub fn ln_choose(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    let mut acc = 0.0;
    for i in 0..k {
        acc += ln((n - i) as f64) - ln((i + 1) as f64);
    }
    acc
}

/// Quantile of already sorted data by linear interpolation between order
/// statistics at position `h = (n - 1) q + 1` (one-based).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = libm::floor(h) as usize;
    if lo >= n - 1 {
        return sorted[n - 1];
    }
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

pub fn sort_floats(v: &mut [f64]) {
    v.sort_unstable_by(|a, b| a.total_cmp(b));
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample variance with denominator `n - 1`.
pub fn variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() as f64 - 1.0)
}

/// Log of a sum of exponentials without overflow.
pub fn log_sum_exp(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + ln(v.iter().map(|x| exp(x - max)).sum::<f64>())
}
