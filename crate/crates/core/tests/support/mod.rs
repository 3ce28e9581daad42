//! Slow, independent reference implementations used as test oracles.
#![allow(dead_code)]

use bppr_core::dataset::Features;
use bppr_core::hyper::Hyperparams;
use bppr_core::model::{RidgeComponent, RidgeKind};
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub mod checks;

/// Inverse by Gauss–Jordan elimination with partial pivoting.
pub fn inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, piv);
        let d = m[c][c];
        for v in m[c].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                if f != 0.0 {
                    for k in 0..2 * n {
                        m[r][k] -= f * m[c][k];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

fn pos(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// Ridge basis functions written straight from their definition.
pub fn spline_values(u: f64, t0: f64, knots: &[f64]) -> Vec<f64> {
    let k = knots.len() - 1;
    let last = knots[k];
    let d = |l: usize| (pos(u - knots[l - 1]).powi(3) - pos(u - last).powi(3)) / (last - knots[l - 1]);
    let mut out = vec![pos(u - t0)];
    for l in 2..=k {
        out.push(d(l - 1) - d(k));
    }
    out
}

/// Columns of one ridge's basis block.
pub fn ridge_columns(features: &Features, c: &RidgeComponent) -> Vec<Vec<f64>> {
    let n = features.n();
    match &c.kind {
        RidgeKind::Spline { t0, knots } => {
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    let u: f64 = c.features.iter().map(|&j| features.x_std[(i, j)] * c.direction[j]).sum();
                    spline_values(u, *t0, knots)
                })
                .collect();
            (0..knots.len() - 1).map(|l| rows.iter().map(|r| r[l]).collect()).collect()
        }
        RidgeKind::Indicator => {
            let col = (0..n)
                .map(|i| {
                    let any = c.features.iter().any(|&j| features.dummies_raw[(i, features.dummy_slot[j].unwrap())] == 1.0);
                    if any {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            vec![col]
        }
    }
}

pub fn design_columns(features: &Features, components: &[RidgeComponent]) -> Vec<Vec<f64>> {
    let mut cols = vec![vec![1.0; features.n()]];
    for c in components {
        cols.extend(ridge_columns(features, c));
    }
    cols
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Least-squares coefficients `(B'B)^-1 B'y` with an explicit inverse.
pub fn least_squares(cols: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let btb: Vec<Vec<f64>> = cols.iter().map(|a| cols.iter().map(|b| dot(a, b)).collect()).collect();
    let inv = inverse(&btb);
    let bty: Vec<f64> = cols.iter().map(|c| dot(c, y)).collect();
    inv.iter().map(|row| dot(row, &bty)).collect()
}

/// Residual sum of squares of the least-squares fit, computed from the
/// explicit residual vector (first-order insensitive to coefficient error).
pub fn residual_ssq(cols: &[Vec<f64>], y: &[f64]) -> f64 {
    let beta = least_squares(cols, y);
    (0..y.len())
        .map(|i| {
            let fit: f64 = cols.iter().zip(&beta).map(|(c, b)| c[i] * b).sum();
            (y[i] - fit) * (y[i] - fit)
        })
        .sum()
}

/// Full log marginal likelihood of a design:
/// `(1+tau)^(-w/2) (y'y - tau/(1+tau) y'B(B'B)^-1 B'y)^(-n/2)`, using
/// `y'B(B'B)^-1 B'y = y'y - rss`.
pub fn log_marginal(cols: &[Vec<f64>], y: &[f64], tau: f64) -> f64 {
    let n = y.len() as f64;
    let w = cols.len() as f64;
    let yty = dot(y, y);
    let rss = residual_ssq(cols, y);
    -0.5 * w * (1.0 + tau).ln() - 0.5 * n * (yty / (1.0 + tau) + tau / (1.0 + tau) * rss).ln()
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

/// Probability that weighted sampling without replacement draws exactly
/// `set`, summed over every draw order.
pub fn wallenius_brute(set: &[usize], weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    permutations(set)
        .iter()
        .map(|order| {
            let mut used = 0.0;
            let mut prob = 1.0;
            for &j in order {
                prob *= weights[j] / (total - used);
                used += weights[j];
            }
            prob
        })
        .sum()
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    let mut v = 1.0f64;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v.ln()
}

/// Usage counts plus pseudo-counts, recounted from scratch.
pub fn counts(components: &[RidgeComponent], hyper: &Hyperparams, p: usize) -> (Vec<f64>, Vec<f64>) {
    let omega: Vec<f64> = (1..=hyper.max_active)
        .map(|a| hyper.omega0 + components.iter().filter(|c| c.features.len() == a).count() as f64)
        .collect();
    let upsilon: Vec<f64> =
        (0..p).map(|j| hyper.upsilon0 + components.iter().filter(|c| c.features.contains(&j)).count() as f64).collect();
    (omega, upsilon)
}

/// Prior mass of the new ridge's structure divided by its proposal mass,
/// times the Poisson ratio for going from `m` to `m + 1` ridges; proposal
/// weights come from `others`.
pub fn structure_ratio(new: &RidgeComponent, others: &[RidgeComponent], hyper: &Hyperparams, p: usize) -> f64 {
    let (omega, upsilon) = counts(others, hyper, p);
    let a = new.features.len();
    let m_star = (others.len() + 1) as f64;
    let prior = hyper.lambda / m_star * (1.0 / hyper.max_active as f64) * (-ln_binomial(p, a)).exp();
    let pick_a = omega[a - 1] / omega.iter().sum::<f64>();
    let pick_set = if a == 1 { 1.0 / p as f64 } else { wallenius_brute(&new.features, &upsilon) };
    prior / (pick_a * pick_set)
}

/// Birth of `new` at `slot` given the current `components`.
pub fn birth_log_alpha(
    features: &Features,
    y: &[f64],
    hyper: &Hyperparams,
    tau: f64,
    components: &[RidgeComponent],
    new: &RidgeComponent,
    slot: usize,
) -> f64 {
    let mut grown = components.to_vec();
    grown.insert(slot, new.clone());
    log_marginal(&design_columns(features, &grown), y, tau) - log_marginal(&design_columns(features, components), y, tau)
        + structure_ratio(new, components, hyper, features.p()).ln()
}

pub fn death_log_alpha(
    features: &Features,
    y: &[f64],
    hyper: &Hyperparams,
    tau: f64,
    components: &[RidgeComponent],
    victim: usize,
) -> f64 {
    let mut reduced = components.to_vec();
    let gone = reduced.remove(victim);
    log_marginal(&design_columns(features, &reduced), y, tau) - log_marginal(&design_columns(features, components), y, tau)
        - structure_ratio(&gone, &reduced, hyper, features.p()).ln()
}

pub fn change_log_alpha(
    features: &Features,
    y: &[f64],
    tau: f64,
    components: &[RidgeComponent],
    index: usize,
    new: &RidgeComponent,
) -> f64 {
    let mut changed = components.to_vec();
    changed[index] = new.clone();
    log_marginal(&design_columns(features, &changed), y, tau) - log_marginal(&design_columns(features, components), y, tau)
}

/// One-sample Kolmogorov–Smirnov distance.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic Kolmogorov p-value of a KS distance at sample size `n`.
pub fn ks_pvalue(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let sign = if k as i64 % 2 == 1 { 1.0 } else { -1.0 };
        p += sign * 2.0 * (-2.0 * k * k * lambda * lambda).exp();
    }
    p.clamp(0.0, 1.0)
}

/// Pearson chi-square p-value of observed counts against expected counts.
pub fn chi_square_pvalue(observed: &[f64], expected: &[f64]) -> f64 {
    let stat: f64 = observed.iter().zip(expected).map(|(o, e)| (o - e) * (o - e) / e).sum();
    let df = (observed.len() - 1) as f64;
    1.0 - ChiSquared::new(df).unwrap().cdf(stat)
}
