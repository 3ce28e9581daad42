//! Measurements shared by the integration tests and the acceptance report.
//! Each returns the raw statistic so callers pick the threshold.

use bppr_core::basis::eval_spline_basis;
use bppr_core::conjugate::{gibbs_beta, gibbs_sigma2, gram_cache};
use bppr_core::dataset::{prepare_dataset, Dataset, RawColumn, RawTable, Roles};
use bppr_core::hyper::Hyperparams;
use bppr_core::linalg::Matrix;
use bppr_core::model::ModelState;
use bppr_core::proposals::{adaptive_weights, sample_feature_set, sample_power_spherical, wallenius_log_pmf};
use bppr_core::sampler::{
    birth_log_alpha, change_log_alpha, death_log_alpha, propose_birth, propose_change, Sampler, SamplerState,
};
use bppr_core::testbed::{simulate, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Beta, ContinuousCDF, Discrete, InverseGamma, Poisson};

use super::{chi_square_pvalue, inverse, ks_distance, ks_pvalue};

/// 60 rows of three uniform inputs and a three-level categorical, with a
/// response that depends on all of them.
pub fn oracle_dataset(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 60;
    let levels = ["a", "b", "c"];
    let x: Vec<[f64; 3]> = (0..n).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
    let g: Vec<&str> = (0..n).map(|i| levels[i % 3]).collect();
    let y: Vec<f64> = x
        .iter()
        .zip(&g)
        .map(|(r, l)| (3.0 * r[0]).sin() + r[1] * r[2] + if *l == "b" { 0.5 } else { 0.0 } + 0.3 * (rng.random::<f64>() - 0.5))
        .collect();
    let col = |k: usize| x.iter().map(|r| r[k]).collect::<Vec<_>>();
    let table = RawTable::new(vec![
        RawColumn::numeric("x1", &col(0)),
        RawColumn::numeric("x2", &col(1)),
        RawColumn::numeric("x3", &col(2)),
        RawColumn::text("g", &g),
        RawColumn::numeric("y", &y),
    ]);
    prepare_dataset(&table, &Roles::new("y").with_categorical(&["g"])).unwrap()
}

/// A state with `m` ridges grown from random birth proposals and a random
/// shrinkage; `None` when a proposal happened to be degenerate.
pub fn random_state<R: Rng>(data: &Dataset, hyper: &Hyperparams, m: usize, rng: &mut R) -> Option<SamplerState> {
    let mut model = ModelState { components: Vec::new(), beta: vec![0.0], sigma2: 1.0, tau: 0.0 };
    for _ in 0..m {
        let w = adaptive_weights(&model.components, hyper, data.p());
        let prop = propose_birth(&model, data, hyper, &w, rng).ok()?;
        model.components.insert(prop.slot, prop.component);
    }
    model.beta = vec![0.0; model.n_coefficients()];
    model.tau = (rng.random::<f64>() * 6.0 - 3.0).exp();
    SamplerState::from_model(model, data).ok()
}

#[derive(Debug, Default)]
pub struct OracleReport {
    pub birth: (usize, f64),
    pub death: (usize, f64),
    pub change: (usize, f64),
}

/// Largest absolute gap between the sampler's log acceptance ratios and the
/// naive reimplementation, over `target` comparisons of each move type.
pub fn mh_oracle(target: usize, seed: u64) -> OracleReport {
    let data = oracle_dataset(seed);
    let hyper = Hyperparams::defaults_for(&data);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5);
    let mut report = OracleReport::default();
    let mut guard = 0;
    while (report.birth.0 < target || report.death.0 < target || report.change.0 < target) && guard < 100 * target {
        guard += 1;
        let m = rng.random_range(0..5);
        let Some(state) = random_state(&data, &hyper, m, &mut rng) else { continue };
        let model = state.model().clone();
        let tau = model.tau;

        if report.birth.0 < target {
            let w = adaptive_weights(&model.components, &hyper, data.p());
            if let Ok(prop) = propose_birth(&model, &data, &hyper, &w, &mut rng) {
                if let Ok((la, _)) = birth_log_alpha(&state, &data, &hyper, &w, &prop) {
                    let naive =
                        super::birth_log_alpha(&data.features, &data.y, &hyper, tau, &model.components, &prop.component, prop.slot);
                    report.birth.0 += 1;
                    report.birth.1 = report.birth.1.max((la - naive).abs());
                }
            }
        }
        if m > 0 && report.death.0 < target {
            let victim = rng.random_range(0..m);
            if let Ok((la, _)) = death_log_alpha(&state, &data, &hyper, victim) {
                let naive = super::death_log_alpha(&data.features, &data.y, &hyper, tau, &model.components, victim);
                report.death.0 += 1;
                report.death.1 = report.death.1.max((la - naive).abs());
            }
        }
        if m > 0 && report.change.0 < target {
            let index = rng.random_range(0..m);
            if let Ok(prop) = propose_change(&model, &data, &hyper, index, &mut rng) {
                if let Ok((la, _)) = change_log_alpha(&state, &data, &prop) {
                    let naive = super::change_log_alpha(&data.features, &data.y, tau, &model.components, index, &prop.component);
                    report.change.0 += 1;
                    report.change.1 = report.change.1.max((la - naive).abs());
                }
            }
        }
    }
    report
}

/// Largest `|log alpha_birth + log alpha_death|` over `target` matched
/// pairs: a birth from a random state and the death of the same ridge from
/// the grown state.
pub fn birth_death_reciprocity(target: usize, seed: u64) -> (usize, f64) {
    let data = oracle_dataset(seed);
    let hyper = Hyperparams::defaults_for(&data);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5A5A);
    let (mut count, mut worst) = (0, 0.0f64);
    let mut guard = 0;
    while count < target && guard < 100 * target {
        guard += 1;
        let m = rng.random_range(0..5);
        let Some(state) = random_state(&data, &hyper, m, &mut rng) else { continue };
        let model = state.model().clone();
        let w = adaptive_weights(&model.components, &hyper, data.p());
        let Ok(prop) = propose_birth(&model, &data, &hyper, &w, &mut rng) else { continue };
        let Ok((birth, _)) = birth_log_alpha(&state, &data, &hyper, &w, &prop) else { continue };
        let mut grown = model.clone();
        grown.components.insert(prop.slot, prop.component.clone());
        grown.beta = vec![0.0; grown.n_coefficients()];
        let Ok(grown) = SamplerState::from_model(grown, &data) else { continue };
        let Ok((death, _)) = death_log_alpha(&grown, &data, &hyper, prop.slot) else { continue };
        count += 1;
        worst = worst.max((birth + death).abs());
    }
    (count, worst)
}

/// Chi-square p-value of the ridge count under the unit likelihood against
/// Poisson(`lambda`), from `steps` iterations thinned every `thin`.
pub fn prior_recovery_pvalue(steps: usize, thin: usize, lambda: f64, seed: u64) -> f64 {
    let (data, _) = simulate(Scenario::Noise, 60, 3, 1.0, seed, 0).unwrap();
    let mut hyper = Hyperparams::defaults_for(&data);
    hyper.lambda = lambda;
    hyper.seed = seed;
    let mut sampler = Sampler::new(&data, &hyper).unwrap();
    sampler.use_unit_likelihood();
    let top = 6;
    let mut observed = vec![0.0; top + 1];
    for s in 0..steps {
        sampler.step();
        if s % thin == thin - 1 {
            observed[sampler.model().m().min(top)] += 1.0;
        }
    }
    let total: f64 = observed.iter().sum();
    let pois = Poisson::new(lambda).unwrap();
    let mut expected: Vec<f64> = (0..top).map(|k| total * pois.pmf(k as u64)).collect();
    expected.push(total - expected.iter().sum::<f64>());
    chi_square_pvalue(&observed, &expected)
}

/// Largest `|sum_J P(J) - 1|` over every weight vector drawn for
/// `p <= 6`, `2 <= a <= min(3, p)`.
pub fn wallenius_total_mass_error(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for p in 2..=6 {
        for a in 1..=3.min(p) {
            for _ in 0..5 {
                let w: Vec<f64> = (0..p).map(|_| 0.2 + 5.0 * rng.random::<f64>()).collect();
                let total: f64 = subsets(p, a).iter().map(|s| wallenius_log_pmf(s, &w).unwrap().exp()).sum();
                worst = worst.max((total - 1.0).abs());
            }
        }
    }
    worst
}

pub fn subsets(p: usize, a: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << p))
        .filter(|m| m.count_ones() as usize == a)
        .map(|m| (0..p).filter(|j| m & (1 << j) != 0).collect())
        .collect()
}

/// Largest z-score between empirical set frequencies from the sampler and
/// the exact pmf, over `vectors` seeded weight vectors with `draws` each.
pub fn wallenius_sampling_zmax(vectors: usize, draws: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for v in 0..vectors {
        let p = 5;
        let a = 2 + v % 2;
        let w: Vec<f64> = (0..p).map(|_| 0.5 + 4.0 * rng.random::<f64>()).collect();
        let sets = subsets(p, a);
        let mut counts = vec![0usize; sets.len()];
        for _ in 0..draws {
            let s = sample_feature_set(&w, a, &mut rng);
            counts[sets.iter().position(|t| *t == s).unwrap()] += 1;
        }
        for (set, &c) in sets.iter().zip(&counts) {
            let prob = super::wallenius_brute(set, &w);
            let se = (prob * (1.0 - prob) / draws as f64).sqrt();
            worst = worst.max((c as f64 / draws as f64 - prob).abs() / se);
        }
    }
    worst
}

#[derive(Debug)]
pub struct SplineReport {
    /// Largest `|b(u)|` left of and at `t0` (must be exactly 0).
    pub left_max: f64,
    /// Largest second difference right of the last knot, relative to the
    /// basis magnitude there.
    pub right_second_diff: f64,
    /// Largest gap between one-sided second derivatives at interior knots,
    /// divided by `h` times the third-derivative bound.
    pub knot_c2_ratio: f64,
    /// One-sided slopes of `b_1` at `t0`.
    pub t0_slopes: (f64, f64),
}

/// Probes the basis on several seeded knot layouts.
pub fn spline_contract(seed: u64) -> SplineReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SplineReport { left_max: 0.0, right_second_diff: 0.0, knot_c2_ratio: 0.0, t0_slopes: (0.0, 1.0) };
    for _ in 0..20 {
        let t0 = rng.random::<f64>() * 2.0 - 1.0;
        let k = rng.random_range(1..=6);
        let mut knots: Vec<f64> = (0..=k).map(|_| t0 + 0.05 + 3.0 * rng.random::<f64>()).collect();
        knots.sort_by(f64::total_cmp);
        let range = knots[k] - t0;
        let h = 1e-4 * range;
        for s in 0..200 {
            let u = t0 - 5.0 * range * s as f64 / 199.0;
            for v in eval_spline_basis(u, t0, &knots) {
                report.left_max = report.left_max.max(v.abs());
            }
        }
        for s in 1..10 {
            let u = knots[k] + s as f64 * h;
            let lo = eval_spline_basis(u - h, t0, &knots);
            let mid = eval_spline_basis(u, t0, &knots);
            let hi = eval_spline_basis(u + h, t0, &knots);
            for l in 0..k {
                let scale = mid[l].abs().max(1.0);
                report.right_second_diff = report.right_second_diff.max((hi[l] - 2.0 * mid[l] + lo[l]).abs() / scale);
            }
        }
        let min_gap = (0..k).map(|l| knots[k] - knots[l]).fold(f64::INFINITY, f64::min);
        let third_bound = 12.0 / min_gap;
        for &t in &knots[..k] {
            let b = |u: f64| eval_spline_basis(u, t0, &knots);
            let (l2, l1, c, r1, r2) = (b(t - 2.0 * h), b(t - h), b(t), b(t + h), b(t + 2.0 * h));
            for l in 0..k {
                let left = (l2[l] - 2.0 * l1[l] + c[l]) / (h * h);
                let right = (c[l] - 2.0 * r1[l] + r2[l]) / (h * h);
                report.knot_c2_ratio = report.knot_c2_ratio.max((left - right).abs() / (h * third_bound));
            }
        }
        let at = eval_spline_basis(t0, t0, &knots)[0];
        let left = (at - eval_spline_basis(t0 - h, t0, &knots)[0]) / h;
        let right = (eval_spline_basis(t0 + h, t0, &knots)[0] - at) / h;
        if (right - left - 1.0).abs() > (report.t0_slopes.1 - report.t0_slopes.0 - 1.0).abs() {
            report.t0_slopes = (left, right);
        }
    }
    report
}

#[derive(Debug)]
pub struct GibbsReport {
    pub mean_z: f64,
    pub cov_z: f64,
    pub sigma2_ks: f64,
}

/// Moments of coefficient draws against `Lambda B'y` and `sigma2 Lambda`
/// (explicit inverse), and the KS distance of noise-variance draws to the
/// inverse-gamma CDF.
pub fn gibbs_moments(draws: usize, seed: u64) -> GibbsReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 30;
    let cols: Vec<Vec<f64>> = vec![
        vec![1.0; n],
        (0..n).map(|_| rng.random::<f64>()).collect(),
        (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect(),
    ];
    let y: Vec<f64> = (0..n).map(|i| 1.0 + 2.0 * cols[1][i] - cols[2][i] + 0.5 * (rng.random::<f64>() - 0.5)).collect();
    let (sigma2, tau) = (0.7, 2.5);
    let design = Matrix::from_columns(n, &cols);
    let cache = gram_cache(&design, &y).unwrap();

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let btb: Vec<Vec<f64>> = cols.iter().map(|a| cols.iter().map(|b| dot(a, b)).collect()).collect();
    let shrink = tau / (1.0 + tau);
    let lambda: Vec<Vec<f64>> = inverse(&btb).into_iter().map(|r| r.into_iter().map(|v| shrink * v).collect()).collect();
    let bty: Vec<f64> = cols.iter().map(|c| dot(c, &y)).collect();
    let mean: Vec<f64> = lambda.iter().map(|r| dot(r, &bty)).collect();
    let cov: Vec<Vec<f64>> = lambda.iter().map(|r| r.iter().map(|v| sigma2 * v).collect()).collect();

    let w = cols.len();
    let mut sum = vec![0.0; w];
    let mut outer = vec![vec![0.0; w]; w];
    for _ in 0..draws {
        let b = gibbs_beta(&cache, sigma2, tau, &mut rng);
        for i in 0..w {
            sum[i] += b[i];
            for j in 0..w {
                outer[i][j] += (b[i] - mean[i]) * (b[j] - mean[j]);
            }
        }
    }
    let nd = draws as f64;
    let mut mean_z = 0.0f64;
    let mut cov_z = 0.0f64;
    for i in 0..w {
        mean_z = mean_z.max((sum[i] / nd - mean[i]).abs() / (cov[i][i] / nd).sqrt());
        for j in 0..w {
            let se = ((cov[i][i] * cov[j][j] + cov[i][j] * cov[i][j]) / nd).sqrt();
            cov_z = cov_z.max((outer[i][j] / nd - cov[i][j]).abs() / se);
        }
    }

    let residual = 37.5;
    let mut s2: Vec<f64> = (0..draws).map(|_| gibbs_sigma2(residual, n, &mut rng)).collect();
    let ig = InverseGamma::new(0.5 * n as f64, 0.5 * residual).unwrap();
    let sigma2_ks = ks_distance(&mut s2, |x| ig.cdf(x));
    GibbsReport { mean_z, cov_z, sigma2_ks }
}

/// KS p-value of `mu'theta` at `kappa = 0` against the uniform-sphere cosine
/// law in `a` dimensions.
pub fn power_spherical_uniform_pvalue(a: usize, draws: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu: Vec<f64> = {
        let v: Vec<f64> = (0..a).map(|_| rng.random::<f64>() - 0.5).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.into_iter().map(|x| x / norm).collect()
    };
    let mut t: Vec<f64> = (0..draws)
        .map(|_| {
            let th = sample_power_spherical(&mu, 0.0, &mut rng).unwrap();
            th.iter().zip(&mu).map(|(x, m)| x * m).sum()
        })
        .collect();
    let half = 0.5 * (a as f64 - 1.0);
    let law = Beta::new(half, half).unwrap();
    let d = ks_distance(&mut t, |x| law.cdf(((x + 1.0) / 2.0).clamp(0.0, 1.0)));
    ks_pvalue(d, draws)
}

/// Mean cosine `E[t]` under the density `(1+t)^(kappa+(a-3)/2) (1-t)^((a-3)/2)`
/// by composite Simpson quadrature in log space.
pub fn power_spherical_mean_cosine(a: usize, kappa: f64) -> f64 {
    let alpha = kappa + 0.5 * (a as f64 - 3.0);
    let beta = 0.5 * (a as f64 - 3.0);
    // s = (1+t)/2 = 1 - r^4 packs the grid near the mode and removes the
    // endpoint singularity when a = 2.
    let steps = 200_000;
    let log_f = |s: f64| alpha * (2.0 * s).ln() + beta * (2.0 * (1.0 - s)).ln();
    let mut num = 0.0;
    let mut den = 0.0;
    let mut values = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let r = i as f64 / steps as f64;
        let s = 1.0 - r.powi(4);
        let jac = 4.0 * r.powi(3);
        values.push((s, jac, if s > 0.0 && s < 1.0 { log_f(s) } else { f64::NEG_INFINITY }));
    }
    let top = values.iter().map(|v| v.2).fold(f64::NEG_INFINITY, f64::max);
    for (i, &(s, jac, lf)) in values.iter().enumerate() {
        let wgt = if i == 0 || i == steps { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let f = if lf.is_finite() { (lf - top).exp() * jac } else { 0.0 };
        num += wgt * f * (2.0 * s - 1.0);
        den += wgt * f;
    }
    num / den
}

/// z-score of the sampled mean cosine at `kappa` against quadrature.
pub fn power_spherical_concentrated_z(a: usize, kappa: f64, draws: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mu = vec![0.0; a];
    mu[a - 1] = 1.0;
    let t: Vec<f64> = (0..draws).map(|_| *sample_power_spherical(&mu, kappa, &mut rng).unwrap().last().unwrap()).collect();
    let m = t.iter().sum::<f64>() / draws as f64;
    let var = t.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (draws as f64 - 1.0);
    (m - power_spherical_mean_cosine(a, kappa)).abs() / (var / draws as f64).sqrt()
}
