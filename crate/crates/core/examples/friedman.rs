//! Fits the Friedman benchmark and prints fit quality.
//!
//! `cargo run --release -p bppr-core --example friedman -- [seed]`

use bppr_core::diagnostics::{coverage, effective_sample_size, rmse, split_rhat};
use bppr_core::testbed::{simulate_samples, Scenario};
use bppr_core::{predict, prepare_dataset, run_chain, Hyperparams, Roles};

fn main() {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let (train, test) = simulate_samples(Scenario::Friedman, 300, 6, 1.0, seed, 2000).unwrap();
    let data = prepare_dataset(&train.table(), &Roles::new("y")).unwrap();
    let mut hyper = Hyperparams::defaults_for(&data);
    hyper.n_mcmc = 20_000;
    hyper.n_burn = 18_000;
    hyper.seed = seed;
    let start = std::time::Instant::now();
    let chain = run_chain(&data, &hyper).unwrap();
    let elapsed = start.elapsed().as_secs_f64();

    let pred = predict(&chain, &test.table()).unwrap();
    let mean = pred.mean();
    let (lo, hi) = pred.predictive(0.95, seed);
    let sigma = chain.retained_sigma();
    let mut sorted = sigma.clone();
    sorted.sort_by(f64::total_cmp);
    let m: Vec<usize> = chain.states.iter().map(|s| s.m()).collect();
    let mut hist = [0usize; 16];
    for &k in &m {
        hist[k.min(15)] += 1;
    }
    let x6 = chain.states.iter().flat_map(|s| &s.components).filter(|c| c.features.contains(&5)).count() as f64
        / chain.states.iter().map(|s| s.m()).sum::<usize>().max(1) as f64;
    println!("seconds={elapsed:.1}");
    println!("sigma_mean={:.4}", sigma.iter().sum::<f64>() / sigma.len() as f64);
    println!("sigma_ci=({:.4},{:.4})", sorted[50], sorted[1949]);
    println!("rmse_f={:.4}", rmse(&mean, &test.truth));
    println!("coverage={:.4}", coverage(&lo, &hi, &test.y));
    println!("ess={:.1}", effective_sample_size(&sigma).unwrap());
    println!("rhat={:.4}", split_rhat(&sigma, 5).unwrap());
    println!("m_hist={hist:?}");
    println!("x6_share={x6:.4}");
    println!("moves={:?}", chain.traces.moves);
}
