//! Benchmark data: the Friedman function, a pure-noise scenario, and a
//! functional-output variant of Friedman for multivariate fits.

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::{prepare_dataset, Dataset, RawTable, Roles};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

/// `10 sin(pi x1 x2) + 20 (x3 - 0.5)^2 + 10 x4 + 5 x5`; further inputs are inert.
pub fn friedman(x: &[f64]) -> Result<f64> {
    if x.len() < 5 {
        return Err(Error::InvalidArgument("the Friedman function needs at least 5 inputs".into()));
    }
    Ok(friedman_unchecked(x))
}

fn friedman_unchecked(x: &[f64]) -> f64 {
    10.0 * math::sin(core::f64::consts::PI * x[0] * x[1])
        + 20.0 * (x[2] - 0.5) * (x[2] - 0.5)
        + 10.0 * x[3]
        + 5.0 * x[4]
}

/// A regression function over inputs drawn uniformly from the unit cube.
///
/// Only the scenarios with fully specified generators ship here; other
/// benchmark surfaces can be plugged into [`simulate_with`] by implementing
/// this trait.
pub trait TestFunction {
    fn min_inputs(&self) -> usize;
    fn eval(&self, x: &[f64]) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Friedman,
    /// Inert features and a standard normal response.
    Noise,
}

impl TestFunction for Scenario {
    fn min_inputs(&self) -> usize {
        match self {
            Scenario::Friedman => 5,
            Scenario::Noise => 1,
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Scenario::Friedman => friedman_unchecked(x),
            Scenario::Noise => 0.0,
        }
    }
}

/// Simulated raw inputs, noisy responses and noiseless truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub p: usize,
    /// Row-major inputs.
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub truth: Vec<f64>,
}

impl Sample {
    pub fn table(&self) -> RawTable {
        RawTable::from_rows(self.p, &self.x, Some(&self.y))
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// Draws `n` rows: `x ~ Unif([0,1]^p)`, `y = f(x) + sigma * N(0, 1)`.
pub fn sample_rows<F: TestFunction + ?Sized, R: Rng + ?Sized>(f: &F, n: usize, p: usize, sigma: f64, rng: &mut R) -> Sample {
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut truth = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..p).map(|_| rng.random::<f64>()).collect();
        let fx = f.eval(&row);
        let z: f64 = StandardNormal.sample(rng);
        x.push(row);
        truth.push(fx);
        y.push(fx + sigma * z);
    }
    Sample { p, x, y, truth }
}

/// Seeded train/test samples for any test function.
pub fn simulate_with<F: TestFunction + ?Sized>(
    f: &F,
    n: usize,
    p: usize,
    sigma: f64,
    seed: u64,
    n_test: usize,
) -> Result<(Sample, Sample)> {
    if p < f.min_inputs() {
        return Err(Error::InvalidArgument("too few inputs for this scenario".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let train = sample_rows(f, n, p, sigma, &mut rng);
    let test = sample_rows(f, n_test, p, sigma, &mut rng);
    Ok((train, test))
}

pub fn simulate_samples(scenario: Scenario, n: usize, p: usize, sigma: f64, seed: u64, n_test: usize) -> Result<(Sample, Sample)> {
    simulate_with(&scenario, n, p, sigma, seed, n_test)
}

/// Prepared train/test datasets; the test set reuses the training
/// standardization.
pub fn simulate(scenario: Scenario, n: usize, p: usize, sigma: f64, seed: u64, n_test: usize) -> Result<(Dataset, Dataset)> {
    let (train, test) = simulate_samples(scenario, n, p, sigma, seed, n_test)?;
    let train_ds = prepare_dataset(&train.table(), &Roles::new("y"))?;
    let features = train_ds.features.standardization.apply(&test.table())?;
    Ok((train_ds, Dataset { features, y: test.y }))
}

/// Friedman with its first input treated as a functional coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSample {
    /// Row-major scalar inputs: Friedman's `x2..x5` followed by inert columns.
    pub x: Vec<Vec<f64>>,
    /// `n x D` noisy outputs.
    pub y: Matrix,
    /// `n x D` noiseless outputs.
    pub truth: Matrix,
}

/// Evaluates Friedman on a grid of `d` equally spaced points in `[0, 1]`
/// for its first input, with the other four inputs plus `n_inert` inert
/// inputs drawn uniformly per row.
pub fn functional_friedman<R: Rng + ?Sized>(n: usize, n_inert: usize, d: usize, sigma: f64, rng: &mut R) -> FunctionalSample {
    let grid: Vec<f64> = (0..d).map(|k| if d == 1 { 0.5 } else { k as f64 / (d - 1) as f64 }).collect();
    let p = 4 + n_inert;
    let mut x = Vec::with_capacity(n);
    let mut y = Matrix::zeros(n, d);
    let mut truth = Matrix::zeros(n, d);
    for i in 0..n {
        let row: Vec<f64> = (0..p).map(|_| rng.random::<f64>()).collect();
        for (k, &t) in grid.iter().enumerate() {
            let f = friedman_unchecked(&[t, row[0], row[1], row[2], row[3]]);
            let z: f64 = StandardNormal.sample(rng);
            truth[(i, k)] = f;
            y[(i, k)] = f + sigma * z;
        }
        x.push(row);
    }
    FunctionalSample { x, y, truth }
}
