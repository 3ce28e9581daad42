use bppr_core::dataset::Features;
use bppr_core::multivariate::{fit_component, fit_response_basis, MultivariateFit, Truncation};
use bppr_core::{Hyperparams, Matrix};
use rayon::prelude::*;

use crate::error::{CliError, Result};

/// Fits every principal-component chain on a worker pool of `threads`
/// threads (`None` = one per logical core). Component seeds are derived
/// from the master seed, so the result does not depend on the pool size.
pub fn fit_multivariate_parallel(
    features: &Features,
    y: &Matrix,
    hyper: &Hyperparams,
    truncation: Truncation,
    threads: Option<usize>,
) -> Result<MultivariateFit> {
    if y.rows() != features.n() {
        return Err(CliError::schema("response rows differ from feature rows"));
    }
    let basis = fit_response_basis(y, truncation)?;
    let scores = basis.transform(y)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::input(format!("cannot start worker pool: {e}")))?;
    let chains = pool.install(|| {
        (0..basis.d_minus())
            .into_par_iter()
            .map(|d| fit_component(features, &scores, hyper, d))
            .collect::<bppr_core::Result<Vec<_>>>()
    })?;
    Ok(MultivariateFit { basis, chains })
}
