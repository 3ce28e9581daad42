//! Bayesian projection pursuit regression.
//!
//! The response surface is modelled as an intercept plus a sum of ridge
//! functions, each a modified natural cubic spline of a one-dimensional
//! projection of the inputs. The number of ridges, their active feature
//! sets, directions and initial knots are explored with a reversible-jump
//! sampler; regression weights are integrated out under a Zellner–Siow
//! prior and redrawn by Gibbs steps.
//!
//! This crate is `no_std` (it needs `alloc`). File formats, threading and
//! the command-line front end live in the companion `bppr` crate.
//!
//! ```
//! use bppr_core::{testbed, Hyperparams, run_chain};
//!
//! let (train, _test) = testbed::simulate(testbed::Scenario::Friedman, 120, 6, 1.0, 7, 10).unwrap();
//! let mut hyper = Hyperparams::defaults_for(&train);
//! hyper.n_mcmc = 200;
//! hyper.n_burn = 150;
//! let chain = run_chain(&train, &hyper).unwrap();
//! assert_eq!(chain.states.len(), 50);
//! ```

#![no_std]
// `!(x > 0.0)` deliberately treats NaN as failing the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod basis;
pub mod chain;
pub mod conjugate;
pub mod dataset;
pub mod diagnostics;
mod error;
pub mod hyper;
pub mod linalg;
pub mod math;
pub mod model;
pub mod multivariate;
pub mod proposals;
pub mod sampler;
pub mod testbed;

pub use chain::{predict, PosteriorChain, Prediction, Traces};
pub use dataset::{prepare_dataset, Dataset, Features, RawColumn, RawTable, RawValues, Roles};
pub use error::{Error, Result};
pub use hyper::Hyperparams;
pub use linalg::Matrix;
pub use model::{ModelState, RidgeComponent, RidgeKind};
pub use sampler::run_chain;
