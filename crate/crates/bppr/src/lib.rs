//! File formats, parallel multivariate fitting and the command-line front
//! end for [`bppr_core`].

pub mod commands;
pub mod csvio;
pub mod error;
pub mod modelfile;
pub mod parallel;

pub use error::{CliError, ErrorKind, Result};
pub use modelfile::Model;
pub use parallel::fit_multivariate_parallel;
