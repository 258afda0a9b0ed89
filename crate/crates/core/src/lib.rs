//! Testing tools for MCMC samplers, built around a reference Gibbs sampler for
//! an isotropic Bayesian mixture of Gaussians.
//!
//! * [`distributions`]: log densities and samplers (Gaussian, Dirichlet,
//!   Multinomial, Inverse-Gamma) plus empirical moment checks.
//! * [`model`]: the mixture model, its conditionals, forward sampling and the
//!   Gibbs sweep.
//! * [`consistency`]: exact conditional-versus-joint log-ratio checks, one per
//!   parameter block.
//! * [`geweke`]: forward-versus-successive-conditional comparison with P-P
//!   points, KS distances and verdicts.
//! * [`mutants`]: a registry of faulty model variants and the kill matrix.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory; the
//! `mcmc-check` binary wraps the suites for batch use.

pub mod cli;
pub mod consistency;
pub mod distributions;
pub mod error;
pub mod geweke;
pub mod io;
pub mod matrix;
pub mod model;
pub mod mutants;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use model::{Block, Dataset, MixtureModel, Model, ModelSpec, State, Statistic};
pub use rng::RngStream;
