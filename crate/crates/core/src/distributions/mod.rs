//! Parameterized distributions that evaluate log densities and draw samples.
//!
//! These are the building blocks of the mixture model: every conditional the
//! Gibbs sampler uses is one of these objects, so the consistency checker can
//! evaluate it at arbitrary points.

mod dirichlet;
mod gamma;
mod gaussian;
mod inverse_gamma;
mod moments;
mod multinomial;

pub use dirichlet::Dirichlet;
pub use gamma::{gamma_variate, ln_gamma_variate};
pub use gaussian::{gaussian_ln_pdf, Gaussian};
pub use inverse_gamma::InverseGamma;
pub use moments::{check_standard_suite, moment_check, standard_suite, CoordinateMoments, ExactMoments, MomentCheck, MomentReport, MomentSource, Z_LIMIT};
pub use multinomial::Multinomial;

use crate::error::Result;
use crate::rng::RngStream;

/// Simplex tolerance used when validating probability vectors passed in by callers.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Common surface of the distribution objects.
pub trait Distribution {
    type Value;

    /// Log density (or mass) of `value`, summed over all of its elements.
    fn total_log_p(&self, value: &Self::Value) -> Result<f64>;

    fn sample(&self, rng: &mut RngStream) -> Self::Value;
}
