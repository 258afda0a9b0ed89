//! The isotropic mixture-of-Gaussians model and the generic model surface the
//! test harnesses consume.
//!
//! ```text
//! π            ~ Dirichlet(α, ..., α)
//! σ²_μ         ~ InverseGamma(a_μ, b_μ)
//! σ²_n         ~ InverseGamma(a_n, b_n)
//! z_i | π      ~ Multinomial(π)
//! μ_kj | σ²_μ  ~ Normal(0, σ²_μ)
//! x_ij | ...   ~ Normal(μ_{z_i j}, σ²_n)
//! ```

mod mixture;
mod stats;

use std::fmt;
use std::str::FromStr;

pub use mixture::{cluster_counts, joint_terms, log_evidence, residual_sum_sq, JointTerms, MixtureModel};
pub use stats::{entropy, Statistic};

use crate::distributions::{Dirichlet, Gaussian, InverseGamma, Multinomial};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::RngStream;

/// Hyperparameters of the mixture model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    /// Symmetric Dirichlet concentration on the mixture weights.
    pub alpha: f64,
    /// Number of components.
    pub k: usize,
    pub sigma_sq_mu_prior: InverseGamma,
    pub sigma_sq_n_prior: InverseGamma,
}

impl ModelSpec {
    pub fn new(
        alpha: f64,
        k: usize,
        sigma_sq_mu_prior: InverseGamma,
        sigma_sq_n_prior: InverseGamma,
    ) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Parameter(format!("alpha must be positive, got {alpha}")));
        }
        if k == 0 {
            return Err(Error::Parameter("K must be at least 1".into()));
        }
        Ok(Self {
            alpha,
            k,
            sigma_sq_mu_prior,
            sigma_sq_n_prior,
        })
    }
}

impl ModelSpec {
    /// The default spec with a nearly flat IG(0.1, 0.1) prior on σ²_n.
    ///
    /// Under this prior the noise variance reverts to the prior so slowly
    /// that a small multiplicative bias in its conditional (mutant M1)
    /// compounds from step to step in the Geweke chain and σ²_n diverges.
    pub fn diffuse_noise() -> Self {
        Self {
            sigma_sq_n_prior: InverseGamma::new(0.1, 0.1).expect("valid prior"),
            ..Self::default()
        }
    }
}

impl Default for ModelSpec {
    /// Desk-scale defaults: three components, well-separated variance scales
    /// (E σ²_μ ≈ 0.56, E σ²_n ≈ 2.2) so the Geweke chain mixes quickly.
    fn default() -> Self {
        Self {
            alpha: 1.0,
            k: 3,
            sigma_sq_mu_prior: InverseGamma::new(10.0, 5.0).expect("valid prior"),
            sigma_sq_n_prior: InverseGamma::new(10.0, 20.0).expect("valid prior"),
        }
    }
}

/// How far the mixture weights of a [`State`] may sum from 1.
pub const STATE_SIMPLEX_TOL: f64 = 1e-12;

/// The sampled latent variables.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    /// Component assignment of each item.
    pub z: Vec<usize>,
    /// K × D cluster centers.
    pub mu: Matrix,
    /// Between-cluster variance.
    pub sigma_sq_mu: f64,
    /// Within-cluster variance.
    pub sigma_sq_n: f64,
    /// Mixture probabilities.
    pub pi: Vec<f64>,
}

impl State {
    pub fn new(z: Vec<usize>, mu: Matrix, sigma_sq_mu: f64, sigma_sq_n: f64, pi: Vec<f64>) -> Result<Self> {
        let state = Self {
            z,
            mu,
            sigma_sq_mu,
            sigma_sq_n,
            pi,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn k(&self) -> usize {
        self.pi.len()
    }

    pub fn dims(&self) -> usize {
        self.mu.cols()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.pi.len();
        if k == 0 || self.mu.rows() != k {
            return Err(Error::Shape(format!(
                "{} mixture weights for {} cluster centers",
                k,
                self.mu.rows()
            )));
        }
        if let Some(&bad) = self.z.iter().find(|&&c| c >= k) {
            return Err(Error::Domain(format!("assignment {bad} out of range 0..{k}")));
        }
        if self.pi.iter().any(|p| !(p.is_finite() && *p >= 0.0))
            || (self.pi.iter().sum::<f64>() - 1.0).abs() > STATE_SIMPLEX_TOL
        {
            return Err(Error::Domain(format!("mixture weights {:?} are not on the simplex", self.pi)));
        }
        for (name, v) in [("sigma_sq_mu", self.sigma_sq_mu), ("sigma_sq_n", self.sigma_sq_n)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.mu.as_slice().iter().any(|m| !m.is_finite()) {
            return Err(Error::Domain("non-finite cluster center".into()));
        }
        Ok(())
    }
}

/// N × D observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: Matrix,
}

impl Dataset {
    pub fn new(x: Matrix) -> Result<Self> {
        if x.rows() == 0 || x.cols() == 0 {
            return Err(Error::Shape(format!("dataset must be at least 1x1, got {}x{}", x.rows(), x.cols())));
        }
        if x.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("dataset has non-finite entries".into()));
        }
        Ok(Self { x })
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn d(&self) -> usize {
        self.x.cols()
    }
}

/// The named parameter blocks a Gibbs sweep resamples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    Pi,
    Z,
    Mu,
    SigmaSqMu,
    SigmaSqN,
}

impl Block {
    /// In Gibbs sweep order.
    pub const ALL: [Block; 5] = [Block::Pi, Block::Z, Block::Mu, Block::SigmaSqMu, Block::SigmaSqN];

    pub fn name(self) -> &'static str {
        match self {
            Block::Pi => "pi",
            Block::Z => "z",
            Block::Mu => "mu",
            Block::SigmaSqMu => "sigma_sq_mu",
            Block::SigmaSqN => "sigma_sq_n",
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Block {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Block::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown block {s:?}")))
    }
}

/// Joint density, per-block conditionals and the samplers built from them.
///
/// Only the conditionals and the joint are required; forward sampling, the
/// likelihood and the Gibbs sweep are written in terms of them, so a model
/// that overrides one conditional automatically gets a sampler that uses it.
pub trait Model: Send + Sync {
    fn spec(&self) -> &ModelSpec;

    fn cond_pi(&self, state: &State) -> Result<Dirichlet>;
    fn cond_z(&self, state: &State, data: &Dataset) -> Result<Multinomial>;
    fn cond_mu(&self, state: &State, data: &Dataset) -> Result<Gaussian>;
    fn cond_sigma_sq_mu(&self, state: &State) -> Result<InverseGamma>;
    fn cond_sigma_sq_n(&self, state: &State, data: &Dataset) -> Result<InverseGamma>;
    fn joint_log_p(&self, state: &State, data: &Dataset) -> Result<f64>;

    /// Likelihood p(X | θ): row i is Normal(μ_{z_i}, σ²_n) per coordinate,
    /// flattened row-major to N × D.
    fn cond_x(&self, state: &State) -> Result<Gaussian> {
        let centers = state.mu.gather_rows(&state.z);
        Gaussian::new(centers.into_vec(), vec![state.sigma_sq_n])
    }

    /// Ancestral sample of (θ, X): π, σ²_μ, σ²_n, μ, z, then X.
    fn forward_sample(&self, n: usize, d: usize, rng: &mut RngStream) -> Result<(State, Dataset)> {
        if n == 0 || d == 0 {
            return Err(Error::Usage(format!("forward sample needs n, d >= 1, got {n}, {d}")));
        }
        let spec = self.spec();
        let pi = Dirichlet::symmetric(spec.alpha, spec.k)?.sample(rng);
        let sigma_sq_mu = spec.sigma_sq_mu_prior.sample(rng);
        let sigma_sq_n = spec.sigma_sq_n_prior.sample(rng);
        let mu = Gaussian::scalar(0.0, sigma_sq_mu)?.sample_n(spec.k * d, rng)?;
        let mu = Matrix::from_vec(spec.k, d, mu)?;
        let z = Multinomial::from_probabilities(pi.clone())?.sample_n(n, rng)?;
        let state = State::new(z, mu, sigma_sq_mu, sigma_sq_n, pi)?;
        let x = self.cond_x(&state)?.sample(rng);
        let data = Dataset::new(Matrix::from_vec(n, d, x)?)?;
        Ok((state, data))
    }

    /// One Gibbs sweep in the fixed order π, z, μ, σ²_μ, σ²_n.
    fn gibbs_step(&self, state: &State, data: &Dataset, rng: &mut RngStream) -> Result<State> {
        let mut next = state.clone();
        next.pi = self.cond_pi(&next)?.sample(rng);
        next.z = self.cond_z(&next, data)?.sample(rng);
        let (k, d) = (next.mu.rows(), next.mu.cols());
        next.mu = Matrix::from_vec(k, d, self.cond_mu(&next, data)?.sample(rng))?;
        next.sigma_sq_mu = self.cond_sigma_sq_mu(&next)?.sample(rng);
        next.sigma_sq_n = self.cond_sigma_sq_n(&next, data)?.sample(rng);
        Ok(next)
    }
}

impl<M: Model + ?Sized> Model for &M {
    fn spec(&self) -> &ModelSpec {
        (**self).spec()
    }
    fn cond_pi(&self, state: &State) -> Result<Dirichlet> {
        (**self).cond_pi(state)
    }
    fn cond_z(&self, state: &State, data: &Dataset) -> Result<Multinomial> {
        (**self).cond_z(state, data)
    }
    fn cond_mu(&self, state: &State, data: &Dataset) -> Result<Gaussian> {
        (**self).cond_mu(state, data)
    }
    fn cond_sigma_sq_mu(&self, state: &State) -> Result<InverseGamma> {
        (**self).cond_sigma_sq_mu(state)
    }
    fn cond_sigma_sq_n(&self, state: &State, data: &Dataset) -> Result<InverseGamma> {
        (**self).cond_sigma_sq_n(state, data)
    }
    fn joint_log_p(&self, state: &State, data: &Dataset) -> Result<f64> {
        (**self).joint_log_p(state, data)
    }
    fn cond_x(&self, state: &State) -> Result<Gaussian> {
        (**self).cond_x(state)
    }
    fn forward_sample(&self, n: usize, d: usize, rng: &mut RngStream) -> Result<(State, Dataset)> {
        (**self).forward_sample(n, d, rng)
    }
    fn gibbs_step(&self, state: &State, data: &Dataset, rng: &mut RngStream) -> Result<State> {
        (**self).gibbs_step(state, data, rng)
    }
}
