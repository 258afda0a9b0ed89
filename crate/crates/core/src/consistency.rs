//! Conditional-versus-joint consistency checks.
//!
//! For any block x with the rest of the state z held fixed,
//! `log p(x'|z) - log p(x|z)` must equal `log p(x',z) - log p(x,z)` exactly.
//! Each trial draws a random (state, X) from the model, replaces one block with
//! a random value and compares the two log ratios. Normalizing constants cancel
//! on both sides, so the joint can be evaluated unnormalized.
//!
//! For the vector blocks (z and μ) the conditional log ratio is the sum of the
//! elementwise differences; this relies on those conditionals factorizing over
//! items and clusters given the rest of the state.

use rayon::prelude::*;

use crate::distributions::{Dirichlet, Distribution, Gaussian, InverseGamma};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{Block, Dataset, Model, State};
use crate::rng::RngStream;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_TRIALS: usize = 100;

/// Data size and tolerance of a consistency run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyConfig {
    pub trials: usize,
    pub tol: f64,
    pub n: usize,
    pub d: usize,
}

impl Default for ConsistencyConfig {
    fn default() -> Self {
        Self {
            trials: DEFAULT_TRIALS,
            tol: DEFAULT_TOLERANCE,
            n: 20,
            d: 2,
        }
    }
}

impl ConsistencyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Usage("at least one trial is required".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Usage(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.n == 0 || self.d == 0 {
            return Err(Error::Usage("data size must be at least 1x1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyTrial {
    pub block: Block,
    /// Seed that reproduces this trial via [`run_trial`].
    pub seed: u64,
    pub log_ratio_conditional: f64,
    pub log_ratio_joint: f64,
    pub abs_diff: f64,
    /// Set when evaluating either side failed; the trial then counts as failed.
    pub error: Option<String>,
}

impl ConsistencyTrial {
    pub fn passed(&self, tol: f64) -> bool {
        self.error.is_none() && self.abs_diff < tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockReport {
    pub block: Block,
    pub tol: f64,
    pub trials: Vec<ConsistencyTrial>,
}

impl BlockReport {
    /// NaN-safe: a trial with an error counts as infinitely far off.
    pub fn max_abs_diff(&self) -> f64 {
        self.trials
            .iter()
            .map(|t| if t.error.is_some() || t.abs_diff.is_nan() { f64::INFINITY } else { t.abs_diff })
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_abs_diff() < self.tol
    }

    /// The worst trial, for replay.
    pub fn worst(&self) -> Option<&ConsistencyTrial> {
        self.trials.iter().max_by(|a, b| {
            let key = |t: &ConsistencyTrial| if t.error.is_some() { f64::INFINITY } else { t.abs_diff };
            key(a).total_cmp(&key(b))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub tol: f64,
    pub blocks: Vec<BlockReport>,
}

impl ConsistencyReport {
    pub fn passed(&self) -> bool {
        self.blocks.iter().all(BlockReport::passed)
    }

    pub fn failing_blocks(&self) -> Vec<Block> {
        self.blocks.iter().filter(|b| !b.passed()).map(|b| b.block).collect()
    }

    pub fn block(&self, block: Block) -> Option<&BlockReport> {
        self.blocks.iter().find(|b| b.block == block)
    }
}

/// Copy of `state` with only `block` replaced by a fresh random value.
///
/// z: uniform labels; μ: standard normal entries; variances: IG(2, 2);
/// π: a uniform Dirichlet draw.
pub fn perturb_block(block: Block, state: &State, rng: &mut RngStream) -> Result<State> {
    let mut next = state.clone();
    let k = state.k();
    match block {
        Block::Pi => next.pi = Dirichlet::symmetric(1.0, k)?.sample(rng),
        Block::Z => next.z = (0..state.z.len()).map(|_| rng.below(k)).collect(),
        Block::Mu => {
            let (rows, cols) = (state.mu.rows(), state.mu.cols());
            next.mu = Matrix::from_vec(rows, cols, Gaussian::scalar(0.0, 1.0)?.sample_n(rows * cols, rng)?)?;
        }
        Block::SigmaSqMu => next.sigma_sq_mu = InverseGamma::new(2.0, 2.0)?.sample(rng),
        Block::SigmaSqN => next.sigma_sq_n = InverseGamma::new(2.0, 2.0)?.sample(rng),
    }
    Ok(next)
}

/// Conditional and joint log ratios for moving `block` from its value in
/// `state` to its value in `proposed`. The conditional is evaluated at `state`.
pub fn log_ratios<M: Model + ?Sized>(
    model: &M,
    block: Block,
    state: &State,
    proposed: &State,
    data: &Dataset,
) -> Result<(f64, f64)> {
    let conditional = match block {
        Block::Pi => {
            let c = model.cond_pi(state)?;
            c.total_log_p(&proposed.pi)? - c.total_log_p(&state.pi)?
        }
        Block::Z => {
            let c = model.cond_z(state, data)?;
            c.total_log_p(&proposed.z)? - c.total_log_p(&state.z)?
        }
        Block::Mu => {
            let c = model.cond_mu(state, data)?;
            c.total_log_p(&proposed.mu.as_slice().to_vec())? - c.total_log_p(&state.mu.as_slice().to_vec())?
        }
        Block::SigmaSqMu => {
            let c = model.cond_sigma_sq_mu(state)?;
            c.log_p(proposed.sigma_sq_mu)? - c.log_p(state.sigma_sq_mu)?
        }
        Block::SigmaSqN => {
            let c = model.cond_sigma_sq_n(state, data)?;
            c.log_p(proposed.sigma_sq_n)? - c.log_p(state.sigma_sq_n)?
        }
    };
    let joint = model.joint_log_p(proposed, data)? - model.joint_log_p(state, data)?;
    Ok((conditional, joint))
}

/// One trial, fully determined by `seed`.
pub fn run_trial<M: Model + ?Sized>(model: &M, block: Block, n: usize, d: usize, seed: u64) -> ConsistencyTrial {
    let outcome = (|| {
        let mut rng = RngStream::new(seed);
        let (state, data) = model.forward_sample(n, d, &mut rng)?;
        let proposed = perturb_block(block, &state, &mut rng)?;
        log_ratios(model, block, &state, &proposed, &data)
    })();
    match outcome {
        Ok((c, j)) => ConsistencyTrial {
            block,
            seed,
            log_ratio_conditional: c,
            log_ratio_joint: j,
            abs_diff: (c - j).abs(),
            error: None,
        },
        Err(e) => ConsistencyTrial {
            block,
            seed,
            log_ratio_conditional: f64::NAN,
            log_ratio_joint: f64::NAN,
            abs_diff: f64::NAN,
            error: Some(e.to_string()),
        },
    }
}

/// Randomized consistency trials for one block.
pub fn check_block<M: Model + ?Sized>(
    model: &M,
    block: Block,
    config: &ConsistencyConfig,
    rng: &mut RngStream,
) -> Result<BlockReport> {
    config.validate()?;
    let seeds: Vec<u64> = (0..config.trials).map(|_| rand::RngCore::next_u64(rng)).collect();
    let trials = seeds
        .into_par_iter()
        .map(|seed| run_trial(model, block, config.n, config.d, seed))
        .collect();
    Ok(BlockReport {
        block,
        tol: config.tol,
        trials,
    })
}

/// Every block in turn; block `i` uses the stream `rng.derive(i)`.
pub fn check_all<M: Model + ?Sized>(model: &M, config: &ConsistencyConfig, rng: &RngStream) -> Result<ConsistencyReport> {
    config.validate()?;
    let blocks = Block::ALL
        .iter()
        .enumerate()
        .map(|(i, &b)| check_block(model, b, config, &mut rng.derive(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConsistencyReport { tol: config.tol, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MixtureModel;

    fn sample_state(seed: u64) -> (State, Dataset) {
        MixtureModel::default().forward_sample(5, 2, &mut RngStream::new(seed)).unwrap()
    }

    #[test]
    fn perturbation_is_local() {
        let (state, _) = sample_state(1);
        let mut rng = RngStream::new(2);
        let next = perturb_block(Block::Mu, &state, &mut rng).unwrap();
        assert_ne!(next.mu, state.mu);
        assert_eq!(next.z, state.z);
        assert_eq!(next.pi, state.pi);
        assert_eq!(next.sigma_sq_mu.to_bits(), state.sigma_sq_mu.to_bits());
        assert_eq!(next.sigma_sq_n.to_bits(), state.sigma_sq_n.to_bits());
    }

    #[test]
    fn perturbed_values_are_valid() {
        let (state, _) = sample_state(3);
        let mut rng = RngStream::new(4);
        for block in Block::ALL {
            let next = perturb_block(block, &state, &mut rng).unwrap();
            next.validate().unwrap();
        }
        let next = perturb_block(Block::Pi, &state, &mut rng).unwrap();
        assert!((next.pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let next = perturb_block(Block::Z, &state, &mut rng).unwrap();
        assert_eq!(next.z.len(), 5);
        assert!(next.z.iter().all(|&c| c < 3));
    }

    #[test]
    fn zero_perturbation_gives_zero_ratios() {
        let model = MixtureModel::default();
        let (state, data) = sample_state(5);
        for block in Block::ALL {
            let (c, j) = log_ratios(&model, block, &state, &state, &data).unwrap();
            assert_eq!(c, 0.0);
            assert_eq!(j, 0.0);
        }
    }

    #[test]
    fn rejects_bad_config() {
        let model = MixtureModel::default();
        let mut rng = RngStream::new(0);
        let bad = ConsistencyConfig { trials: 0, ..Default::default() };
        assert!(matches!(check_block(&model, Block::Pi, &bad, &mut rng), Err(Error::Usage(_))));
        let bad = ConsistencyConfig { tol: 0.0, ..Default::default() };
        assert!(matches!(check_block(&model, Block::Pi, &bad, &mut rng), Err(Error::Usage(_))));
    }

    #[test]
    fn trial_replays_from_its_seed() {
        let model = MixtureModel::default();
        let report = check_block(&model, Block::SigmaSqN, &ConsistencyConfig { trials: 4, ..Default::default() }, &mut RngStream::new(9)).unwrap();
        let t = &report.trials[2];
        assert_eq!(&run_trial(&model, Block::SigmaSqN, 20, 2, t.seed), t);
    }
}
