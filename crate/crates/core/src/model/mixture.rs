use super::{Dataset, Model, ModelSpec, State};
use crate::distributions::{gaussian_ln_pdf, Dirichlet, Gaussian, InverseGamma, Multinomial};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// The reference Gibbs sampler for the mixture model.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureModel {
    spec: ModelSpec,
}

impl MixtureModel {
    pub fn new(spec: ModelSpec) -> Self {
        Self { spec }
    }
}

impl Default for MixtureModel {
    fn default() -> Self {
        Self::new(ModelSpec::default())
    }
}

fn check_state(spec: &ModelSpec, state: &State) -> Result<()> {
    state.validate()?;
    if state.k() != spec.k {
        return Err(Error::Shape(format!("state has {} components, model has {}", state.k(), spec.k)));
    }
    Ok(())
}

fn check_data(spec: &ModelSpec, state: &State, data: &Dataset) -> Result<()> {
    check_state(spec, state)?;
    if state.z.len() != data.n() || state.dims() != data.d() {
        return Err(Error::Shape(format!(
            "state describes {} items in {} dims, data is {}x{}",
            state.z.len(),
            state.dims(),
            data.n(),
            data.d()
        )));
    }
    Ok(())
}

/// Items per component over labels `0..k`, zero-padded.
pub fn cluster_counts(z: &[usize], k: usize) -> Vec<usize> {
    let mut counts = vec![0; k];
    for &c in z {
        counts[c] += 1;
    }
    counts
}

/// N × K matrix of Σ_j log N(x_ij; μ_kj, σ²_n).
pub fn log_evidence(state: &State, data: &Dataset) -> Matrix {
    let (n, k) = (data.n(), state.k());
    let mut out = Matrix::zeros(n, k);
    for i in 0..n {
        let xi = data.x().row(i);
        for c in 0..k {
            let lp = xi
                .iter()
                .zip(state.mu.row(c))
                .map(|(&x, &m)| gaussian_ln_pdf(x, m, state.sigma_sq_n))
                .sum();
            out.set(i, c, lp);
        }
    }
    out
}

/// Σ_ij (x_ij − μ_{z_i j})².
pub fn residual_sum_sq(state: &State, data: &Dataset) -> f64 {
    (0..data.n())
        .map(|i| {
            data.x()
                .row(i)
                .iter()
                .zip(state.mu.row(state.z[i]))
                .map(|(x, m)| (x - m).powi(2))
                .sum::<f64>()
        })
        .sum()
}

/// The six terms of the joint log density, kept separate for inspection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointTerms {
    pub pi_prior: f64,
    pub assignments: f64,
    pub sigma_sq_mu_prior: f64,
    pub sigma_sq_n_prior: f64,
    pub mu_prior: f64,
    pub likelihood: f64,
}

impl JointTerms {
    pub fn total(&self) -> f64 {
        self.pi_prior
            + self.assignments
            + self.sigma_sq_mu_prior
            + self.sigma_sq_n_prior
            + self.mu_prior
            + self.likelihood
    }
}

pub fn joint_terms(spec: &ModelSpec, state: &State, data: &Dataset) -> Result<JointTerms> {
    check_data(spec, state, data)?;
    let pi_prior = Dirichlet::symmetric(spec.alpha, spec.k)?.log_p(&state.pi)?;
    let assignments = Multinomial::from_probabilities(state.pi.clone())?
        .log_p(&state.z)?
        .iter()
        .sum();
    let sigma_sq_mu_prior = spec.sigma_sq_mu_prior.log_p(state.sigma_sq_mu)?;
    let sigma_sq_n_prior = spec.sigma_sq_n_prior.log_p(state.sigma_sq_n)?;
    let mu_prior = Gaussian::scalar(0.0, state.sigma_sq_mu)?
        .log_p(state.mu.as_slice())?
        .iter()
        .sum();
    let centers = state.mu.gather_rows(&state.z);
    let likelihood = Gaussian::new(centers.into_vec(), vec![state.sigma_sq_n])?
        .log_p(data.x().as_slice())?
        .iter()
        .sum();
    Ok(JointTerms {
        pi_prior,
        assignments,
        sigma_sq_mu_prior,
        sigma_sq_n_prior,
        mu_prior,
        likelihood,
    })
}

impl Model for MixtureModel {
    fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    fn cond_pi(&self, state: &State) -> Result<Dirichlet> {
        check_state(&self.spec, state)?;
        let counts = cluster_counts(&state.z, self.spec.k);
        Dirichlet::new(counts.iter().map(|&c| self.spec.alpha + c as f64).collect())
    }

    fn cond_z(&self, state: &State, data: &Dataset) -> Result<Multinomial> {
        check_data(&self.spec, state, data)?;
        let mut log_odds = log_evidence(state, data);
        let prior: Vec<f64> = state.pi.iter().map(|p| p.ln()).collect();
        for i in 0..log_odds.rows() {
            for (v, lp) in log_odds.row_mut(i).iter_mut().zip(&prior) {
                *v += lp;
            }
        }
        Multinomial::from_log_odds(&log_odds)
    }

    fn cond_mu(&self, state: &State, data: &Dataset) -> Result<Gaussian> {
        check_data(&self.spec, state, data)?;
        let (k, d) = (self.spec.k, data.d());
        let mut mean = Vec::with_capacity(k * d);
        let mut var = Vec::with_capacity(k * d);
        let counts = cluster_counts(&state.z, k);
        let mut sums = Matrix::zeros(k, d);
        for (i, &c) in state.z.iter().enumerate() {
            for (s, x) in sums.row_mut(c).iter_mut().zip(data.x().row(i)) {
                *s += x;
            }
        }
        for c in 0..k {
            for j in 0..d {
                let (h, lam) = if counts[c] > 0 {
                    (
                        sums.get(c, j) / state.sigma_sq_n,
                        counts[c] as f64 / state.sigma_sq_n + 1.0 / state.sigma_sq_mu,
                    )
                } else {
                    (0.0, 1.0 / state.sigma_sq_mu)
                };
                mean.push(h / lam);
                var.push(1.0 / lam);
            }
        }
        Gaussian::new(mean, var)
    }

    fn cond_sigma_sq_mu(&self, state: &State) -> Result<InverseGamma> {
        check_state(&self.spec, state)?;
        let prior = self.spec.sigma_sq_mu_prior;
        let sum_sq: f64 = state.mu.as_slice().iter().map(|m| m * m).sum();
        InverseGamma::new(
            prior.shape() + 0.5 * (self.spec.k * state.dims()) as f64,
            prior.scale() + 0.5 * sum_sq,
        )
    }

    fn cond_sigma_sq_n(&self, state: &State, data: &Dataset) -> Result<InverseGamma> {
        check_data(&self.spec, state, data)?;
        let prior = self.spec.sigma_sq_n_prior;
        InverseGamma::new(
            prior.shape() + 0.5 * (data.n() * data.d()) as f64,
            prior.scale() + 0.5 * residual_sum_sq(state, data),
        )
    }

    fn joint_log_p(&self, state: &State, data: &Dataset) -> Result<f64> {
        Ok(joint_terms(&self.spec, state, data)?.total())
    }
}
