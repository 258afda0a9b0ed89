use std::f64::consts::PI;

use super::Distribution;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Log density of Normal(mean, var) at `x`.
#[inline]
pub fn gaussian_ln_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let r = x - mean;
    -0.5 * (2.0 * PI).ln() - 0.5 * var.ln() - 0.5 * r * r / var
}

/// Independent elementwise normals.
///
/// `mean` and `var` are flat arrays; either may have length one, in which
/// case it broadcasts against the other (and against the evaluation point).
#[derive(Debug, Clone, PartialEq)]
pub struct Gaussian {
    mean: Vec<f64>,
    var: Vec<f64>,
}

fn broadcast_len(a: usize, b: usize) -> Option<usize> {
    match (a, b) {
        _ if a == b => Some(a),
        (1, n) | (n, 1) => Some(n),
        _ => None,
    }
}

impl Gaussian {
    pub fn new(mean: Vec<f64>, var: Vec<f64>) -> Result<Self> {
        if mean.is_empty() || var.is_empty() {
            return Err(Error::Parameter("gaussian with empty parameters".into()));
        }
        if broadcast_len(mean.len(), var.len()).is_none() {
            return Err(Error::Shape(format!(
                "mean of length {} against variance of length {}",
                mean.len(),
                var.len()
            )));
        }
        if let Some(v) = var.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Parameter(format!("gaussian variance must be positive, got {v}")));
        }
        if let Some(m) = mean.iter().find(|m| !m.is_finite()) {
            return Err(Error::Parameter(format!("gaussian mean must be finite, got {m}")));
        }
        Ok(Self { mean, var })
    }

    pub fn scalar(mean: f64, var: f64) -> Result<Self> {
        Self::new(vec![mean], vec![var])
    }

    /// Number of elements described by the parameters after broadcasting.
    pub fn len(&self) -> usize {
        self.mean.len().max(self.var.len())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.mean[if self.mean.len() == 1 { 0 } else { i }]
    }

    pub fn var(&self, i: usize) -> f64 {
        self.var[if self.var.len() == 1 { 0 } else { i }]
    }

    /// Elementwise log density, broadcast over the widest of (mean, var, x).
    pub fn log_p(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = broadcast_len(self.len(), x.len()).ok_or_else(|| {
            Error::Shape(format!(
                "gaussian of length {} evaluated at {} points",
                self.len(),
                x.len()
            ))
        })?;
        let xi = |i: usize| x[if x.len() == 1 { 0 } else { i }];
        let pi = |i: usize| if self.len() == 1 { 0 } else { i };
        Ok((0..n)
            .map(|i| gaussian_ln_pdf(xi(i), self.mean(pi(i)), self.var(pi(i))))
            .collect())
    }

    /// One draw per parameter element.
    pub fn sample(&self, rng: &mut RngStream) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.mean(i) + self.var(i).sqrt() * rng.standard_normal())
            .collect()
    }

    /// `n` draws, broadcasting the parameters to length `n`.
    pub fn sample_n(&self, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
        let len = broadcast_len(self.len(), n)
            .ok_or_else(|| Error::Shape(format!("cannot broadcast {} parameters to {n}", self.len())))?;
        let pi = |i: usize| if self.len() == 1 { 0 } else { i };
        Ok((0..len)
            .map(|i| self.mean(pi(i)) + self.var(pi(i)).sqrt() * rng.standard_normal())
            .collect())
    }
}

impl Distribution for Gaussian {
    type Value = Vec<f64>;

    fn total_log_p(&self, value: &Vec<f64>) -> Result<f64> {
        Ok(self.log_p(value)?.iter().sum())
    }

    fn sample(&self, rng: &mut RngStream) -> Vec<f64> {
        Gaussian::sample(self, rng)
    }
}
