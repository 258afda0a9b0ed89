use std::fmt;
use std::str::FromStr;

use super::{cluster_counts, Dataset, State};
use crate::error::{Error, Result};

/// Scalar summaries of (θ, X) compared by the Geweke test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistic {
    MeanX,
    MaxAbsMu,
    SigmaSqN,
    SigmaSqMu,
    EntropyPi,
    MaxOccupancy,
}

impl Statistic {
    pub const ALL: [Statistic; 6] = [
        Statistic::MeanX,
        Statistic::MaxAbsMu,
        Statistic::SigmaSqN,
        Statistic::SigmaSqMu,
        Statistic::EntropyPi,
        Statistic::MaxOccupancy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::MeanX => "mean_x",
            Statistic::MaxAbsMu => "max_abs_mu",
            Statistic::SigmaSqN => "sigma_sq_n",
            Statistic::SigmaSqMu => "sigma_sq_mu",
            Statistic::EntropyPi => "entropy_pi",
            Statistic::MaxOccupancy => "max_occupancy",
        }
    }

    pub fn evaluate(self, state: &State, data: &Dataset) -> f64 {
        match self {
            Statistic::MeanX => {
                let xs = data.x().as_slice();
                xs.iter().sum::<f64>() / xs.len() as f64
            }
            Statistic::MaxAbsMu => state.mu.as_slice().iter().fold(0.0, |m, v| m.max(v.abs())),
            Statistic::SigmaSqN => state.sigma_sq_n,
            Statistic::SigmaSqMu => state.sigma_sq_mu,
            Statistic::EntropyPi => entropy(&state.pi),
            Statistic::MaxOccupancy => {
                let counts = cluster_counts(&state.z, state.k());
                let max = counts.into_iter().max().unwrap_or(0);
                max as f64 / state.z.len().max(1) as f64
            }
        }
    }

    /// All statistics of `(state, data)` in [`Statistic::ALL`] order.
    pub fn evaluate_all(state: &State, data: &Dataset) -> Vec<(Statistic, f64)> {
        Statistic::ALL.iter().map(|s| (*s, s.evaluate(state, data))).collect()
    }
}

/// Shannon entropy in nats; zero entries contribute nothing.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Statistic::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown statistic {s:?}")))
    }
}
