use super::{Distribution, SIMPLEX_TOL};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::RngStream;

/// Categorical draws over `k` categories, one independent row per item.
///
/// A single-row object broadcasts against any number of items. Log
/// probabilities are kept alongside the probabilities so that categories whose
/// mass underflows in linear space still evaluate to a finite log density.
#[derive(Debug, Clone, PartialEq)]
pub struct Multinomial {
    k: usize,
    probs: Vec<f64>,
    log_probs: Vec<f64>,
}

impl Multinomial {
    /// Single row of probabilities.
    pub fn from_probabilities(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Parameter("multinomial needs at least one category".into()));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Domain(format!("{probs:?} has negative or non-finite entries")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::Domain(format!("probabilities sum to {total}, not 1")));
        }
        let log_probs = probs.iter().map(|p| p.ln()).collect();
        Ok(Self {
            k: probs.len(),
            probs,
            log_probs,
        })
    }

    /// Row-wise softmax of an items × categories matrix of log odds.
    ///
    /// The row max is subtracted before exponentiating. `-inf` entries forbid a
    /// category; a row with every entry `-inf` has no valid normalization.
    pub fn from_log_odds(log_odds: &Matrix) -> Result<Self> {
        let k = log_odds.cols();
        if k == 0 || log_odds.rows() == 0 {
            return Err(Error::Parameter("empty log-odds matrix".into()));
        }
        let mut probs = Vec::with_capacity(log_odds.rows() * k);
        let mut log_probs = Vec::with_capacity(log_odds.rows() * k);
        for r in 0..log_odds.rows() {
            let row = log_odds.row(r);
            if row.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
                return Err(Error::Domain(format!("row {r} has NaN or +inf log odds")));
            }
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max == f64::NEG_INFINITY {
                return Err(Error::Domain(format!("row {r} forbids every category")));
            }
            let shifted: Vec<f64> = row.iter().map(|v| v - max).collect();
            let total: f64 = shifted.iter().map(|s| s.exp()).sum();
            let log_total = total.ln();
            for s in shifted {
                probs.push(s.exp() / total);
                log_probs.push(s - log_total);
            }
        }
        Ok(Self { k, probs, log_probs })
    }

    /// One-row convenience wrapper around [`Multinomial::from_log_odds`].
    pub fn from_log_odds_row(row: &[f64]) -> Result<Self> {
        Self::from_log_odds(&Matrix::from_vec(1, row.len(), row.to_vec())?)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> usize {
        self.probs.len() / self.k
    }

    pub fn probs(&self, row: usize) -> &[f64] {
        &self.probs[row * self.k..(row + 1) * self.k]
    }

    pub fn log_probs(&self, row: usize) -> &[f64] {
        &self.log_probs[row * self.k..(row + 1) * self.k]
    }

    fn row_for(&self, i: usize) -> usize {
        if self.rows() == 1 {
            0
        } else {
            i
        }
    }

    /// Elementwise log probability of the category indices in `z`.
    pub fn log_p(&self, z: &[usize]) -> Result<Vec<f64>> {
        if self.rows() != 1 && self.rows() != z.len() {
            return Err(Error::Shape(format!(
                "{} rows evaluated at {} items",
                self.rows(),
                z.len()
            )));
        }
        z.iter()
            .enumerate()
            .map(|(i, &c)| {
                if c >= self.k {
                    Err(Error::Domain(format!("category {c} out of range 0..{}", self.k)))
                } else {
                    Ok(self.log_probs(self.row_for(i))[c])
                }
            })
            .collect()
    }

    fn draw_row(&self, row: usize, rng: &mut RngStream) -> usize {
        let p = self.probs(row);
        let u = rng.open01();
        let mut cum = 0.0;
        let mut last_positive = 0;
        for (c, &pc) in p.iter().enumerate() {
            if pc > 0.0 {
                last_positive = c;
            }
            cum += pc;
            if cum >= u && pc > 0.0 {
                return c;
            }
        }
        // rounding left the cumulative sum just short of u
        last_positive
    }

    /// One category per row, by inverse CDF.
    pub fn sample(&self, rng: &mut RngStream) -> Vec<usize> {
        (0..self.rows()).map(|r| self.draw_row(r, rng)).collect()
    }

    /// `n` draws from a single-row object (or one per row when `n == rows`).
    pub fn sample_n(&self, n: usize, rng: &mut RngStream) -> Result<Vec<usize>> {
        if self.rows() != 1 && self.rows() != n {
            return Err(Error::Shape(format!("cannot draw {n} items from {} rows", self.rows())));
        }
        Ok((0..n).map(|i| self.draw_row(self.row_for(i), rng)).collect())
    }
}

impl Distribution for Multinomial {
    type Value = Vec<usize>;

    fn total_log_p(&self, value: &Vec<usize>) -> Result<f64> {
        Ok(self.log_p(value)?.iter().sum())
    }

    fn sample(&self, rng: &mut RngStream) -> Vec<usize> {
        Multinomial::sample(self, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_row_is_uniform() {
        for c in [-50.0, 0.0, 3.0, 700.0] {
            let m = Multinomial::from_log_odds_row(&[c, c, c]).unwrap();
            for p in m.probs(0) {
                assert!((p - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn forbidden_category() {
        let m = Multinomial::from_log_odds_row(&[0.0, f64::NEG_INFINITY]).unwrap();
        assert_eq!(m.probs(0), &[1.0, 0.0]);
        let mut rng = RngStream::new(0);
        assert!(m.sample_n(1000, &mut rng).unwrap().iter().all(|&c| c == 0));
    }

    #[test]
    fn large_log_odds_do_not_overflow() {
        let m = Multinomial::from_log_odds_row(&[1000.0, 1001.0]).unwrap();
        // shifted by -1001: (e^-1, 1) / (1 + e^-1)
        let e = std::f64::consts::E;
        assert!((m.probs(0)[0] - 1.0 / (1.0 + e)).abs() < 1e-15);
        assert!((m.probs(0)[1] - e / (1.0 + e)).abs() < 1e-15);
    }

    #[test]
    fn all_forbidden_row_is_an_error() {
        let r = Multinomial::from_log_odds_row(&[f64::NEG_INFINITY; 3]);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn underflowing_category_keeps_finite_log_mass() {
        let m = Multinomial::from_log_odds_row(&[0.0, -2000.0]).unwrap();
        assert_eq!(m.probs(0)[1], 0.0);
        assert!((m.log_p(&[1]).unwrap()[0] - -2000.0).abs() < 1e-9);
    }

    #[test]
    fn direct_lookup() {
        let m = Multinomial::from_probabilities(vec![0.5, 0.5]).unwrap();
        assert!((m.log_p(&[0]).unwrap()[0] - 0.5f64.ln()).abs() < 1e-15);
        let m = Multinomial::from_probabilities(vec![1.0, 0.0]).unwrap();
        assert_eq!(m.log_p(&[0]).unwrap()[0], 0.0);
        let m = Multinomial::from_probabilities(vec![0.2, 0.3, 0.5]).unwrap();
        let lp = m.log_p(&[2, 0]).unwrap();
        assert!((lp[0] - 0.5f64.ln()).abs() < 1e-15);
        assert!((lp[1] - 0.2f64.ln()).abs() < 1e-15);
        assert!(matches!(m.log_p(&[3]), Err(Error::Domain(_))));
    }

    #[test]
    fn degenerate_row_always_picks_its_category() {
        let m = Multinomial::from_probabilities(vec![0.0, 1.0, 0.0]).unwrap();
        let mut rng = RngStream::new(3);
        assert!(m.sample_n(10_000, &mut rng).unwrap().iter().all(|&c| c == 1));
    }

    #[test]
    fn frequency_within_binomial_error() {
        let m = Multinomial::from_probabilities(vec![0.3, 0.7]).unwrap();
        let mut rng = RngStream::new(12);
        let n = 100_000;
        let ones = m.sample_n(n, &mut rng).unwrap().iter().filter(|&&c| c == 1).count();
        let f = ones as f64 / n as f64;
        let se = (0.21 / n as f64).sqrt();
        assert!((f - 0.7).abs() < 5.0 * se, "frequency {f}");
    }

    #[test]
    fn fixed_seed_fixed_indices() {
        let m = Multinomial::from_probabilities(vec![0.2, 0.3, 0.5]).unwrap();
        let a = m.sample_n(100, &mut RngStream::new(5)).unwrap();
        let b = m.sample_n(100, &mut RngStream::new(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rows_must_match_items() {
        let lo = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let m = Multinomial::from_log_odds(&lo).unwrap();
        assert_eq!(m.rows(), 2);
        assert!(matches!(m.log_p(&[0, 1, 0]), Err(Error::Shape(_))));
        assert_eq!(m.sample(&mut RngStream::new(1)).len(), 2);
    }
}
