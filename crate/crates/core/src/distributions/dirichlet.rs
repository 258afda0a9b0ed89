use super::{ln_gamma_variate, Distribution, SIMPLEX_TOL};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::special::ln_gamma;

/// Dirichlet distribution over the (K-1)-simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct Dirichlet {
    alpha: Vec<f64>,
}

impl Dirichlet {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::Parameter("dirichlet needs at least one component".into()));
        }
        if let Some(a) = alpha.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::Parameter(format!("dirichlet concentration must be positive, got {a}")));
        }
        Ok(Self { alpha })
    }

    pub fn symmetric(alpha: f64, k: usize) -> Result<Self> {
        Self::new(vec![alpha; k])
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn k(&self) -> usize {
        self.alpha.len()
    }

    pub fn log_p(&self, pi: &[f64]) -> Result<f64> {
        if pi.len() != self.k() {
            return Err(Error::Shape(format!(
                "dirichlet of dimension {} evaluated at a vector of length {}",
                self.k(),
                pi.len()
            )));
        }
        if pi.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Domain(format!("{pi:?} has negative or non-finite entries")));
        }
        let total: f64 = pi.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::Domain(format!("{pi:?} sums to {total}, not 1")));
        }
        let alpha_sum: f64 = self.alpha.iter().sum();
        let mut lp = ln_gamma(alpha_sum) - self.alpha.iter().map(|&a| ln_gamma(a)).sum::<f64>();
        for (&a, &p) in self.alpha.iter().zip(pi) {
            if p == 0.0 {
                if a < 1.0 {
                    return Err(Error::InfiniteDensity(format!(
                        "zero simplex coordinate with concentration {a} < 1"
                    )));
                }
                if a > 1.0 {
                    return Ok(f64::NEG_INFINITY);
                }
                // a == 1: the term is absent
                continue;
            }
            lp += (a - 1.0) * p.ln();
        }
        Ok(lp)
    }

    /// Normalized independent Gamma(α_k, 1) draws, normalized in log space.
    pub fn sample(&self, rng: &mut RngStream) -> Vec<f64> {
        let logs: Vec<f64> = self.alpha.iter().map(|&a| ln_gamma_variate(a, rng)).collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut out: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = out.iter().sum();
        out.iter_mut().for_each(|p| *p /= total);
        out
    }
}

impl Distribution for Dirichlet {
    type Value = Vec<f64>;

    fn total_log_p(&self, value: &Vec<f64>) -> Result<f64> {
        self.log_p(value)
    }

    fn sample(&self, rng: &mut RngStream) -> Vec<f64> {
        Dirichlet::sample(self, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_dirichlet_densities() {
        let d = Dirichlet::new(vec![1.0; 3]).unwrap();
        assert!((d.log_p(&[0.2, 0.3, 0.5]).unwrap() - 2f64.ln()).abs() < 1e-12);
        let d = Dirichlet::new(vec![1.0; 2]).unwrap();
        assert!(d.log_p(&[0.5, 0.5]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn off_simplex_is_a_domain_error() {
        let d = Dirichlet::new(vec![1.0; 2]).unwrap();
        assert!(matches!(d.log_p(&[0.5, 0.6]), Err(Error::Domain(_))));
        assert!(matches!(d.log_p(&[-0.1, 1.1]), Err(Error::Domain(_))));
        assert!(matches!(d.log_p(&[1.0]), Err(Error::Shape(_))));
    }

    #[test]
    fn boundary_points() {
        let sparse = Dirichlet::new(vec![0.5, 2.0]).unwrap();
        assert!(matches!(sparse.log_p(&[0.0, 1.0]), Err(Error::InfiniteDensity(_))));
        assert_eq!(sparse.log_p(&[1.0, 0.0]).unwrap(), f64::NEG_INFINITY);
        let flat = Dirichlet::new(vec![1.0, 3.0]).unwrap();
        assert!(flat.log_p(&[0.0, 1.0]).unwrap().is_finite());
    }

    #[test]
    fn rejects_bad_concentration() {
        assert!(Dirichlet::new(vec![]).is_err());
        assert!(Dirichlet::new(vec![1.0, 0.0]).is_err());
        assert!(Dirichlet::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn large_concentration_is_near_center() {
        let d = Dirichlet::new(vec![1e6, 1e6]).unwrap();
        let mut rng = RngStream::new(17);
        for _ in 0..100 {
            let p = d.sample(&mut rng);
            assert!((p[0] - 0.5).abs() < 0.01 && (p[1] - 0.5).abs() < 0.01);
        }
    }

    #[test]
    fn tiny_concentration_samples_stay_on_simplex() {
        let d = Dirichlet::new(vec![1e-3; 4]).unwrap();
        let mut rng = RngStream::new(4);
        for _ in 0..1000 {
            let p = d.sample(&mut rng);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|x| x.is_finite()));
        }
    }

    #[test]
    fn first_coordinate_mean() {
        let d = Dirichlet::new(vec![2.0, 5.0]).unwrap();
        let mut rng = RngStream::new(23);
        let n = 100_000;
        let m = (0..n).map(|_| d.sample(&mut rng)[0]).sum::<f64>() / n as f64;
        // Beta(2, 5) marginal: mean 2/7, variance 10 / (49 * 8)
        let se = (10.0 / (49.0 * 8.0) / n as f64).sqrt();
        assert!((m - 2.0 / 7.0).abs() < 5.0 * se, "mean {m}");
    }
}
