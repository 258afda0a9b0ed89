use super::{gamma_variate, Distribution};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::special::ln_gamma;

/// Inverse-Gamma in shape/scale form: density ∝ x^-(a+1) exp(-b / x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseGamma {
    a: f64,
    b: f64,
}

impl InverseGamma {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::Parameter(format!("inverse-gamma shape must be positive, got {a}")));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::Parameter(format!("inverse-gamma scale must be positive, got {b}")));
        }
        Ok(Self { a, b })
    }

    pub fn shape(&self) -> f64 {
        self.a
    }

    pub fn scale(&self) -> f64 {
        self.b
    }

    pub fn log_p(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || x.is_infinite() {
            return Err(Error::Domain(format!("inverse-gamma evaluated at {x}")));
        }
        let (a, b) = (self.a, self.b);
        Ok(a * b.ln() - ln_gamma(a) - (a + 1.0) * x.ln() - b / x)
    }

    /// `b / Gamma(a, 1)`, i.e. the reciprocal of a Gamma(a, rate = b) draw.
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        self.b / gamma_variate(self.a, rng)
    }

    /// Defined for a > 1.
    pub fn mean(&self) -> Option<f64> {
        (self.a > 1.0).then(|| self.b / (self.a - 1.0))
    }

    /// Defined for a > 2.
    pub fn variance(&self) -> Option<f64> {
        (self.a > 2.0).then(|| self.b * self.b / ((self.a - 1.0).powi(2) * (self.a - 2.0)))
    }
}

impl Distribution for InverseGamma {
    type Value = f64;

    fn total_log_p(&self, value: &f64) -> Result<f64> {
        self.log_p(*value)
    }

    fn sample(&self, rng: &mut RngStream) -> f64 {
        InverseGamma::sample(self, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_parameters_at_one() {
        let ig = InverseGamma::new(1.0, 1.0).unwrap();
        assert!((ig.log_p(1.0).unwrap() - -1.0).abs() < 1e-14);
    }

    #[test]
    fn closed_form_value() {
        // 2 ln 3 - ln Γ(2) - 3 ln 3 - 1
        let ig = InverseGamma::new(2.0, 3.0).unwrap();
        assert!((ig.log_p(3.0).unwrap() - -2.098_612_288_668_109_7).abs() < 1e-12);
    }

    #[test]
    fn decreasing_past_the_mode() {
        let ig = InverseGamma::new(1.0, 1.0).unwrap();
        let mut prev = ig.log_p(0.5).unwrap();
        for i in 1..200 {
            let lp = ig.log_p(0.5 + i as f64 * 0.25).unwrap();
            assert!(lp < prev);
            prev = lp;
        }
    }

    #[test]
    fn rejects_outside_support() {
        let ig = InverseGamma::new(1.0, 1.0).unwrap();
        assert!(matches!(ig.log_p(0.0), Err(Error::Domain(_))));
        assert!(matches!(ig.log_p(-2.0), Err(Error::Domain(_))));
        assert!(InverseGamma::new(0.0, 1.0).is_err());
        assert!(InverseGamma::new(1.0, -1.0).is_err());
    }

    #[test]
    fn mean_matches_and_draws_are_positive() {
        let ig = InverseGamma::new(3.0, 2.0).unwrap();
        let mut rng = RngStream::new(8);
        let n = 100_000;
        let xs: Vec<f64> = (0..n).map(|_| ig.sample(&mut rng)).collect();
        assert!(xs.iter().all(|x| *x > 0.0));
        let m = xs.iter().sum::<f64>() / n as f64;
        let se = (ig.variance().unwrap() / n as f64).sqrt();
        assert!((m - 1.0).abs() < 5.0 * se, "mean {m}");
    }

    #[test]
    fn deterministic_draws() {
        let ig = InverseGamma::new(2.0, 1.0).unwrap();
        let a: Vec<f64> = {
            let mut r = RngStream::new(1);
            (0..20).map(|_| ig.sample(&mut r)).collect()
        };
        let b: Vec<f64> = {
            let mut r = RngStream::new(1);
            (0..20).map(|_| ig.sample(&mut r)).collect()
        };
        assert_eq!(a, b);
    }
}
