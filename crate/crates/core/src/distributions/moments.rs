//! Empirical-versus-exact moment checks for the distribution samplers.

use super::{Dirichlet, Gaussian, InverseGamma, Multinomial};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// A moment passes when its z-score is strictly inside ±Z_LIMIT.
pub const Z_LIMIT: f64 = 5.0;

/// Exact first two moments of one coordinate, where they exist.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactMoments {
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    /// Whether the fourth moment is finite. The standard error of the sample
    /// variance only exists when it is.
    pub finite_fourth_moment: bool,
}

/// Something that can be sampled as a fixed-length vector of reals with known moments.
pub trait MomentSource {
    fn dim(&self) -> usize;
    fn exact(&self, coord: usize) -> ExactMoments;
    fn draw(&self, rng: &mut RngStream) -> Vec<f64>;
}

#[derive(Debug, Clone, PartialEq)]
pub enum MomentCheck {
    Tested { empirical: f64, exact: f64, z: f64 },
    Skipped { reason: &'static str },
}

impl MomentCheck {
    pub fn passed(&self) -> bool {
        match self {
            MomentCheck::Tested { z, .. } => z.abs() < Z_LIMIT,
            MomentCheck::Skipped { .. } => true,
        }
    }

    pub fn z(&self) -> Option<f64> {
        match self {
            MomentCheck::Tested { z, .. } => Some(*z),
            MomentCheck::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateMoments {
    pub mean: MomentCheck,
    pub variance: MomentCheck,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub n: usize,
    pub coordinates: Vec<CoordinateMoments>,
}

impl MomentReport {
    pub fn passed(&self) -> bool {
        self.coordinates
            .iter()
            .all(|c| c.mean.passed() && c.variance.passed())
    }

    /// Largest |z| over the tested moments.
    pub fn max_abs_z(&self) -> f64 {
        self.coordinates
            .iter()
            .flat_map(|c| [c.mean.z(), c.variance.z()])
            .flatten()
            .fold(0.0, |m, z| m.max(z.abs()))
    }
}

/// Draw `n` samples and compare per-coordinate mean and variance with their exact values.
///
/// Mean z-scores use the exact variance as the sampling variance. Variance
/// z-scores use the empirical fourth central moment, and are only computed when
/// the exact fourth moment is finite; otherwise the check is skipped.
pub fn moment_check<D: MomentSource + ?Sized>(
    dist: &D,
    n: usize,
    rng: &mut RngStream,
) -> Result<MomentReport> {
    if n < 1000 {
        return Err(Error::Usage(format!("moment check needs at least 1000 draws, got {n}")));
    }
    let dim = dist.dim();
    let draws: Vec<Vec<f64>> = (0..n).map(|_| dist.draw(rng)).collect();
    let nf = n as f64;
    let mut coordinates = Vec::with_capacity(dim);
    for c in 0..dim {
        let exact = dist.exact(c);
        let mean = draws.iter().map(|d| d[c]).sum::<f64>() / nf;
        let (m2, m4) = draws.iter().fold((0.0, 0.0), |(m2, m4), d| {
            let r2 = (d[c] - mean).powi(2);
            (m2 + r2, m4 + r2 * r2)
        });
        let var = m2 / (nf - 1.0);
        let m4 = m4 / nf;

        let mean_check = match (exact.mean, exact.variance) {
            (None, _) => MomentCheck::Skipped { reason: "mean undefined" },
            (Some(_), None) => MomentCheck::Skipped { reason: "mean z-score needs a finite variance" },
            (Some(mu), Some(v)) => MomentCheck::Tested {
                empirical: mean,
                exact: mu,
                z: if v > 0.0 { (mean - mu) / (v / nf).sqrt() } else { z_degenerate(mean - mu) },
            },
        };
        let variance_check = match exact.variance {
            None => MomentCheck::Skipped { reason: "variance undefined" },
            Some(_) if !exact.finite_fourth_moment => MomentCheck::Skipped {
                reason: "variance z-score needs a finite fourth moment",
            },
            Some(v) => {
                let se = ((m4 - var * var).max(0.0) / nf).sqrt();
                MomentCheck::Tested {
                    empirical: var,
                    exact: v,
                    z: if se > 0.0 { (var - v) / se } else { z_degenerate(var - v) },
                }
            }
        };
        coordinates.push(CoordinateMoments {
            mean: mean_check,
            variance: variance_check,
        });
    }
    Ok(MomentReport { n, coordinates })
}

/// The fixed set of distributions checked by the `unit` command.
pub fn standard_suite() -> Vec<(&'static str, Box<dyn MomentSource + Send + Sync>)> {
    vec![
        ("gaussian(0,1)", Box::new(Gaussian::scalar(0.0, 1.0).expect("valid"))),
        ("dirichlet(2,5)", Box::new(Dirichlet::new(vec![2.0, 5.0]).expect("valid"))),
        ("multinomial(0.3,0.7)", Box::new(Multinomial::from_probabilities(vec![0.3, 0.7]).expect("valid"))),
        ("inverse_gamma(3,2)", Box::new(InverseGamma::new(3.0, 2.0).expect("valid"))),
    ]
}

/// Run [`moment_check`] on every member of [`standard_suite`]; member `i` draws from `rng.derive(i)`.
pub fn check_standard_suite(n: usize, rng: &RngStream) -> Result<Vec<(&'static str, MomentReport)>> {
    standard_suite()
        .into_iter()
        .enumerate()
        .map(|(i, (name, dist))| Ok((name, moment_check(dist.as_ref(), n, &mut rng.derive(i as u64))?)))
        .collect()
}

fn z_degenerate(diff: f64) -> f64 {
    if diff.abs() < 1e-12 {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    }
}

impl MomentSource for Gaussian {
    fn dim(&self) -> usize {
        self.len()
    }

    fn exact(&self, coord: usize) -> ExactMoments {
        ExactMoments {
            mean: Some(self.mean(coord)),
            variance: Some(self.var(coord)),
            finite_fourth_moment: true,
        }
    }

    fn draw(&self, rng: &mut RngStream) -> Vec<f64> {
        self.sample(rng)
    }
}

impl MomentSource for Dirichlet {
    fn dim(&self) -> usize {
        self.k()
    }

    fn exact(&self, coord: usize) -> ExactMoments {
        let total: f64 = self.alpha().iter().sum();
        let p = self.alpha()[coord] / total;
        ExactMoments {
            mean: Some(p),
            variance: Some(p * (1.0 - p) / (total + 1.0)),
            finite_fourth_moment: true,
        }
    }

    fn draw(&self, rng: &mut RngStream) -> Vec<f64> {
        self.sample(rng)
    }
}

/// Coordinates are the one-hot indicators of a single-row multinomial draw.
impl MomentSource for Multinomial {
    fn dim(&self) -> usize {
        self.k()
    }

    fn exact(&self, coord: usize) -> ExactMoments {
        let p = self.probs(0)[coord];
        ExactMoments {
            mean: Some(p),
            variance: Some(p * (1.0 - p)),
            finite_fourth_moment: true,
        }
    }

    fn draw(&self, rng: &mut RngStream) -> Vec<f64> {
        let c = self.sample_n(1, rng).expect("single draw")[0];
        let mut v = vec![0.0; self.k()];
        v[c] = 1.0;
        v
    }
}

impl MomentSource for InverseGamma {
    fn dim(&self) -> usize {
        1
    }

    fn exact(&self, _coord: usize) -> ExactMoments {
        ExactMoments {
            mean: self.mean(),
            variance: self.variance(),
            finite_fourth_moment: self.shape() > 4.0,
        }
    }

    fn draw(&self, rng: &mut RngStream) -> Vec<f64> {
        vec![self.sample(rng)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Shifted(Gaussian);

    impl MomentSource for Shifted {
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn exact(&self, c: usize) -> ExactMoments {
            self.0.exact(c)
        }
        fn draw(&self, rng: &mut RngStream) -> Vec<f64> {
            self.0.sample(rng).into_iter().map(|x| x + 1.0).collect()
        }
    }

    #[test]
    fn standard_normal_passes() {
        let g = Gaussian::scalar(0.0, 1.0).unwrap();
        let r = moment_check(&g, 100_000, &mut RngStream::new(1)).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn shifted_sampler_fails_on_mean() {
        let s = Shifted(Gaussian::scalar(0.0, 1.0).unwrap());
        let r = moment_check(&s, 100_000, &mut RngStream::new(1)).unwrap();
        assert!(!r.passed());
        assert!(!r.coordinates[0].mean.passed());
        assert!(r.coordinates[0].mean.z().unwrap() > 100.0);
    }

    #[test]
    fn heavy_tailed_inverse_gamma_skips_variance() {
        let ig = InverseGamma::new(1.5, 1.0).unwrap();
        let r = moment_check(&ig, 10_000, &mut RngStream::new(2)).unwrap();
        assert!(matches!(r.coordinates[0].variance, MomentCheck::Skipped { .. }));
        assert!(r.passed());
    }

    #[test]
    fn too_few_draws_is_a_usage_error() {
        let g = Gaussian::scalar(0.0, 1.0).unwrap();
        assert!(matches!(moment_check(&g, 999, &mut RngStream::new(0)), Err(Error::Usage(_))));
    }
}
