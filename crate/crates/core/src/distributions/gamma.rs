use crate::rng::RngStream;

/// Draw from Gamma(shape, 1) with the Marsaglia-Tsang squeeze method.
///
/// Shapes below one are boosted: `G(a) = G(a + 1) * U^(1/a)`.
pub fn gamma_variate(shape: f64, rng: &mut RngStream) -> f64 {
    ln_gamma_variate(shape, rng).exp()
}

/// Log of a Gamma(shape, 1) draw.
///
/// Working in log space keeps tiny shapes from underflowing to exact zero,
/// which matters when the draws are normalized into a Dirichlet sample.
pub fn ln_gamma_variate(shape: f64, rng: &mut RngStream) -> f64 {
    debug_assert!(shape > 0.0);
    if shape < 1.0 {
        let boost = rng.open01().ln() / shape;
        return marsaglia_tsang(shape + 1.0, rng).ln() + boost;
    }
    marsaglia_tsang(shape, rng).ln()
}

fn marsaglia_tsang(shape: f64, rng: &mut RngStream) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = rng.standard_normal();
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u = rng.open01();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_var(shape: f64, n: usize, seed: u64) -> (f64, f64) {
        let mut rng = RngStream::new(seed);
        let xs: Vec<f64> = (0..n).map(|_| gamma_variate(shape, &mut rng)).collect();
        let m = xs.iter().sum::<f64>() / n as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        (m, v)
    }

    #[test]
    fn moments_match_for_large_and_small_shapes() {
        let n = 100_000;
        for &shape in &[0.3, 1.0, 2.5, 40.0] {
            let (m, v) = mean_var(shape, n, 11);
            // Gamma(a, 1): mean a, variance a
            let se = (shape / n as f64).sqrt();
            assert!((m - shape).abs() < 5.0 * se, "shape {shape}: mean {m}");
            assert!((v / shape - 1.0).abs() < 0.05, "shape {shape}: var {v}");
        }
    }

    #[test]
    fn tiny_shape_stays_finite_in_log_space() {
        let mut rng = RngStream::new(5);
        for _ in 0..1000 {
            let l = ln_gamma_variate(1e-3, &mut rng);
            assert!(l.is_finite());
        }
    }
}
