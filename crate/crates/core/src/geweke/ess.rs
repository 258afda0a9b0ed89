//! Autocorrelation and effective sample size of a chain trace.

/// Sample autocorrelation at `lag` (biased, normalized by the lag-0 sum).
pub fn autocorrelation(xs: &[f64], lag: usize) -> f64 {
    let n = xs.len();
    if lag >= n {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let c0: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    if c0 == 0.0 || !c0.is_finite() {
        return 0.0;
    }
    let ck: f64 = xs[..n - lag]
        .iter()
        .zip(&xs[lag..])
        .map(|(a, b)| (a - mean) * (b - mean))
        .sum();
    ck / c0
}

/// Effective sample size from Geyer's initial positive sequence.
///
/// Adjacent autocorrelation pairs `ρ(2k) + ρ(2k+1)` are summed while they stay
/// positive; ESS = n / (-1 + 2 Σ pairs). A constant trace has ESS 0 and an
/// anticorrelated trace is capped at n·log10(n), following common practice.
pub fn effective_sample_size(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 4 {
        return n as f64;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = xs.iter().map(|x| x - mean).collect();
    let c0: f64 = centered.iter().map(|x| x * x).sum();
    if c0 == 0.0 || !c0.is_finite() {
        return 0.0;
    }
    let rho = |lag: usize| -> f64 {
        centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / c0
    };
    let mut tau = -1.0;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = rho(lag) + rho(lag + 1);
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        lag += 2;
    }
    let nf = n as f64;
    let cap = nf * nf.log10();
    if tau <= 0.0 {
        return cap;
    }
    (nf / tau).min(cap)
}
