//! Empirical CDF comparisons between the forward and chain samples.

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// P-P path over the pooled sample values.
///
/// For every distinct pooled value t (ascending), emits
/// `(F_forward(t), F_chain(t))` with right-continuous empirical CDFs, preceded by
/// `(0, 0)`. The last point is always `(1, 1)`.
pub fn pp_points(forward: &[f64], chain: &[f64]) -> Vec<(f64, f64)> {
    assert!(!forward.is_empty() && !chain.is_empty(), "pp_points needs two non-empty samples");
    let (a, b) = (sorted(forward), sorted(chain));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut out = Vec::with_capacity(a.len() + b.len() + 1);
    out.push((0.0, 0.0));
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let t = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] <= t {
            i += 1;
        }
        while j < b.len() && b[j] <= t {
            j += 1;
        }
        out.push((i as f64 / na, j as f64 / nb));
    }
    out
}

/// Two-sample Kolmogorov-Smirnov statistic: the largest vertical gap between
/// the two empirical CDFs.
pub fn ks_distance(forward: &[f64], chain: &[f64]) -> f64 {
    pp_points(forward, chain)
        .into_iter()
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max)
}
