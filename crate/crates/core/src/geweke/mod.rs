//! Geweke joint-distribution test.
//!
//! Two procedures both produce samples of (θ, X) from the joint p(θ, X) when
//! the sampler is correct:
//!
//! * forward: θ ~ p(θ), then X ~ p(X | θ), independently for every sample;
//! * chain: start from one forward sample, then alternate a Gibbs sweep with
//!   resampling X ~ p(X | θ), recording after every step.
//!
//! Scalar statistics of the two sample sets are compared through P-P points and
//! the two-sample KS distance, and each statistic gets a pass / fail / unclear
//! verdict. A faulty transition operator drifts the chain away from the joint;
//! small biases compound over steps, so even tiny coefficient errors show up.

mod ecdf;
mod ess;

pub use ecdf::{ks_distance, pp_points};
pub use ess::{autocorrelation, effective_sample_size};

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{Dataset, Model, Statistic};
use crate::rng::RngStream;

/// Null-calibrated default thresholds (see [`calibrate`]; regenerate with the
/// `calibrate` command). 95th percentile of the per-run worst KS over 50 null
/// runs of the reference model at the default configuration, seed 0.
pub const DEFAULT_PASS_THRESHOLD: f64 = 0.030095;
/// Three times the pass threshold.
pub const DEFAULT_FAIL_THRESHOLD: f64 = 0.090285;
pub const DEFAULT_MIN_ESS: f64 = 500.0;
/// Samples per procedure in the calibration runs behind the defaults.
pub const DEFAULT_THRESHOLD_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// KS below this (with enough ESS) passes.
    pub pass: f64,
    /// KS above this fails outright.
    pub fail: f64,
    pub min_ess: f64,
    /// Samples per procedure the KS thresholds were calibrated at.
    pub samples: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            pass: DEFAULT_PASS_THRESHOLD,
            fail: DEFAULT_FAIL_THRESHOLD,
            min_ess: DEFAULT_MIN_ESS,
            samples: DEFAULT_THRESHOLD_SAMPLES,
        }
    }
}

impl Thresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.pass > 0.0 && self.pass <= self.fail && self.min_ess >= 0.0 && self.samples > 0) {
            return Err(Error::Usage(format!("inconsistent thresholds {self:?}")));
        }
        Ok(())
    }

    /// The KS thresholds moved to `num_samples` per procedure. Null KS
    /// distances shrink like 1/√n, so both scale by √(samples / num_samples).
    pub fn scaled_to(&self, num_samples: usize) -> Thresholds {
        let f = (self.samples as f64 / num_samples as f64).sqrt();
        Thresholds {
            pass: self.pass * f,
            fail: self.fail * f,
            samples: num_samples,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GewekeConfig {
    /// Samples per procedure.
    pub num_samples: usize,
    /// Dataset size N.
    pub n: usize,
    /// Dimensions D.
    pub d: usize,
    /// Gibbs sweeps per recorded chain sample.
    pub thin: usize,
    pub statistics: Vec<Statistic>,
    pub thresholds: Thresholds,
}

impl Default for GewekeConfig {
    fn default() -> Self {
        Self {
            num_samples: 10_000,
            n: 20,
            d: 2,
            thin: 1,
            statistics: Statistic::ALL.to_vec(),
            thresholds: Thresholds::default(),
        }
    }
}

impl GewekeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_samples < 100 {
            return Err(Error::Usage(format!("num_samples must be at least 100, got {}", self.num_samples)));
        }
        if self.thin == 0 {
            return Err(Error::Usage("thin must be at least 1".into()));
        }
        if self.n == 0 || self.d == 0 {
            return Err(Error::Usage("data size must be at least 1x1".into()));
        }
        if self.statistics.is_empty() {
            return Err(Error::Usage("no statistics selected".into()));
        }
        self.thresholds.validate()
    }
}

/// Ordered so that the worst verdict is the maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    Pass,
    Unclear,
    Fail,
}

impl Verdict {
    /// 0 pass, 1 fail, 3 unclear.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Unclear => 3,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Verdict::Pass => "pass",
            Verdict::Unclear => "unclear",
            Verdict::Fail => "fail",
        })
    }
}

/// Fail on a gross mismatch; pass only with a small distance backed by enough
/// effective samples; anything in between asks for a longer run.
pub fn classify(ks: f64, ess: f64, thresholds: &Thresholds) -> Verdict {
    if !(ks <= thresholds.fail) {
        Verdict::Fail
    } else if ks < thresholds.pass && ess >= thresholds.min_ess {
        Verdict::Pass
    } else {
        Verdict::Unclear
    }
}

/// Per-statistic sample vectors, in the order of `GewekeConfig::statistics`.
pub type Samples = Vec<Vec<f64>>;

/// Independent forward samples, one derived stream per sample.
pub fn run_forward<M: Model + ?Sized>(model: &M, config: &GewekeConfig, rng: &mut RngStream) -> Result<Samples> {
    config.validate()?;
    let base = RngStream::new(rand::RngCore::next_u64(rng));
    let rows: Vec<Vec<f64>> = (0..config.num_samples)
        .into_par_iter()
        .map(|i| {
            let mut r = base.derive(i as u64);
            let (state, data) = model.forward_sample(config.n, config.d, &mut r)?;
            Ok(config.statistics.iter().map(|s| s.evaluate(&state, &data)).collect())
        })
        .collect::<Result<_>>()?;
    Ok(transpose(&rows, config.statistics.len()))
}

fn transpose(rows: &[Vec<f64>], width: usize) -> Samples {
    (0..width).map(|c| rows.iter().map(|r| r[c]).collect()).collect()
}

/// Why a chain stopped early.
#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    /// Index of the record that could not be completed.
    pub index: usize,
    /// The statistic that went non-finite, if that was the cause.
    pub statistic: Option<Statistic>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainRun {
    pub samples: Samples,
    pub divergence: Option<Divergence>,
}

/// Successive-conditional chain: `thin` Gibbs sweeps, then X ~ p(X | θ), then record.
///
/// Numeric blow-up ends the run early; the samples recorded so far are kept and
/// the cause is reported in `divergence`.
pub fn run_chain<M: Model + ?Sized>(model: &M, config: &GewekeConfig, rng: &mut RngStream) -> Result<ChainRun> {
    config.validate()?;
    let (mut state, mut data) = model.forward_sample(config.n, config.d, rng)?;
    let mut samples: Samples = vec![Vec::with_capacity(config.num_samples); config.statistics.len()];
    for index in 0..config.num_samples {
        let step = (|| -> Result<_> {
            let mut next = state.clone();
            for _ in 0..config.thin {
                next = model.gibbs_step(&next, &data, rng)?;
            }
            let x = model.cond_x(&next)?.sample(rng);
            let next_data = Dataset::new(Matrix::from_vec(config.n, config.d, x)?)?;
            Ok((next, next_data))
        })();
        match step {
            Ok((s, x)) => {
                state = s;
                data = x;
            }
            Err(e) => {
                return Ok(ChainRun {
                    samples,
                    divergence: Some(Divergence {
                        index,
                        statistic: None,
                        message: e.to_string(),
                    }),
                })
            }
        }
        for (stat, out) in config.statistics.iter().zip(samples.iter_mut()) {
            let v = stat.evaluate(&state, &data);
            if !v.is_finite() {
                return Ok(ChainRun {
                    samples,
                    divergence: Some(Divergence {
                        index,
                        statistic: Some(*stat),
                        message: format!("{stat} became {v}"),
                    }),
                });
            }
            out.push(v);
        }
    }
    Ok(ChainRun { samples, divergence: None })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatisticReport {
    pub statistic: Statistic,
    pub forward: Vec<f64>,
    pub chain: Vec<f64>,
    pub pp_points: Vec<(f64, f64)>,
    pub ks: f64,
    pub ess: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GewekeReport {
    pub statistics: Vec<StatisticReport>,
    pub divergence: Option<Divergence>,
    pub overall: Verdict,
}

impl GewekeReport {
    pub fn statistic(&self, s: Statistic) -> Option<&StatisticReport> {
        self.statistics.iter().find(|r| r.statistic == s)
    }

    pub fn max_ks(&self) -> f64 {
        self.statistics.iter().map(|r| r.ks).fold(0.0, f64::max)
    }

    /// Statistics with the overall (worst) verdict.
    pub fn worst_statistics(&self) -> Vec<Statistic> {
        self.statistics
            .iter()
            .filter(|r| r.verdict == self.overall)
            .map(|r| r.statistic)
            .collect()
    }
}

/// Build the report from already-collected samples.
///
/// KS distances are classified against the thresholds scaled to `num_samples`.
pub fn compare(config: &GewekeConfig, forward: Samples, chain: ChainRun) -> GewekeReport {
    let thresholds = config.thresholds.scaled_to(config.num_samples);
    let mut statistics = Vec::with_capacity(config.statistics.len());
    for ((stat, f), c) in config.statistics.iter().zip(forward).zip(chain.samples) {
        let (pp, ks, ess) = if c.is_empty() {
            (vec![], 1.0, 0.0)
        } else {
            let pp = pp_points(&f, &c);
            let ks = pp.iter().map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
            (pp, ks, effective_sample_size(&c))
        };
        let diverged = chain.divergence.as_ref().is_some_and(|d| d.statistic.is_none() || d.statistic == Some(*stat));
        let verdict = if diverged { Verdict::Fail } else { classify(ks, ess, &thresholds) };
        statistics.push(StatisticReport {
            statistic: *stat,
            forward: f,
            chain: c,
            pp_points: pp,
            ks,
            ess,
            verdict,
        });
    }
    let overall = statistics.iter().map(|r| r.verdict).max().unwrap_or(Verdict::Pass);
    GewekeReport {
        statistics,
        divergence: chain.divergence,
        overall,
    }
}

/// Forward samples from `rng.derive(0)`, the chain from `rng.derive(1)`.
pub fn geweke_run<M: Model + ?Sized>(model: &M, config: &GewekeConfig, rng: &RngStream) -> Result<GewekeReport> {
    config.validate()?;
    let forward = run_forward(model, config, &mut rng.derive(0))?;
    let chain = run_chain(model, config, &mut rng.derive(1))?;
    Ok(compare(config, forward, chain))
}

/// Least-squares line through `ln(trace)` against the record index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftFit {
    pub slope: f64,
    pub std_error: f64,
    pub points: usize,
}

impl DriftFit {
    /// Slope in units of its standard error.
    pub fn t_statistic(&self) -> f64 {
        self.slope / self.std_error
    }
}

/// Fit the log-drift over the first `max_points` entries of a positive trace.
pub fn log_drift(trace: &[f64], max_points: usize) -> Option<DriftFit> {
    let ys: Vec<f64> = trace.iter().take(max_points).map(|v| v.ln()).collect();
    let n = ys.len();
    if n < 3 || ys.iter().any(|y| !y.is_finite()) {
        return None;
    }
    let nf = n as f64;
    let x_mean = (nf - 1.0) / 2.0;
    let y_mean = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - x_mean;
        sxx += dx * dx;
        sxy += dx * (y - y_mean);
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let sse: f64 = ys
        .iter()
        .enumerate()
        .map(|(i, y)| (y - intercept - slope * i as f64).powi(2))
        .sum();
    let std_error = (sse / (nf - 2.0) / sxx).sqrt();
    Some(DriftFit { slope, std_error, points: n })
}

/// Evidence that a positive statistic grows along the chain instead of
/// staying in its forward range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthEvidence {
    /// Log-drift over the first `DRIFT_WINDOW` chain records.
    pub drift: Option<DriftFit>,
    /// Median of the last 10% of the chain.
    pub tail_median: f64,
    /// 99th percentile of the forward samples.
    pub forward_p99: f64,
}

/// Records used for the log-drift fit.
pub const DRIFT_WINDOW: usize = 2000;

impl GrowthEvidence {
    pub fn of(report: &StatisticReport) -> Option<Self> {
        if report.chain.is_empty() || report.forward.is_empty() {
            return None;
        }
        let n = report.chain.len();
        let tail = &report.chain[n - (n / 10).max(1)..];
        Some(Self {
            drift: log_drift(&report.chain, DRIFT_WINDOW),
            tail_median: percentile(tail, 0.5),
            forward_p99: percentile(&report.forward, 0.99),
        })
    }

    /// Positive drift at `min_t` standard errors and a chain tail beyond the forward range.
    pub fn explodes(&self, min_t: f64) -> bool {
        self.drift.is_some_and(|d| d.slope > 0.0 && d.t_statistic() >= min_t) && self.tail_median > self.forward_p99
    }
}

/// Null-distribution calibration of the KS thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    /// Worst KS over the configured statistics, one entry per replicate.
    pub null_max_ks: Vec<f64>,
    /// Per-statistic KS values, `[statistic][replicate]`.
    pub null_ks: Vec<Vec<f64>>,
    pub pass_threshold: f64,
    pub fail_threshold: f64,
    /// Fewer than two replicates: the percentile is not meaningful.
    pub insufficient: bool,
}

/// Linear-interpolation percentile (`q` in [0, 1]) of a non-empty sample.
pub fn percentile(xs: &[f64], q: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

/// Run `replicates` Geweke tests of `model` (assumed correct) and derive
/// thresholds: pass = 95th percentile of the per-run worst KS, fail = 3 × pass.
///
/// Replicate `r` uses `rng.derive(r)`.
pub fn calibrate<M: Model + ?Sized>(
    model: &M,
    config: &GewekeConfig,
    replicates: usize,
    rng: &RngStream,
) -> Result<Calibration> {
    config.validate()?;
    if replicates == 0 {
        return Err(Error::Usage("calibration needs at least one replicate".into()));
    }
    let runs: Vec<Vec<f64>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let report = geweke_run(model, config, &rng.derive(r as u64))?;
            Ok(report.statistics.iter().map(|s| s.ks).collect())
        })
        .collect::<Result<_>>()?;
    let null_max_ks: Vec<f64> = runs.iter().map(|ks| ks.iter().copied().fold(0.0, f64::max)).collect();
    let null_ks = transpose(&runs, config.statistics.len());
    let pass_threshold = percentile(&null_max_ks, 0.95);
    Ok(Calibration {
        null_max_ks,
        null_ks,
        pass_threshold,
        fail_threshold: 3.0 * pass_threshold,
        insufficient: replicates < 2,
    })
}
