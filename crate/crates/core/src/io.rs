//! Config files, dataset loading and report writers.
//!
//! The config format is flat `key = value` text (a subset of TOML):
//!
//! ```text
//! alpha = 1.0
//! K = 3
//! a_mu = 10.0
//! b_mu = 5.0
//! a_n = 10.0
//! b_n = 20.0
//! N = 20
//! D = 2
//! num_samples = 10000
//! pass_threshold = 0.030095
//! ```
//!
//! Every key is optional; missing keys keep their defaults.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::consistency::{ConsistencyConfig, ConsistencyReport};
use crate::distributions::{InverseGamma, MomentCheck, MomentReport};
use crate::error::{Error, Result};
use crate::geweke::{Calibration, GewekeConfig, GewekeReport, StatisticReport};
use crate::matrix::Matrix;
use crate::model::{Dataset, ModelSpec, Statistic};
use crate::mutants::KillMatrix;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub alpha: Option<f64>,
    #[serde(rename = "K", alias = "k")]
    pub k: Option<usize>,
    pub a_mu: Option<f64>,
    pub b_mu: Option<f64>,
    pub a_n: Option<f64>,
    pub b_n: Option<f64>,
    #[serde(rename = "N", alias = "n")]
    pub n: Option<usize>,
    #[serde(rename = "D", alias = "d")]
    pub d: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub tol: Option<f64>,
    pub num_samples: Option<usize>,
    pub thin: Option<usize>,
    pub statistics: Option<Vec<String>>,
    pub pass_threshold: Option<f64>,
    pub fail_threshold: Option<f64>,
    pub min_ess: Option<f64>,
    /// Samples per procedure the thresholds were calibrated at.
    pub threshold_samples: Option<usize>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// The default spec with any configured hyperparameters replaced.
    pub fn model_spec(&self) -> Result<ModelSpec> {
        let base = ModelSpec::default();
        let ig = |a: Option<f64>, b: Option<f64>, prior: InverseGamma| {
            InverseGamma::new(a.unwrap_or(prior.shape()), b.unwrap_or(prior.scale()))
        };
        ModelSpec::new(
            self.alpha.unwrap_or(base.alpha),
            self.k.unwrap_or(base.k),
            ig(self.a_mu, self.b_mu, base.sigma_sq_mu_prior)?,
            ig(self.a_n, self.b_n, base.sigma_sq_n_prior)?,
        )
        .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn consistency_config(&self) -> ConsistencyConfig {
        let base = ConsistencyConfig::default();
        ConsistencyConfig {
            trials: self.trials.unwrap_or(base.trials),
            tol: self.tol.unwrap_or(base.tol),
            n: self.n.unwrap_or(base.n),
            d: self.d.unwrap_or(base.d),
        }
    }

    pub fn geweke_config(&self) -> Result<GewekeConfig> {
        let mut c = GewekeConfig::default();
        c.num_samples = self.num_samples.unwrap_or(c.num_samples);
        c.thin = self.thin.unwrap_or(c.thin);
        c.n = self.n.unwrap_or(c.n);
        c.d = self.d.unwrap_or(c.d);
        if let Some(names) = &self.statistics {
            c.statistics = names
                .iter()
                .map(|s| s.parse::<Statistic>().map_err(|e| Error::Config(e.to_string())))
                .collect::<Result<_>>()?;
        }
        if let Some(p) = self.pass_threshold {
            c.thresholds.pass = p;
            // keep the calibrated ratio unless the fail threshold is given too
            if self.fail_threshold.is_none() {
                c.thresholds.fail = 3.0 * p;
            }
        }
        c.thresholds.fail = self.fail_threshold.unwrap_or(c.thresholds.fail);
        c.thresholds.min_ess = self.min_ess.unwrap_or(c.thresholds.min_ess);
        c.thresholds.samples = self.threshold_samples.unwrap_or(c.thresholds.samples);
        Ok(c)
    }
}

/// Load an N × D dataset from CSV. A first row that does not parse as numbers
/// is treated as a header.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if line == 0 => continue,
            Err(e) => {
                return Err(Error::Config(format!("{}: line {}: {e}", path.display(), line + 1)));
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Config(format!("{}: no data rows", path.display())));
    }
    Dataset::new(Matrix::from_rows(&rows)?)
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    Ok(csv::Writer::from_path(path)?)
}

/// One row per trial: block, seed, delta1, delta2, abs_diff.
pub fn write_consistency_csv(path: &Path, report: &ConsistencyReport) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["block", "seed", "delta1", "delta2", "abs_diff"])?;
    for block in &report.blocks {
        for t in &block.trials {
            w.write_record([
                t.block.name().to_string(),
                t.seed.to_string(),
                t.log_ratio_conditional.to_string(),
                t.log_ratio_joint.to_string(),
                t.abs_diff.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row per (distribution, coordinate, moment).
pub fn write_moments_csv(path: &Path, reports: &[(&str, MomentReport)]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["distribution", "coordinate", "moment", "empirical", "exact", "z", "status"])?;
    for (name, report) in reports {
        for (c, coord) in report.coordinates.iter().enumerate() {
            for (moment, check) in [("mean", &coord.mean), ("variance", &coord.variance)] {
                let row = match check {
                    MomentCheck::Tested { empirical, exact, z } => [
                        empirical.to_string(),
                        exact.to_string(),
                        z.to_string(),
                        if check.passed() { "pass" } else { "fail" }.to_string(),
                    ],
                    MomentCheck::Skipped { reason } => {
                        [String::new(), String::new(), String::new(), format!("skipped: {reason}")]
                    }
                };
                let mut record = vec![name.to_string(), c.to_string(), moment.to_string()];
                record.extend(row);
                w.write_record(&record)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Forward then chain samples of one statistic: procedure, index, value.
pub fn write_geweke_csv(path: &Path, report: &StatisticReport) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["procedure", "index", "value"])?;
    for (procedure, values) in [("forward", &report.forward), ("chain", &report.chain)] {
        for (i, v) in values.iter().enumerate() {
            w.write_record([procedure.to_string(), i.to_string(), v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_pp_csv(path: &Path, report: &StatisticReport) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["u", "v"])?;
    for (u, v) in &report.pp_points {
        w.write_record([u.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// A standalone SVG P-P plot: the diagonal plus the empirical path.
pub fn pp_svg(report: &StatisticReport) -> String {
    const SIZE: f64 = 400.0;
    const PAD: f64 = 40.0;
    let px = |u: f64| PAD + u * SIZE;
    let py = |v: f64| PAD + (1.0 - v) * SIZE;
    let mut path = String::new();
    for (i, (u, v)) in report.pp_points.iter().enumerate() {
        let _ = write!(path, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, px(*u), py(*v));
    }
    let full = SIZE + 2.0 * PAD;
    format!(
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{full}" height="{full}" viewBox="0 0 {full} {full}">
<rect x="{PAD}" y="{PAD}" width="{SIZE}" height="{SIZE}" fill="white" stroke="black"/>
<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="#999" stroke-dasharray="4 4"/>
<path d="{path}" fill="none" stroke="#1f5fbf" stroke-width="1.5"/>
<text x="{PAD}" y="{title_y}" font-family="sans-serif" font-size="14">{name}: KS = {ks:.4}, {verdict}</text>
<text x="{label_x}" y="{label_y}" font-family="sans-serif" font-size="12" text-anchor="middle">forward CDF</text>
<text x="12" y="{label_x}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 12 {label_x})">chain CDF</text>
</svg>
"##,
        x0 = px(0.0),
        y0 = py(0.0),
        x1 = px(1.0),
        y1 = py(1.0),
        title_y = PAD - 12.0,
        name = report.statistic,
        ks = report.ks,
        verdict = report.verdict,
        label_x = PAD + SIZE / 2.0,
        label_y = full - 10.0,
    )
}

/// Write `geweke_<stat>.csv`, `pp_<stat>.csv` and optionally `pp_<stat>.svg`
/// for every statistic; returns the paths written.
pub fn write_geweke_outputs(dir: &Path, report: &GewekeReport, svg: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for s in &report.statistics {
        let samples = dir.join(format!("geweke_{}.csv", s.statistic));
        write_geweke_csv(&samples, s)?;
        let pp = dir.join(format!("pp_{}.csv", s.statistic));
        write_pp_csv(&pp, s)?;
        written.extend([samples, pp]);
        if svg {
            let plot = dir.join(format!("pp_{}.svg", s.statistic));
            fs::write(&plot, pp_svg(s))?;
            written.push(plot);
        }
    }
    Ok(written)
}

pub fn write_kill_matrix_csv(path: &Path, matrix: &KillMatrix) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["mutant", "detector", "detected", "evidence"])?;
    for e in &matrix.entries {
        w.write_record([
            e.mutant.to_string(),
            e.detector.to_string(),
            e.detected.to_string(),
            e.evidence.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Calibrated thresholds in config-file form, with the run that produced them
/// recorded as comments.
pub fn calibration_config(calibration: &Calibration, config: &GewekeConfig, spec: &ModelSpec, seed: u64) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# null calibration: {} replicate(s), seed {seed}",
        calibration.null_max_ks.len()
    );
    let _ = writeln!(
        out,
        "# alpha={} K={} a_mu={} b_mu={} a_n={} b_n={} N={} D={} num_samples={} thin={}",
        spec.alpha,
        spec.k,
        spec.sigma_sq_mu_prior.shape(),
        spec.sigma_sq_mu_prior.scale(),
        spec.sigma_sq_n_prior.shape(),
        spec.sigma_sq_n_prior.scale(),
        config.n,
        config.d,
        config.num_samples,
        config.thin
    );
    let _ = writeln!(out, "# pass = 95th percentile of the per-run worst KS, fail = 3 x pass");
    if calibration.insufficient {
        let _ = writeln!(out, "# WARNING: too few replicates for a meaningful percentile");
    }
    let _ = writeln!(out, "pass_threshold = {}", calibration.pass_threshold);
    let _ = writeln!(out, "fail_threshold = {}", calibration.fail_threshold);
    let _ = writeln!(out, "min_ess = {}", config.thresholds.min_ess);
    let _ = writeln!(out, "threshold_samples = {}", config.num_samples);
    out
}
