//! The `mcmc-check` command line.
//!
//! Exit codes: 0 pass, 1 fail, 2 usage or config error, 3 unclear.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::consistency::{check_all, ConsistencyConfig};
use crate::distributions::check_standard_suite;
use crate::error::{Error, Result};
use crate::geweke::{calibrate, geweke_run, GewekeConfig, GrowthEvidence, Verdict};
use crate::io::{
    calibration_config, write_consistency_csv, write_geweke_outputs, write_kill_matrix_csv, write_moments_csv,
    ConfigFile,
};
use crate::model::{ModelSpec, Statistic};
use crate::mutants::{apply_mutant, kill_matrix, KillConfig, MutantId};
use crate::rng::RngStream;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_OUT: &str = "mcmc-check-out";
/// Draws per distribution in the moment suite.
pub const MOMENT_DRAWS: usize = 100_000;
pub const DEFAULT_REPLICATES: usize = 50;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNCLEAR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mcmc-check", version, about = "Consistency and Geweke tests for a mixture-of-Gaussians Gibbs sampler")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Unit,
    Geweke,
    Mutants,
    Calibrate,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Conditional/joint consistency checks for every Gibbs block, plus sampler moment checks.
    Unit(RunArgs),
    /// Forward samples versus the successive-conditional chain.
    Geweke(RunArgs),
    /// Run both suites against the mutant registry and print the kill matrix.
    Mutants(RunArgs),
    /// Null Geweke runs of the reference model to derive KS thresholds.
    Calibrate(RunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Flat key = value config file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Consistency trials per block.
    #[arg(long, value_name = "N")]
    pub trials: Option<usize>,
    /// Consistency tolerance on |Δ₁ − Δ₂|.
    #[arg(long, value_name = "R")]
    pub tol: Option<f64>,
    /// Geweke samples per procedure.
    #[arg(long, value_name = "N")]
    pub num_samples: Option<usize>,
    #[arg(long, value_name = "N")]
    pub data_n: Option<usize>,
    #[arg(long, value_name = "D")]
    pub data_d: Option<usize>,
    /// Gibbs sweeps per recorded chain sample.
    #[arg(long, value_name = "N")]
    pub thin: Option<usize>,
    /// Mutant id (none, M1..M5). For `mutants`, a comma-separated subset of the registry.
    #[arg(long, value_name = "ID", value_delimiter = ',')]
    pub mutant: Vec<String>,
    #[arg(long, value_name = "DIR", default_value = DEFAULT_OUT)]
    pub out: PathBuf,
    /// Also write an SVG P-P plot per statistic.
    #[arg(long)]
    pub svg: bool,
    /// Bound on worker threads (default: all cores).
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
    /// Null replicates for `calibrate`.
    #[arg(long, value_name = "N", default_value_t = DEFAULT_REPLICATES)]
    pub replicates: usize,
}

/// Everything a command needs, resolved from flags, config file and defaults.
#[derive(Debug, Clone)]
pub struct RunPlan {
    pub command: CommandKind,
    pub spec: ModelSpec,
    pub consistency: ConsistencyConfig,
    pub geweke: GewekeConfig,
    pub seed: u64,
    pub mutants: Vec<MutantId>,
    pub out: PathBuf,
    pub svg: bool,
    pub jobs: Option<usize>,
    pub replicates: usize,
}

impl RunPlan {
    pub fn resolve(command: CommandKind, args: &RunArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let spec = file.model_spec()?;
        let mut consistency = file.consistency_config();
        let mut geweke = file.geweke_config()?;
        if let Some(t) = args.trials {
            consistency.trials = t;
        }
        if let Some(t) = args.tol {
            consistency.tol = t;
        }
        if let Some(n) = args.data_n {
            consistency.n = n;
            geweke.n = n;
        }
        if let Some(d) = args.data_d {
            consistency.d = d;
            geweke.d = d;
        }
        if let Some(n) = args.num_samples {
            geweke.num_samples = n;
        }
        if let Some(t) = args.thin {
            geweke.thin = t;
        }
        let mutants = args
            .mutant
            .iter()
            .map(|m| m.trim().parse::<MutantId>())
            .collect::<Result<Vec<_>>>()?;
        match command {
            CommandKind::Unit | CommandKind::Geweke if mutants.len() > 1 => {
                return Err(Error::Usage("only one --mutant may be given for this command".into()));
            }
            CommandKind::Calibrate if !mutants.is_empty() => {
                return Err(Error::Usage("calibrate always uses the reference model".into()));
            }
            _ => {}
        }
        if args.jobs == Some(0) {
            return Err(Error::Usage("--jobs must be at least 1".into()));
        }
        match command {
            CommandKind::Unit => {
                consistency.validate()?;
                geweke.thresholds.validate()?;
            }
            CommandKind::Geweke | CommandKind::Calibrate => geweke.validate()?,
            CommandKind::Mutants => {
                consistency.validate()?;
                geweke.validate()?;
            }
        }
        if command == CommandKind::Calibrate && args.replicates == 0 {
            return Err(Error::Usage("--replicates must be at least 1".into()));
        }
        Ok(Self {
            command,
            spec,
            consistency,
            geweke,
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            mutants,
            out: args.out.clone(),
            svg: args.svg,
            jobs: args.jobs,
            replicates: args.replicates,
        })
    }

    fn mutant(&self) -> MutantId {
        self.mutants.first().copied().unwrap_or(MutantId::Identity)
    }

    fn rng(&self) -> RngStream {
        RngStream::new(self.seed)
    }

    fn out_dir(&self) -> Result<&PathBuf> {
        fs::create_dir_all(&self.out)
            .map_err(|e| Error::Usage(format!("cannot create output directory {}: {e}", self.out.display())))?;
        Ok(&self.out)
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let (kind, args) = match &cli.command {
        Command::Unit(a) => (CommandKind::Unit, a),
        Command::Geweke(a) => (CommandKind::Geweke, a),
        Command::Mutants(a) => (CommandKind::Mutants, a),
        Command::Calibrate(a) => (CommandKind::Calibrate, a),
    };
    let result = RunPlan::resolve(kind, args).and_then(|plan| execute(&plan, out, err));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Run a resolved plan, honoring `jobs`.
///
/// Command output is buffered and copied to `out`/`err` once the run has
/// joined, so worker threads never touch the streams.
pub fn execute(plan: &RunPlan, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let body = || {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = match plan.command {
            CommandKind::Unit => cmd_unit(plan, &mut o),
            CommandKind::Geweke => cmd_geweke(plan, &mut o),
            CommandKind::Mutants => cmd_mutants(plan, &mut o),
            CommandKind::Calibrate => cmd_calibrate(plan, &mut o, &mut e),
        };
        (code, o, e)
    };
    let (code, o, e) = match plan.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Usage(e.to_string()))?
            .install(body),
        None => body(),
    };
    out.write_all(&o)?;
    err.write_all(&e)?;
    code
}

pub fn cmd_unit(plan: &RunPlan, out: &mut dyn Write) -> Result<i32> {
    let dir = plan.out_dir()?;
    let model = apply_mutant(plan.spec, plan.mutant());
    let rng = plan.rng();
    let report = check_all(&model, &plan.consistency, &rng.derive(0))?;
    let moments = check_standard_suite(MOMENT_DRAWS, &rng.derive(1))?;
    write_consistency_csv(&dir.join("consistency.csv"), &report)?;
    write_moments_csv(&dir.join("moments.csv"), &moments)?;

    let mut failures = Vec::new();
    for b in &report.blocks {
        let status = if b.passed() { "ok" } else { "FAIL" };
        writeln!(
            out,
            "consistency {:<12} {status:<4}  max |d1 - d2| = {:.3e} over {} trials",
            b.block.name(),
            b.max_abs_diff(),
            b.trials.len()
        )?;
        if !b.passed() {
            if let Some(w) = b.worst() {
                writeln!(out, "    worst trial: seed {} delta1 {} delta2 {}", w.seed, w.log_ratio_conditional, w.log_ratio_joint)?;
                if let Some(e) = &w.error {
                    writeln!(out, "    error: {e}")?;
                }
            }
            failures.push(b.block.name().to_string());
        }
    }
    for (name, m) in &moments {
        let status = if m.passed() { "ok" } else { "FAIL" };
        writeln!(out, "moments     {name:<21} {status:<4}  max |z| = {:.2}", m.max_abs_z())?;
        if !m.passed() {
            failures.push(format!("moments {name}"));
        }
    }
    let total = report.blocks.len() + moments.len();
    if failures.is_empty() {
        writeln!(out, "Ran {total} tests: OK")?;
        Ok(EXIT_PASS)
    } else {
        writeln!(out, "Ran {total} tests: FAILED (failures={}): {}", failures.len(), failures.join(", "))?;
        Ok(EXIT_FAIL)
    }
}

pub fn cmd_geweke(plan: &RunPlan, out: &mut dyn Write) -> Result<i32> {
    let dir = plan.out_dir()?;
    let model = apply_mutant(plan.spec, plan.mutant());
    let report = geweke_run(&model, &plan.geweke, &plan.rng())?;
    write_geweke_outputs(dir, &report, plan.svg)?;

    let t = plan.geweke.thresholds.scaled_to(plan.geweke.num_samples);
    writeln!(
        out,
        "thresholds at {} samples: pass < {:.6} (with ESS >= {}), fail > {:.6}",
        t.samples, t.pass, t.min_ess, t.fail
    )?;
    for s in &report.statistics {
        writeln!(out, "{:<14} ks {:.4}  ess {:>8.1}  {}", s.statistic.name(), s.ks, s.ess, s.verdict)?;
    }
    if let Some(d) = &report.divergence {
        writeln!(out, "chain diverged at record {}: {}", d.index, d.message)?;
    }
    if report.overall == Verdict::Fail {
        if let Some(ev) = report.statistic(Statistic::SigmaSqN).and_then(GrowthEvidence::of) {
            if let Some(d) = ev.drift {
                writeln!(
                    out,
                    "sigma_sq_n log-drift over {} records: slope {:.3e} ({:.1} standard errors)",
                    d.points,
                    d.slope,
                    d.t_statistic()
                )?;
            }
            writeln!(
                out,
                "sigma_sq_n chain tail median {:.4e} vs forward 99th percentile {:.4e}",
                ev.tail_median, ev.forward_p99
            )?;
        }
    }
    writeln!(out, "overall: {}", report.overall)?;
    Ok(report.overall.exit_code())
}

pub fn cmd_mutants(plan: &RunPlan, out: &mut dyn Write) -> Result<i32> {
    let dir = plan.out_dir()?;
    let ids = if plan.mutants.is_empty() {
        MutantId::ALL.to_vec()
    } else {
        plan.mutants.clone()
    };
    let config = KillConfig {
        consistency: plan.consistency,
        geweke: plan.geweke.clone(),
    };
    let matrix = kill_matrix(plan.spec, &ids, &config, &plan.rng())?;
    write_kill_matrix_csv(&dir.join("kill_matrix.csv"), &matrix)?;
    for id in &ids {
        let found = matrix.detectors_for(*id);
        let list = if found.is_empty() {
            "not detected".to_string()
        } else {
            found.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ")
        };
        writeln!(out, "{:<5} {list}", id.name())?;
    }
    if matrix.all_killed() {
        writeln!(out, "kill matrix: OK")?;
        Ok(EXIT_PASS)
    } else {
        writeln!(out, "kill matrix: FAILED")?;
        Ok(EXIT_FAIL)
    }
}

pub fn cmd_calibrate(plan: &RunPlan, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let dir = plan.out_dir()?;
    let model = apply_mutant(plan.spec, MutantId::Identity);
    let calibration = calibrate(&model, &plan.geweke, plan.replicates, &plan.rng())?;
    if calibration.insufficient {
        writeln!(err, "warning: {} replicate(s) is too few for a 95th percentile", plan.replicates)?;
    }
    let text = calibration_config(&calibration, &plan.geweke, &plan.spec, plan.seed);
    fs::write(dir.join("calibration.toml"), &text)?;
    write!(out, "{text}")?;
    Ok(EXIT_PASS)
}
