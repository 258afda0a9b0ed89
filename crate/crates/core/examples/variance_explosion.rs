//! The 0.51 bug under a diffuse noise prior: invisible in a single Gibbs
//! step, but the Geweke chain compounds it until σ²_n runs away.
//!
//! ```bash
//! cargo run --release --example variance_explosion
//! ```

use mcmc_check::geweke::{geweke_run, GewekeConfig, GrowthEvidence};
use mcmc_check::mutants::{apply_mutant, MutantId};
use mcmc_check::{ModelSpec, RngStream, Statistic};

fn main() -> mcmc_check::Result<()> {
    let spec = ModelSpec::diffuse_noise();
    let config = GewekeConfig::default();
    for id in [MutantId::Identity, MutantId::M1] {
        let report = geweke_run(&apply_mutant(spec, id), &config, &RngStream::new(0))?;
        let s = report.statistic(Statistic::SigmaSqN).expect("configured");
        let ev = GrowthEvidence::of(s).expect("non-empty chain");
        println!("{id}: overall {}, sigma_sq_n ks {:.3}", report.overall, s.ks);
        if let Some(d) = ev.drift {
            println!("  log-drift {:+.2e} per step ({:+.1} standard errors)", d.slope, d.t_statistic());
        }
        println!("  chain tail median {:.3e}, forward 99th percentile {:.3e}", ev.tail_median, ev.forward_p99);
        for i in [0, 1000, 2000, 5000, s.chain.len() - 1] {
            println!("  sigma_sq_n[{i}] = {:.3e}", s.chain[i]);
        }
    }
    Ok(())
}
