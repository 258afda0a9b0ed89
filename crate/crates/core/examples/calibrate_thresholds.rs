//! Derive KS thresholds from null Geweke runs of the reference model.
//!
//! ```bash
//! cargo run --release --example calibrate_thresholds -- 50
//! ```

use mcmc_check::geweke::{calibrate, percentile, GewekeConfig};
use mcmc_check::io::calibration_config;
use mcmc_check::{MixtureModel, ModelSpec, RngStream};

fn main() -> mcmc_check::Result<()> {
    let replicates = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(20);
    let config = GewekeConfig::default();
    let cal = calibrate(&MixtureModel::default(), &config, replicates, &RngStream::new(0))?;
    for (stat, ks) in config.statistics.iter().zip(&cal.null_ks) {
        println!("{stat:<14} median ks {:.4}  95th percentile {:.4}", percentile(ks, 0.5), percentile(ks, 0.95));
    }
    print!("{}", calibration_config(&cal, &config, &ModelSpec::default(), 0));
    Ok(())
}
