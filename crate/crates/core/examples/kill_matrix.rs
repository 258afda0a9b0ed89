//! Run both test suites against every registered mutant.
//!
//! ```bash
//! cargo run --release --example kill_matrix
//! ```

use mcmc_check::mutants::{kill_matrix, KillConfig, MutantId};
use mcmc_check::{ModelSpec, RngStream};

fn main() -> mcmc_check::Result<()> {
    let matrix = kill_matrix(ModelSpec::default(), &MutantId::ALL, &KillConfig::default(), &RngStream::new(0))?;
    for id in matrix.mutants() {
        println!("{id:<4} {}", id.description());
        let found = matrix.detectors_for(id);
        if found.is_empty() {
            println!("     not detected");
        }
        for e in matrix.entries.iter().filter(|e| e.mutant == id && e.detected) {
            println!("     caught by {:<24} evidence {:.3e}", e.detector.to_string(), e.evidence);
        }
    }
    println!("every mutant killed, identity untouched: {}", matrix.all_killed());
    Ok(())
}
