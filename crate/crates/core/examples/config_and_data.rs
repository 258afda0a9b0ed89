//! Load hyperparameters from a config file and run the consistency checks
//! against a CSV dataset's shape.
//!
//! ```bash
//! cargo run --release --example config_and_data
//! ```

use std::fs;

use mcmc_check::consistency::check_all;
use mcmc_check::io::{load_dataset, ConfigFile};
use mcmc_check::{MixtureModel, Model, RngStream};

fn main() -> mcmc_check::Result<()> {
    let dir = std::env::temp_dir().join("mcmc-check-config-example");
    fs::create_dir_all(&dir)?;
    let config_path = dir.join("model.toml");
    fs::write(&config_path, "alpha = 0.5\nK = 2\na_n = 4\nb_n = 4\ntrials = 50\n")?;
    let data_path = dir.join("data.csv");
    fs::write(&data_path, "x,y\n0.1,0.2\n-1.5,0.3\n2.2,-0.7\n0.9,1.1\n")?;

    let file = ConfigFile::load(&config_path)?;
    let spec = file.model_spec()?;
    let data = load_dataset(&data_path)?;
    println!("spec: alpha {}, K {}, noise prior IG({}, {})", spec.alpha, spec.k, spec.sigma_sq_n_prior.shape(), spec.sigma_sq_n_prior.scale());
    println!("data: {} x {}", data.n(), data.d());

    let model = MixtureModel::new(spec);
    let mut consistency = file.consistency_config();
    consistency.n = data.n();
    consistency.d = data.d();
    let report = check_all(&model, &consistency, &RngStream::new(5))?;
    println!("consistency at this shape: {}", if report.passed() { "pass" } else { "FAIL" });

    let (state, _) = model.forward_sample(data.n(), data.d(), &mut RngStream::new(6))?;
    println!("log p(state, data) for a prior draw: {:.3}", model.joint_log_p(&state, &data)?);
    Ok(())
}
