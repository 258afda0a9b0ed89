//! Fit the mixture model to synthetic data with the Gibbs sampler.
//!
//! ```bash
//! cargo run --release --example gibbs_sampler
//! ```

use mcmc_check::model::cluster_counts;
use mcmc_check::{Dataset, Matrix, MixtureModel, Model, ModelSpec, RngStream};

fn main() -> mcmc_check::Result<()> {
    let mut rng = RngStream::new(3);
    // three well separated blobs in the plane
    let centers = [(-4.0, 0.0), (0.0, 4.0), (4.0, 0.0)];
    let mut rows = Vec::new();
    for i in 0..150 {
        let (cx, cy) = centers[i % 3];
        rows.push(vec![cx + 0.5 * rng.standard_normal(), cy + 0.5 * rng.standard_normal()]);
    }
    let data = Dataset::new(Matrix::from_rows(&rows)?)?;

    let model = MixtureModel::new(ModelSpec::default());
    let (mut state, _) = model.forward_sample(data.n(), data.d(), &mut rng)?;
    for sweep in 0..=200 {
        if sweep % 50 == 0 {
            let lp = model.joint_log_p(&state, &data)?;
            println!(
                "sweep {sweep:>3}: log p = {lp:10.2}  sizes {:?}  sigma_sq_n = {:.3}",
                cluster_counts(&state.z, 3),
                state.sigma_sq_n
            );
        }
        state = model.gibbs_step(&state, &data, &mut rng)?;
    }
    for k in 0..3 {
        println!("center {k}: ({:6.2}, {:6.2})  weight {:.2}", state.mu.get(k, 0), state.mu.get(k, 1), state.pi[k]);
    }
    Ok(())
}
