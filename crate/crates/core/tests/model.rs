use std::f64::consts::PI;

use mcmc_check::distributions::InverseGamma;
use mcmc_check::geweke::ks_distance;
use mcmc_check::model::{joint_terms, STATE_SIMPLEX_TOL};
use mcmc_check::{Dataset, Matrix, MixtureModel, Model, ModelSpec, RngStream, State, Statistic};

fn spec(alpha: f64, k: usize, a_mu: f64, b_mu: f64, a_n: f64, b_n: f64) -> ModelSpec {
    ModelSpec::new(alpha, k, InverseGamma::new(a_mu, b_mu).unwrap(), InverseGamma::new(a_n, b_n).unwrap()).unwrap()
}

fn state(z: Vec<usize>, mu: Vec<Vec<f64>>, sigma_sq_mu: f64, sigma_sq_n: f64, pi: Vec<f64>) -> State {
    State::new(z, Matrix::from_rows(&mu).unwrap(), sigma_sq_mu, sigma_sq_n, pi).unwrap()
}

fn data(rows: Vec<Vec<f64>>) -> Dataset {
    Dataset::new(Matrix::from_rows(&rows).unwrap()).unwrap()
}

fn uniform(k: usize) -> Vec<f64> {
    vec![1.0 / k as f64; k]
}

#[test]
fn cond_pi_adds_counts_to_alpha() {
    let m = MixtureModel::new(spec(1.0, 3, 1.0, 1.0, 1.0, 1.0));
    let s = state(vec![0, 0, 2], vec![vec![0.0]; 3], 1.0, 1.0, uniform(3));
    assert_eq!(m.cond_pi(&s).unwrap().alpha(), &[3.0, 1.0, 2.0]);

    let m = MixtureModel::new(spec(2.0, 2, 1.0, 1.0, 1.0, 1.0));
    let s = state(vec![], vec![vec![0.0]; 2], 1.0, 1.0, uniform(2));
    assert_eq!(m.cond_pi(&s).unwrap().alpha(), &[2.0, 2.0]);

    let m = MixtureModel::new(spec(0.5, 4, 1.0, 1.0, 1.0, 1.0));
    let s = state(vec![3, 3, 3], vec![vec![0.0]; 4], 1.0, 1.0, uniform(4));
    assert_eq!(m.cond_pi(&s).unwrap().alpha(), &[0.5, 0.5, 0.5, 3.5]);
}

#[test]
fn cond_pi_ignores_order_of_assignments() {
    let m = MixtureModel::new(spec(1.3, 3, 1.0, 1.0, 1.0, 1.0));
    let a = state(vec![0, 2, 1, 2, 0], vec![vec![0.0]; 3], 1.0, 1.0, uniform(3));
    let b = state(vec![2, 0, 2, 0, 1], vec![vec![0.0]; 3], 1.0, 1.0, uniform(3));
    assert_eq!(m.cond_pi(&a).unwrap(), m.cond_pi(&b).unwrap());
}

#[test]
fn cond_z_symmetric_evidence() {
    let m = MixtureModel::new(spec(1.0, 2, 1.0, 1.0, 1.0, 1.0));
    let s = state(vec![0, 1, 0], vec![vec![0.7, -1.0], vec![0.7, -1.0]], 1.0, 0.8, uniform(2));
    let x = data(vec![vec![0.0, 1.0], vec![3.0, -2.0], vec![-1.0, 0.5]]);
    let c = m.cond_z(&s, &x).unwrap();
    for r in 0..3 {
        assert!((c.probs(r)[0] - 0.5).abs() < 1e-15 && (c.probs(r)[1] - 0.5).abs() < 1e-15);
    }
}

#[test]
fn cond_z_dominated_by_tiny_noise() {
    let m = MixtureModel::new(spec(1.0, 3, 1.0, 1.0, 1.0, 1.0));
    let s = state(vec![0], vec![vec![0.0], vec![1.0], vec![2.0]], 1.0, 1e-8, uniform(3));
    let c = m.cond_z(&s, &data(vec![vec![1.0]])).unwrap();
    assert!(c.probs(0)[1] > 1.0 - 1e-12);
}

#[test]
fn cond_z_matches_bayes_rule() {
    let m = MixtureModel::new(spec(1.0, 2, 1.0, 1.0, 1.0, 1.0));
    let (mu, var, pi) = ([-0.5, 1.25], 0.7, [0.3, 0.7]);
    let s = state(vec![0, 1], vec![vec![mu[0]], vec![mu[1]]], 1.0, var, pi.to_vec());
    let xs = [0.1, 2.0];
    let c = m.cond_z(&s, &data(vec![vec![xs[0]], vec![xs[1]]])).unwrap();
    for (i, x) in xs.iter().enumerate() {
        // direct densities, no logs
        let w: Vec<f64> = (0..2)
            .map(|k| pi[k] * (-(x - mu[k]) * (x - mu[k]) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt())
            .collect();
        let total = w[0] + w[1];
        for k in 0..2 {
            assert!((c.probs(i)[k] - w[k] / total).abs() < 1e-14);
        }
        assert!((c.probs(i).iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn cond_mu_examples() {
    let m = MixtureModel::new(spec(1.0, 2, 1.0, 1.0, 1.0, 1.0));
    let s = state(vec![0], vec![vec![0.3], vec![9.0]], 1.0, 1.0, uniform(2));
    let g = m.cond_mu(&s, &data(vec![vec![2.0]])).unwrap();
    assert!((g.mean(0) - 1.0).abs() < 1e-15 && (g.var(0) - 0.5).abs() < 1e-15);
    // empty cluster: prior
    assert_eq!((g.mean(1), g.var(1)), (0.0, 1.0));

    let s = state(vec![0, 0, 0, 1], vec![vec![0.0], vec![0.0]], 1e12, 1.0, uniform(2));
    let x = data(vec![vec![1.0], vec![2.0], vec![4.5], vec![-3.0]]);
    let g = m.cond_mu(&s, &x).unwrap();
    assert!((g.mean(0) - 7.5 / 3.0).abs() < 1e-6);
    assert!((g.mean(1) + 3.0).abs() < 1e-6);
}

#[test]
fn cond_sigma_sq_mu_examples() {
    let m = MixtureModel::new(spec(1.0, 3, 1.0, 1.0, 1.0, 1.0));
    let s = state(vec![0], vec![vec![0.0, 0.0]; 3], 1.0, 1.0, uniform(3));
    let ig = m.cond_sigma_sq_mu(&s).unwrap();
    assert_eq!((ig.shape(), ig.scale()), (4.0, 1.0));

    let m = MixtureModel::new(spec(1.0, 2, 1.0, 1.0, 1.0, 1.0));
    let s = state(vec![0], vec![vec![1.0, 2.0], vec![0.0, 0.0]], 1.0, 1.0, uniform(2));
    assert_eq!(m.cond_sigma_sq_mu(&s).unwrap().scale(), 3.5);
}

#[test]
fn cond_sigma_sq_n_examples() {
    let m = MixtureModel::new(spec(1.0, 2, 1.0, 1.0, 1.0, 1.0));
    let s = state(vec![0, 1, 1, 0], vec![vec![1.0, 2.0], vec![-1.0, 0.5]], 1.0, 1.0, uniform(2));
    let x = data(vec![vec![1.0, 2.0], vec![-1.0, 0.5], vec![-1.0, 0.5], vec![1.0, 2.0]]);
    let ig = m.cond_sigma_sq_n(&s, &x).unwrap();
    assert_eq!((ig.shape(), ig.scale()), (5.0, 1.0));

    let m = MixtureModel::new(spec(1.0, 2, 1.0, 1.0, 1.0, 0.5));
    let s = state(vec![1, 1], vec![vec![0.0], vec![1.0]], 1.0, 1.0, uniform(2));
    let ig = m.cond_sigma_sq_n(&s, &data(vec![vec![0.0], vec![2.0]])).unwrap();
    assert_eq!(ig.scale(), 1.5);
}

#[test]
fn cond_x_is_the_likelihood() {
    let m = MixtureModel::default();
    let s = state(vec![0], vec![vec![3.0, 3.0], vec![0.0, 0.0], vec![0.0, 0.0]], 1.0, 1.0, uniform(3));
    let g = m.cond_x(&s).unwrap();
    assert_eq!((g.mean(0), g.mean(1), g.var(0), g.var(1)), (3.0, 3.0, 1.0, 1.0));

    let mut rng = RngStream::new(5);
    let (mut s, _) = m.forward_sample(30, 3, &mut rng).unwrap();
    s.sigma_sq_n = 1e-10;
    let x = m.cond_x(&s).unwrap().sample(&mut rng);
    for i in 0..30 {
        for j in 0..3 {
            assert!((x[i * 3 + j] - s.mu.get(s.z[i], j)).abs() < 1e-4);
        }
    }

    let (s, x) = m.forward_sample(12, 2, &mut rng).unwrap();
    let lik: f64 = m.cond_x(&s).unwrap().log_p(x.x().as_slice()).unwrap().iter().sum();
    let terms = joint_terms(m.spec(), &s, &x).unwrap();
    assert!((lik - terms.likelihood).abs() < 1e-12);
}

#[test]
fn joint_of_tiny_instance_by_hand() {
    let m = MixtureModel::new(spec(1.0, 1, 1.0, 1.0, 1.0, 1.0));
    let s = state(vec![0], vec![vec![1.0]], 1.0, 1.0, vec![1.0]);
    let x = data(vec![vec![1.0]]);
    // Dir(1) on one component: 0; z: ln 1 = 0; two IG(1,1) at 1: -1 each;
    // N(1; 0, 1) = -ln(2π)/2 - 1/2; N(1; 1, 1) = -ln(2π)/2
    let hand = -2.0 - (2.0 * PI).ln() - 0.5;
    assert!((m.joint_log_p(&s, &x).unwrap() - hand).abs() < 1e-14);
    assert!((hand - (-4.337877066409345)).abs() < 1e-14);
}

#[test]
fn joint_is_the_sum_of_independently_evaluated_terms() {
    let sp = spec(0.8, 3, 2.0, 1.5, 3.0, 2.0);
    let m = MixtureModel::new(sp);
    let mut rng = RngStream::new(6);
    for _ in 0..50 {
        let (s, x) = m.forward_sample(9, 2, &mut rng).unwrap();
        let ln_g = mcmc_check::special::ln_gamma;
        let dir = ln_g(3.0 * 0.8) - 3.0 * ln_g(0.8) + s.pi.iter().map(|p| (0.8 - 1.0) * p.ln()).sum::<f64>();
        let z: f64 = s.z.iter().map(|&k| s.pi[k].ln()).sum();
        let ig = |a: f64, b: f64, v: f64| a * b.ln() - ln_g(a) - (a + 1.0) * v.ln() - b / v;
        let normal = |v: f64, mean: f64, var: f64| -0.5 * (2.0 * PI * var).ln() - 0.5 * (v - mean).powi(2) / var;
        let mu: f64 = s.mu.as_slice().iter().map(|&v| normal(v, 0.0, s.sigma_sq_mu)).sum();
        let mut lik = 0.0;
        for i in 0..9 {
            for j in 0..2 {
                lik += normal(x.x().get(i, j), s.mu.get(s.z[i], j), s.sigma_sq_n);
            }
        }
        let total = dir + z + ig(2.0, 1.5, s.sigma_sq_mu) + ig(3.0, 2.0, s.sigma_sq_n) + mu + lik;
        let got = m.joint_log_p(&s, &x).unwrap();
        assert!((got - total).abs() < 1e-10 * total.abs().max(1.0), "{got} vs {total}");
    }
}

#[test]
fn joint_is_finite_on_forward_samples() {
    let m = MixtureModel::default();
    let mut rng = RngStream::new(7);
    for _ in 0..1000 {
        let (s, x) = m.forward_sample(20, 2, &mut rng).unwrap();
        assert!(m.joint_log_p(&s, &x).unwrap().is_finite());
    }
}

#[test]
fn joint_rejects_invalid_states() {
    let m = MixtureModel::default();
    let x = data(vec![vec![0.0, 0.0]]);
    let mut s = state(vec![0], vec![vec![0.0, 0.0]; 3], 1.0, 1.0, uniform(3));
    s.pi = vec![0.5, 0.5, 0.5];
    assert!(m.joint_log_p(&s, &x).is_err());
    let mut s = state(vec![0], vec![vec![0.0, 0.0]; 3], 1.0, 1.0, uniform(3));
    s.sigma_sq_n = -1.0;
    assert!(m.joint_log_p(&s, &x).is_err());
}

#[test]
fn forward_sample_is_deterministic() {
    let m = MixtureModel::default();
    let a = m.forward_sample(15, 3, &mut RngStream::new(8)).unwrap();
    let b = m.forward_sample(15, 3, &mut RngStream::new(8)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn forward_noise_variance_follows_its_prior() {
    let m = MixtureModel::default();
    let prior = m.spec().sigma_sq_n_prior;
    let mut rng = RngStream::new(9);
    let forward: Vec<f64> = (0..10_000).map(|_| m.forward_sample(5, 2, &mut rng).unwrap().0.sigma_sq_n).collect();
    let mut other = RngStream::new(10);
    let reference: Vec<f64> = (0..10_000).map(|_| prior.sample(&mut other)).collect();
    assert!(ks_distance(&forward, &reference) < 0.02);
}

#[test]
fn concentrated_dirichlet_gives_uniform_assignments() {
    let m = MixtureModel::new(spec(1e3, 4, 3.0, 3.0, 3.0, 3.0));
    let mut rng = RngStream::new(11);
    let mut counts = [0usize; 4];
    let mut total = 0;
    for _ in 0..500 {
        let (s, _) = m.forward_sample(40, 1, &mut rng).unwrap();
        for &z in &s.z {
            counts[z] += 1;
            total += 1;
        }
    }
    for c in counts {
        assert!((c as f64 / total as f64 - 0.25).abs() < 0.02);
    }
}

#[test]
fn gibbs_step_keeps_states_valid_and_is_deterministic() {
    let m = MixtureModel::default();
    let run = |seed| {
        let mut rng = RngStream::new(seed);
        let (mut s, x) = m.forward_sample(25, 2, &mut rng).unwrap();
        for _ in 0..200 {
            s = m.gibbs_step(&s, &x, &mut rng).unwrap();
            s.validate().unwrap();
            assert!((s.pi.iter().sum::<f64>() - 1.0).abs() <= STATE_SIMPLEX_TOL);
        }
        s
    };
    assert_eq!(run(12), run(12));
}

#[test]
fn weak_data_chain_recovers_the_between_cluster_prior() {
    // σ²_n pinned near 1e12 by a tight prior, so the data say nothing about μ
    let sp = spec(1.0, 3, 10.0, 5.0, 1e6, 1e18);
    let m = MixtureModel::new(sp);
    let mut rng = RngStream::new(13);
    let (mut s, x) = m.forward_sample(20, 2, &mut rng).unwrap();
    let mut chain = Vec::new();
    for i in 0..40_000 {
        s = m.gibbs_step(&s, &x, &mut rng).unwrap();
        if i % 10 == 0 {
            chain.push(s.sigma_sq_mu);
        }
    }
    let mut other = RngStream::new(14);
    let prior: Vec<f64> = (0..4000).map(|_| sp.sigma_sq_mu_prior.sample(&mut other)).collect();
    let ks = ks_distance(&chain, &prior);
    assert!(ks < 0.05, "ks {ks}");
}

#[test]
fn statistics_examples() {
    let s = state(vec![0, 0, 1], vec![vec![0.0], vec![-2.5], vec![1.0], vec![0.0]], 1.5, 0.5, uniform(4));
    let x = data(vec![vec![0.0]; 3]);
    assert_eq!(Statistic::MeanX.evaluate(&s, &x), 0.0);
    assert!((Statistic::EntropyPi.evaluate(&s, &x) - 4f64.ln()).abs() < 1e-15);
    assert_eq!(Statistic::MaxAbsMu.evaluate(&s, &x), 2.5);
    assert_eq!(Statistic::SigmaSqN.evaluate(&s, &x), 0.5);
    assert_eq!(Statistic::SigmaSqMu.evaluate(&s, &x), 1.5);
    let s2 = state(vec![0, 0, 1], vec![vec![0.0]; 2], 1.0, 1.0, uniform(2));
    assert!((Statistic::MaxOccupancy.evaluate(&s2, &x) - 2.0 / 3.0).abs() < 1e-15);
}
