mod common;

use bright::simulate::compute_gwas;
use bright::{fit, fit_path, kkt_check, lambda_max, objective, GenotypePanel, PriorWeights, Scale, SolverConfig, SparseLD, SummaryStats};
use common::*;
use ndarray::Array2;

fn tight() -> SolverConfig {
    SolverConfig {
        tol_xi: 1e-12,
        kkt_tol: 1e-10,
        max_iters: 200_000,
        ..SolverConfig::default()
    }
}

#[test]
fn coordinate_descent_matches_proximal_gradient() {
    for seed in 0..30u64 {
        let p = [10, 30, 50][(seed % 3) as usize];
        let inst = random_instance(seed, p);
        let lmax = lambda_max(&inst.stats, &inst.ld, &inst.prior, inst.eta).unwrap();
        let lambda = lmax * (0.05 + 0.9 * ((seed * 7919) % 100) as f64 / 100.0);
        let cfg = SolverConfig::default().with_penalty(inst.eta, lambda);
        let f = fit(&inst.stats, &inst.ld, &inst.prior, &cfg, None).unwrap();
        let oracle = prox_gradient(&inst.dense, &inst.stats.r, &inst.prior.beta_tilde, inst.eta, lambda, 1e-13);
        let q_cd = dense_objective(&inst.dense, &inst.stats.r, &inst.prior.beta_tilde, inst.eta, lambda, &f.beta_hat);
        let q_or = dense_objective(&inst.dense, &inst.stats.r, &inst.prior.beta_tilde, inst.eta, lambda, &oracle);
        assert!((q_cd - q_or).abs() <= 1e-6, "seed {seed}: {q_cd} vs {q_or}");
        assert!(f.converged);
        assert!(f.kkt_violation <= 1e-6, "seed {seed}: kkt {}", f.kkt_violation);
        let independent = dense_kkt(&inst.dense, &inst.stats.r, &inst.prior.beta_tilde, inst.eta, lambda, &f.beta_hat);
        assert!((independent - f.kkt_violation).abs() < 1e-9);
    }
}

#[test]
fn reported_objective_agrees_with_dense_evaluation() {
    let inst = random_instance(99, 30);
    let beta: Vec<f64> = (0..30).map(|j| ((j * 37) % 11) as f64 / 10.0 - 0.5).collect();
    let lib = objective(&beta, &inst.stats, &inst.ld, &inst.prior, inst.eta, 0.07).unwrap();
    let dense = dense_objective(&inst.dense, &inst.stats.r, &inst.prior.beta_tilde, inst.eta, 0.07, &beta);
    assert!((lib - dense).abs() < 1e-12);
}

#[test]
fn warm_start_reaches_the_cold_start_optimum() {
    for seed in 200..210u64 {
        let inst = random_instance(seed, 40);
        let lmax = lambda_max(&inst.stats, &inst.ld, &inst.prior, inst.eta).unwrap();
        let path = fit_path(&inst.stats, &inst.ld, &inst.prior, &[inst.eta], 20, 0.05, &tight()).unwrap();
        for f in &path {
            let cold = fit(&inst.stats, &inst.ld, &inst.prior, &tight().with_penalty(f.eta, f.lambda), None).unwrap();
            assert!((cold.objective - f.objective).abs() < 1e-9, "seed {seed} lambda {}", f.lambda);
            let diff = cold.beta_hat.iter().zip(&f.beta_hat).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(diff < 1e-7, "seed {seed}: {diff}");
        }
        assert_eq!(path[0].lambda, lmax);
        assert_eq!(path[0].n_nonzero(), 0);
    }
}

#[test]
fn eta_zero_is_the_plain_lasso() {
    for seed in 300..310u64 {
        let mut inst = random_instance(seed, 25);
        inst.prior = PriorWeights::new(ids(25), (0..25).map(|j| j as f64).collect()).unwrap();
        let lmax = lambda_max(&inst.stats, &inst.ld, &inst.prior, 0.0).unwrap();
        let f = fit(&inst.stats, &inst.ld, &inst.prior, &tight().with_penalty(0.0, 0.3 * lmax), None).unwrap();
        let oracle = dense_lasso(&inst.dense, &inst.stats.r, 0.3 * lmax, 1e-14);
        for (a, b) in f.beta_hat.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-8, "seed {seed}: {a} vs {b}");
        }
    }
}

#[test]
fn huge_eta_returns_the_prior() {
    for seed in 400..405u64 {
        let inst = random_instance(seed, 30);
        let f = fit(&inst.stats, &inst.ld, &inst.prior, &SolverConfig::default().with_penalty(1e6, 1.0), None).unwrap();
        let gap = f
            .beta_hat
            .iter()
            .zip(&inst.prior.beta_tilde)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(gap <= 1e-3, "seed {seed}: {gap}");
    }
}

#[test]
fn kkt_check_flags_a_perturbed_solution() {
    let inst = random_instance(7, 20);
    let lmax = lambda_max(&inst.stats, &inst.ld, &inst.prior, inst.eta).unwrap();
    let f = fit(&inst.stats, &inst.ld, &inst.prior, &tight().with_penalty(inst.eta, 0.2 * lmax), None).unwrap();
    assert!(kkt_check(&f.beta_hat, &inst.stats, &inst.ld, &inst.prior, inst.eta, 0.2 * lmax).unwrap() < 1e-9);
    let mut bad = f.beta_hat.clone();
    bad[3] += 0.1;
    assert!(kkt_check(&bad, &inst.stats, &inst.ld, &inst.prior, inst.eta, 0.2 * lmax).unwrap() > 1e-3);
}

/// With unit-variance genotype columns the raw problem is the standardized
/// one scaled by the outcome's standard deviation.
#[test]
fn raw_and_standardized_scales_agree_up_to_outcome_scale() {
    let mut g = rng(11);
    let (n, p) = (300, 15);
    let mut x = Array2::from_shape_fn((n, p), |_| normal(&mut g));
    for mut col in x.columns_mut() {
        let mean = col.mean().unwrap();
        col.mapv_inplace(|v| v - mean);
        let sd = (col.dot(&col) / n as f64).sqrt();
        col.mapv_inplace(|v| v / sd);
    }
    let y: Vec<f64> = (0..n).map(|i| 2.0 * x[[i, 0]] - x[[i, 3]] + 3.0 * normal(&mut g) + 5.0).collect();
    let ybar = y.iter().sum::<f64>() / n as f64;
    let sd_y = (y.iter().map(|v| (v - ybar).powi(2)).sum::<f64>() / n as f64).sqrt();

    let panel = GenotypePanel::new(ids(p), x.clone()).unwrap();
    let recs = compute_gwas(&panel, &y).unwrap();
    let std_stats = SummaryStats::from_records(&recs, Scale::Standardized).unwrap();
    let raw_stats = SummaryStats::from_records(&recs, Scale::Raw).unwrap();
    let sigma = x.t().dot(&x) / n as f64;
    let ld = SparseLD::from_dense(ids(p), p, &sigma).unwrap();

    let bt: Vec<f64> = (0..p).map(|j| if j % 4 == 0 { 0.1 } else { 0.0 }).collect();
    let std_prior = PriorWeights::new(ids(p), bt.clone()).unwrap();
    let raw_prior = PriorWeights::new(ids(p), bt.iter().map(|b| b * sd_y).collect()).unwrap();
    let (eta, lambda) = (0.5, 0.05);
    let a = fit(&std_stats, &ld, &std_prior, &tight().with_penalty(eta, lambda), None).unwrap();
    let b = fit(&raw_stats, &ld, &raw_prior, &tight().with_penalty(eta, lambda * sd_y), None).unwrap();
    for (s, r) in a.beta_hat.iter().zip(&b.beta_hat) {
        assert!((s * sd_y - r).abs() < 1e-8 * sd_y.max(1.0), "{s} * {sd_y} vs {r}");
    }
    assert_eq!(a.active_set, b.active_set);
}
