//! Fits the transfer lasso at one `(eta, lambda)` from summary statistics,
//! reference LD and a prior, and compares it with the target-only lasso.
//!
//! Run: `cargo run --release --example fit_summary_lasso`

use bright::simulate::{prior_config_for, run_replicate};
use bright::tuning::{validation_score, ScoreKind};
use bright::{default_tau, estimate_ld, fit, lambda_max, Scale, SimScenario, SolverConfig, SummaryStats};

fn main() -> bright::Result<()> {
    let sc = SimScenario {
        p: 1000,
        n_caucasian: 3000,
        ..SimScenario::default()
    };
    let rep = run_replicate(&sc, &prior_config_for(&sc))?;
    let stats = SummaryStats::from_records(&rep.target_gwas, Scale::Standardized)?;
    let ld = estimate_ld(&rep.data.reference, sc.window)?.apply_threshold(default_tau(sc.p, sc.n_ref, 1.0))?;
    let test = &rep.data.target_test;

    for eta in [0.0, 1.0] {
        let lambda = 0.3 * lambda_max(&stats, &ld, &rep.prior, eta)?;
        let f = fit(&stats, &ld, &rep.prior, &SolverConfig::default().with_penalty(eta, lambda), None)?;
        let r2 = validation_score(&f.beta_hat, &test.panel, &test.outcomes, ScoreKind::R2, Scale::Standardized)?;
        println!(
            "eta={eta:<4} lambda={lambda:.4} nonzero={:<4} sweeps={:<4} kkt={:.1e} test R2={r2:.4}",
            f.n_nonzero(),
            f.iterations,
            f.kkt_violation
        );
    }
    Ok(())
}
