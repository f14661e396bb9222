//! Selects `(eta, lambda)` by penalized BIC and scores the choice on held
//! out data, next to the target-only lasso.
//!
//! Run: `cargo run --release --example tune_and_evaluate`

use bright::simulate::{binarize_at_median, prior_config_for, run_replicate};
use bright::tuning::{tune_path, validation_score, ScoreKind, Validation, DEFAULT_ETA_GRID};
use bright::{default_tau, estimate_ld, fit_path, Criterion, FitResult, Scale, SimScenario, SolverConfig, SummaryStats};

fn main() -> bright::Result<()> {
    let sc = SimScenario::default();
    let rep = run_replicate(&sc, &prior_config_for(&sc))?;
    let stats = SummaryStats::from_records(&rep.target_gwas, Scale::Standardized)?;
    let ld = estimate_ld(&rep.data.reference, sc.window)?.apply_threshold(default_tau(sc.p, sc.n_ref, 1.0))?;
    let path = fit_path(&stats, &ld, &rep.prior, &DEFAULT_ETA_GRID, 50, 0.01, &SolverConfig::default())?;
    let lasso: Vec<FitResult> = path.iter().filter(|f| f.eta == 0.0).cloned().collect();

    let test = &rep.data.target_test;
    let labels = binarize_at_median(&test.outcomes);
    let score = |beta: &[f64]| -> bright::Result<(f64, f64)> {
        Ok((
            validation_score(beta, &test.panel, &test.outcomes, ScoreKind::R2, Scale::Standardized)?,
            validation_score(beta, &test.panel, &labels, ScoreKind::Auc, Scale::Standardized)?,
        ))
    };

    let bic = tune_path(&path, Criterion::PenalizedBic, &stats, &ld, None)?;
    let bic_lasso = tune_path(&lasso, Criterion::PenalizedBic, &stats, &ld, None)?;
    println!("{}", bic.summary_line());
    let (r2, auc) = score(&path[bic.best_index].beta_hat)?;
    let (r2l, aucl) = score(&lasso[bic_lasso.best_index].beta_hat)?;
    println!("transfer lasso: R2 {r2:.4}  AUC {auc:.4}");
    println!("target lasso:   R2 {r2l:.4}  AUC {aucl:.4}");

    // with individual-level validation data the grid can be scored directly
    let valid = Validation {
        genotypes: &test.panel,
        outcomes: &test.outcomes,
    };
    let by_r2 = tune_path(&path, Criterion::ValidationR2, &stats, &ld, Some(&valid))?;
    println!("validation-tuned: {}", by_r2.summary_line());
    Ok(())
}
