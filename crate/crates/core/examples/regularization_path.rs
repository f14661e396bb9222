//! Warm-started path over an `eta x lambda` grid.
//!
//! Run: `cargo run --release --example regularization_path`

use bright::simulate::{prior_config_for, run_replicate};
use bright::{default_tau, estimate_ld, fit_path, Scale, SimScenario, SolverConfig, SummaryStats};

fn main() -> bright::Result<()> {
    let sc = SimScenario {
        p: 800,
        n_caucasian: 2000,
        ..SimScenario::default()
    };
    let rep = run_replicate(&sc, &prior_config_for(&sc))?;
    let stats = SummaryStats::from_records(&rep.target_gwas, Scale::Standardized)?;
    let ld = estimate_ld(&rep.data.reference, sc.window)?.apply_threshold(default_tau(sc.p, sc.n_ref, 1.0))?;

    let path = fit_path(&stats, &ld, &rep.prior, &[0.0, 0.5, 2.0], 12, 0.05, &SolverConfig::default())?;
    println!("{:>5} {:>9} {:>8} {:>11} {:>7}", "eta", "lambda", "nonzero", "objective", "sweeps");
    for f in &path {
        println!(
            "{:>5} {:>9.5} {:>8} {:>11.5} {:>7}",
            f.eta,
            f.lambda,
            f.n_nonzero(),
            f.objective,
            f.iterations
        );
    }
    Ok(())
}
