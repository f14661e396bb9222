//! Variable-selection summaries: the FPR/TPR curve along a path, FPR at a
//! matched TPR, and a Manhattan-style table.
//!
//! Run: `cargo run --release --example selection_curves`

use bright::eval::{fpr_at_tpr, fpr_tpr_curve, manhattan_table, selection_metrics};
use bright::simulate::{prior_config_for, run_replicate, SupportMode};
use bright::{default_tau, estimate_ld, fit_path, FitResult, Scale, SimScenario, SolverConfig, SummaryStats};

fn main() -> bright::Result<()> {
    let sc = SimScenario {
        p: 1000,
        s0_size: 10,
        s0_mode: SupportMode::FixedGrid,
        h2: 0.3,
        ..SimScenario::default()
    };
    let rep = run_replicate(&sc, &prior_config_for(&sc))?;
    let stats = SummaryStats::from_records(&rep.target_gwas, Scale::Standardized)?;
    let ld = estimate_ld(&rep.data.reference, sc.window)?.apply_threshold(default_tau(sc.p, sc.n_ref, 1.0))?;
    let path = fit_path(&stats, &ld, &rep.prior, &[0.0, 1.0], 30, 0.01, &SolverConfig::default())?;
    let s0 = &rep.data.s0;

    for eta in [0.0, 1.0] {
        let slice: Vec<FitResult> = path.iter().filter(|f| f.eta == eta).cloned().collect();
        let curve = fpr_tpr_curve(&slice, s0, sc.p);
        match fpr_at_tpr(&curve, 0.75) {
            Some(fpr) => println!("eta={eta}: FPR at TPR 0.75 = {fpr:.4}"),
            None => println!("eta={eta}: TPR 0.75 never reached"),
        }
    }

    let mid = &path[path.len() - 18];
    let m = selection_metrics(&mid.active_set, s0, sc.p);
    println!("eta={} lambda={:.4}: TPR {:.2} FPR {:.4}", mid.eta, mid.lambda, m.tpr, m.fpr);
    let mut rows = manhattan_table(&stats.variant_ids, &stats.t_stats, &stats.sample_sizes, &mid.active_set, s0)?;
    rows.sort_by(|a, b| b.neg_log10_p.total_cmp(&a.neg_log10_p));
    for r in rows.iter().take(8) {
        println!("{:<8} -log10 p {:>6.2}  {}", r.variant_id, r.neg_log10_p, r.status.label());
    }
    Ok(())
}
