//! Estimates banded LD from a reference panel and soft-thresholds it.
//!
//! Run: `cargo run --release --example ld_threshold`

use bright::simulate::{ar1_block_covariance, gen_ar1_panel};
use bright::{default_tau, estimate_ld};

fn main() -> bright::Result<()> {
    let p = 300;
    let ids: Vec<String> = (1..=p).map(|j| format!("snp{j}")).collect();
    let truth = ar1_block_covariance(p, 50, 0.5);
    println!("{:>6} {:>8} {:>10} {:>12}", "n_ref", "tau", "pairs", "max error");
    for n_ref in [100, 400, 1600] {
        let panel = gen_ar1_panel(ids.clone(), n_ref, 50, 0.5, 7, 3)?;
        let raw = estimate_ld(&panel, 60)?;
        let tau = default_tau(p, n_ref, 1.0);
        let ld = raw.apply_threshold(tau)?;
        let err = (&ld.to_dense() - &truth).iter().map(|v| v.abs()).fold(0.0, f64::max);
        println!("{n_ref:>6} {tau:>8.4} {:>10} {err:>12.4}", ld.nnz_offdiag());
    }

    // thresholds compose: a larger tau can be applied on top of a smaller one
    let panel = gen_ar1_panel(ids, 400, 50, 0.5, 8, 3)?;
    let once = estimate_ld(&panel, 60)?.apply_threshold(0.2)?;
    let twice = estimate_ld(&panel, 60)?.apply_threshold(0.1)?.apply_threshold(0.2)?;
    let gap = (&once.to_dense() - &twice.to_dense()).iter().map(|v| v.abs()).fold(0.0, f64::max);
    println!("direct vs stepwise tau=0.2 max difference: {gap:.1e}");
    Ok(())
}
