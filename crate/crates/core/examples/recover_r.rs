//! Recovers the inner-product vector `r` from marginal GWAS output.
//!
//! Run: `cargo run --example recover_r`

use bright::simulate::{compute_gwas, gen_ar1_panel, substream};
use bright::sumstats::{raw_r_from_standardized, standardized_r_from_t};
use bright::{Scale, SummaryStats};
use rand::Rng;
use rand_distr::StandardNormal;

fn main() -> bright::Result<()> {
    let ids: Vec<String> = (1..=5).map(|j| format!("snp{j}")).collect();
    let panel = gen_ar1_panel(ids, 500, 5, 0.4, 42, 0)?;
    let mut rng = substream(42, 1, 0);
    let y: Vec<f64> = panel
        .data
        .rows()
        .into_iter()
        .map(|row| 0.5 * row[0] - 0.3 * row[3] + rng.sample::<f64, _>(StandardNormal) + 2.0)
        .collect();

    // what a GWAS would publish: t, n and the column / outcome moments
    let records = compute_gwas(&panel, &y)?;
    println!("{:<6} {:>9} {:>11} {:>12}", "id", "t", "r'", "X'y");
    for rec in &records {
        let r = standardized_r_from_t(rec.t_stat, rec.sample_n)?;
        let xty = raw_r_from_standardized(
            r,
            rec.sample_n,
            rec.var_x.unwrap(),
            rec.var_y.unwrap(),
            rec.mean_x.unwrap(),
            rec.mean_y.unwrap(),
        )?;
        println!("{:<6} {:>9.4} {:>11.6} {:>12.4}", rec.variant_id, rec.t_stat, r, xty);
    }

    let std_stats = SummaryStats::from_records(&records, Scale::Standardized)?;
    let raw_stats = SummaryStats::from_records(&records, Scale::Raw)?;
    println!("standardized r: {:?}", std_stats.r);
    println!("raw r = X'y/n:  {:?}", raw_stats.r);
    Ok(())
}
