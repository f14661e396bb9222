//! Generates a two-population study from a scenario string and writes it
//! in the formats the command line consumes.
//!
//! Run: `cargo run --release --example simulate_populations -- /tmp/bright_sim`

use std::path::PathBuf;

use bright::simulate::{prior_config_for, run_replicate};
use bright::sumstats::write_records;
use bright::SimScenario;

fn main() -> bright::Result<()> {
    let out: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "bright_sim".into()).into();
    let sc = SimScenario::parse(
        "# smaller than the default desk scenario
         p = 600
         n_target = 300
         n_caucasian = 1500
         s0_size = 12
         rho = 0.8
         ld_rho_caucasian = 0.3",
    )?;
    let rep = run_replicate(&sc.for_replicate(1), &prior_config_for(&sc))?;
    let data = &rep.data;

    let corr = {
        let (a, b): (Vec<f64>, Vec<f64>) = data.s0.iter().map(|&j| (data.beta_c[j], data.beta0[j])).unzip();
        let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
        dot(&a, &b) / (dot(&a, &a) * dot(&b, &b)).sqrt()
    };
    let prior_nonzero = rep.prior.beta_tilde.iter().filter(|b| **b != 0.0).count();
    println!("support {:?}", data.s0);
    println!("effect correlation across populations {corr:.3} (target rho {})", sc.rho);
    println!("prior nonzero {prior_nonzero}, overlapping support {}", data.s0.iter().filter(|&&j| rep.prior.beta_tilde[j] != 0.0).count());

    write_records(&out.join("sumstats.tsv"), &rep.target_gwas)?;
    rep.prior.write(&out.join("prior.tsv"))?;
    data.reference.write(&out.join("reference.txt"), &out.join("reference.txt.ids"))?;
    println!("wrote {}", out.display());
    Ok(())
}
