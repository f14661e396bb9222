//! Two-population synthetic data.
//!
//! Genotypes are Gaussian with AR(1) correlation inside independent blocks
//! of adjacent variants (a stand-in for LD blocks). Effects for the
//! auxiliary ("Caucasian") and target populations share a support and are
//! drawn jointly normal with correlation `rho`; outcomes add Gaussian noise
//! sized to hit the requested heritability. GWAS summaries come from
//! marginal simple linear regressions, and the prior is an `eta = 0` fit on
//! the auxiliary population tuned by BIC.
//!
//! All randomness is drawn from ChaCha8 sub-streams addressed by
//! `(seed, domain, index)`, so output does not depend on thread count.

use std::path::Path;
use std::str::FromStr;

use ndarray::Array2;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{BrightError, Result};
use crate::io::read_to_string;
use crate::refpanel::{default_tau, estimate_ld, GenotypePanel};
use crate::solver::{fit_path, PriorWeights, SolverConfig, DEFAULT_LAMBDA_COUNT, DEFAULT_LAMBDA_MIN_RATIO};
use crate::sumstats::{Scale, SummaryStats, VariantRecord};
use crate::tuning::{tune_path, Criterion};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportMode {
    /// Support drawn uniformly without replacement; effects bivariate normal.
    Random,
    /// Evenly spaced support with alternating +1/-1 effects in both
    /// populations.
    FixedGrid,
}

impl FromStr for SupportMode {
    type Err = BrightError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(SupportMode::Random),
            "fixed_grid" => Ok(SupportMode::FixedGrid),
            other => Err(BrightError::Scenario(format!("unknown s0_mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Population {
    TargetTrain,
    TargetTest,
    Caucasian,
    Reference,
}

impl Population {
    fn code(self) -> u64 {
        match self {
            Population::TargetTrain => 0,
            Population::TargetTest => 1,
            Population::Caucasian => 2,
            Population::Reference => 3,
        }
    }
}

/// Generative specification of one synthetic study.
#[derive(Debug, Clone, PartialEq)]
pub struct SimScenario {
    pub p: usize,
    pub n_target: usize,
    pub n_test: usize,
    pub n_caucasian: usize,
    pub n_ref: usize,
    pub s0_size: usize,
    pub h2: f64,
    pub rho: f64,
    pub ld_rho: f64,
    /// AR(1) autocorrelation for the auxiliary population; defaults to
    /// `ld_rho`.
    pub ld_rho_caucasian: Option<f64>,
    pub block_size: usize,
    pub seed: u64,
    pub s0_mode: SupportMode,
    /// LD band used when building LD matrices from the simulated panels.
    pub window: usize,
    /// Threshold constant for `default_tau`.
    pub m_prime: f64,
}

impl Default for SimScenario {
    fn default() -> Self {
        SimScenario {
            p: 2000,
            n_target: 400,
            n_test: 1000,
            n_caucasian: 4000,
            n_ref: 500,
            s0_size: 20,
            h2: 0.5,
            rho: 1.0,
            ld_rho: 0.5,
            ld_rho_caucasian: None,
            block_size: 50,
            seed: 1,
            s0_mode: SupportMode::Random,
            window: 50,
            m_prime: 1.0,
        }
    }
}

impl SimScenario {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(BrightError::Scenario(m));
        for (name, v) in [
            ("p", self.p),
            ("n_target", self.n_target),
            ("n_test", self.n_test),
            ("n_caucasian", self.n_caucasian),
            ("n_ref", self.n_ref),
            ("s0_size", self.s0_size),
            ("block_size", self.block_size),
            ("window", self.window),
        ] {
            if v == 0 {
                return fail(format!("{name} must be positive"));
            }
        }
        if self.n_target < 3 || self.n_caucasian < 3 {
            return fail("GWAS sample sizes must be at least 3".into());
        }
        if self.n_ref < 2 {
            return fail("n_ref must be at least 2".into());
        }
        if self.s0_size > self.p {
            return fail(format!("s0_size {} exceeds p {}", self.s0_size, self.p));
        }
        if !(self.h2 > 0.0 && self.h2 < 1.0) {
            return fail(format!("h2 must lie in (0, 1), got {}", self.h2));
        }
        if !(-1.0..=1.0).contains(&self.rho) {
            return fail(format!("rho must lie in [-1, 1], got {}", self.rho));
        }
        for (name, v) in [("ld_rho", Some(self.ld_rho)), ("ld_rho_caucasian", self.ld_rho_caucasian)] {
            if let Some(v) = v {
                if !(0.0..1.0).contains(&v) {
                    return fail(format!("{name} must lie in [0, 1), got {v}"));
                }
            }
        }
        if !(self.m_prime >= 0.0) {
            return fail("m_prime must be non-negative".into());
        }
        if self.s0_mode == SupportMode::FixedGrid && self.p % self.s0_size != 0 {
            return fail(format!(
                "fixed_grid needs p divisible by s0_size ({} % {} != 0)",
                self.p, self.s0_size
            ));
        }
        Ok(())
    }

    /// Parses a flat `key = value` file; `#` starts a comment. Unspecified
    /// keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut sc = SimScenario::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| BrightError::Scenario(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || BrightError::Scenario(format!("line {}: bad value '{value}' for {key}", lineno + 1));
            let int = || value.parse::<usize>().map_err(|_| bad());
            let real = || value.parse::<f64>().map_err(|_| bad());
            match key {
                "p" => sc.p = int()?,
                "n_target" | "n" => sc.n_target = int()?,
                "n_test" => sc.n_test = int()?,
                "n_caucasian" | "n_c" => sc.n_caucasian = int()?,
                "n_ref" => sc.n_ref = int()?,
                "s0_size" => sc.s0_size = int()?,
                "h2" => sc.h2 = real()?,
                "rho" => sc.rho = real()?,
                "ld_rho" => sc.ld_rho = real()?,
                "ld_rho_caucasian" => sc.ld_rho_caucasian = Some(real()?),
                "block_size" => sc.block_size = int()?,
                "seed" => sc.seed = value.parse::<u64>().map_err(|_| bad())?,
                "s0_mode" => sc.s0_mode = value.parse()?,
                "window" => sc.window = int()?,
                "m_prime" => sc.m_prime = real()?,
                other => {
                    return Err(BrightError::Scenario(format!("line {}: unknown key '{other}'", lineno + 1)))
                }
            }
        }
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        SimScenario::parse(&read_to_string(path)?)
    }

    pub fn to_config_string(&self) -> String {
        let mut out = format!(
            "p={}\nn_target={}\nn_test={}\nn_caucasian={}\nn_ref={}\ns0_size={}\nh2={}\nrho={}\nld_rho={}\n",
            self.p, self.n_target, self.n_test, self.n_caucasian, self.n_ref, self.s0_size, self.h2, self.rho,
            self.ld_rho
        );
        if let Some(v) = self.ld_rho_caucasian {
            out.push_str(&format!("ld_rho_caucasian={v}\n"));
        }
        out.push_str(&format!(
            "block_size={}\nseed={}\ns0_mode={}\nwindow={}\nm_prime={}\n",
            self.block_size,
            self.seed,
            match self.s0_mode {
                SupportMode::Random => "random",
                SupportMode::FixedGrid => "fixed_grid",
            },
            self.window,
            self.m_prime
        ));
        out
    }

    /// The scenario of replicate `k`: identical except for a seed derived
    /// from `(seed, k)`.
    pub fn for_replicate(&self, k: u64) -> SimScenario {
        SimScenario {
            seed: splitmix64(self.seed ^ splitmix64(k.wrapping_add(0x5851_F42D_4C95_7F2D))),
            ..self.clone()
        }
    }

    pub fn sample_size(&self, pop: Population) -> usize {
        match pop {
            Population::TargetTrain => self.n_target,
            Population::TargetTest => self.n_test,
            Population::Caucasian => self.n_caucasian,
            Population::Reference => self.n_ref,
        }
    }

    pub fn ld_rho_for(&self, pop: Population) -> f64 {
        match pop {
            Population::Caucasian => self.ld_rho_caucasian.unwrap_or(self.ld_rho),
            _ => self.ld_rho,
        }
    }

    pub fn variant_ids(&self) -> Vec<String> {
        (1..=self.p).map(|j| format!("snp{j}")).collect()
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

const DOMAIN_GENOTYPES: u64 = 1;
const DOMAIN_EFFECTS: u64 = 2;
const DOMAIN_OUTCOMES: u64 = 3;

/// Independent ChaCha8 stream for `(seed, domain, index)`.
pub fn substream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((domain << 56) | (index & ((1 << 56) - 1)));
    rng
}

/// Population covariance of the block AR(1) genotype model.
pub fn ar1_block_covariance(p: usize, block_size: usize, rho: f64) -> Array2<f64> {
    Array2::from_shape_fn((p, p), |(i, j)| {
        if i / block_size == j / block_size {
            rho.powi(i.abs_diff(j) as i32)
        } else {
            0.0
        }
    })
}

/// Samples `n` rows of block AR(1) Gaussian genotypes.
pub fn gen_ar1_panel(
    variant_ids: Vec<String>,
    n: usize,
    block_size: usize,
    rho: f64,
    seed: u64,
    population_code: u64,
) -> Result<GenotypePanel> {
    let p = variant_ids.len();
    let n_blocks = p.div_ceil(block_size);
    let innovation = (1.0 - rho * rho).sqrt();
    let blocks: Vec<Vec<f64>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let width = block_size.min(p - b * block_size);
            let mut rng = substream(seed, DOMAIN_GENOTYPES, (population_code << 32) | b as u64);
            let mut buf = Vec::with_capacity(n * width);
            for _ in 0..n {
                let mut x: f64 = rng.sample(StandardNormal);
                buf.push(x);
                for _ in 1..width {
                    let e: f64 = rng.sample(StandardNormal);
                    x = rho * x + innovation * e;
                    buf.push(x);
                }
            }
            buf
        })
        .collect();
    let mut data = Array2::<f64>::zeros((n, p));
    for (b, buf) in blocks.iter().enumerate() {
        let start = b * block_size;
        let width = block_size.min(p - start);
        for i in 0..n {
            for k in 0..width {
                data[[i, start + k]] = buf[i * width + k];
            }
        }
    }
    GenotypePanel::new(variant_ids, data)
}

pub fn gen_genotypes(scenario: &SimScenario, pop: Population) -> Result<GenotypePanel> {
    scenario.validate()?;
    gen_ar1_panel(
        scenario.variant_ids(),
        scenario.sample_size(pop),
        scenario.block_size,
        scenario.ld_rho_for(pop),
        scenario.seed,
        pop.code(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct Effects {
    pub beta0: Vec<f64>,
    pub beta_c: Vec<f64>,
    /// Sorted 0-based support.
    pub s0: Vec<usize>,
}

/// Draws the shared support and the two effect vectors.
pub fn gen_effects(scenario: &SimScenario) -> Result<Effects> {
    scenario.validate()?;
    let (p, k) = (scenario.p, scenario.s0_size);
    let mut beta0 = vec![0.0; p];
    let mut beta_c = vec![0.0; p];
    let s0: Vec<usize> = match scenario.s0_mode {
        SupportMode::FixedGrid => {
            let step = p / k;
            let s0: Vec<usize> = (1..=k).map(|m| m * step - 1).collect();
            for (m, &j) in s0.iter().enumerate() {
                let v = if m % 2 == 0 { 1.0 } else { -1.0 };
                beta0[j] = v;
                beta_c[j] = v;
            }
            s0
        }
        SupportMode::Random => {
            let mut rng = substream(scenario.seed, DOMAIN_EFFECTS, 0);
            let mut s0 = sample(&mut rng, p, k).into_vec();
            s0.sort_unstable();
            let sd = (scenario.h2 / k as f64).sqrt();
            let rho = scenario.rho;
            let orth = (1.0 - rho * rho).max(0.0).sqrt();
            for &j in &s0 {
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                beta_c[j] = sd * z1;
                beta0[j] = sd * (rho * z1 + orth * z2);
            }
            s0
        }
    };
    Ok(Effects { beta0, beta_c, s0 })
}

/// `y = X beta + e` with `Var(e) = Var(X beta) (1/h2 - 1)`, so that
/// `Var(X beta) / Var(y)` is `h2` in expectation.
pub fn gen_outcomes<R: Rng + ?Sized>(
    panel: &GenotypePanel,
    beta: &[f64],
    h2: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if !(h2 > 0.0 && h2 < 1.0) {
        return Err(BrightError::InvalidArgument(format!("h2 must lie in (0, 1), got {h2}")));
    }
    if beta.len() != panel.variant_count() {
        return Err(BrightError::Dimension("beta length differs from panel width".into()));
    }
    let support: Vec<usize> = (0..beta.len()).filter(|&j| beta[j] != 0.0).collect();
    let xb: Vec<f64> = panel
        .data
        .rows()
        .into_iter()
        .map(|row| support.iter().map(|&j| row[j] * beta[j]).sum())
        .collect();
    let var = sample_variance(&xb);
    if !(var > 0.0) {
        return Err(BrightError::InvalidArgument("linear predictor has zero variance".into()));
    }
    let noise_sd = (var * (1.0 / h2 - 1.0)).sqrt();
    Ok(xb
        .into_iter()
        .map(|m| m + noise_sd * rng.sample::<f64, _>(StandardNormal))
        .collect())
}

pub(crate) fn sample_variance(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
}

/// Marginal simple linear regression of `outcomes` on each column.
/// Records carry the slope t-statistic, `n`, and the column and outcome
/// means and variances (`n - 1` divisor).
pub fn compute_gwas(panel: &GenotypePanel, outcomes: &[f64]) -> Result<Vec<VariantRecord>> {
    let n = panel.sample_count();
    if n < 3 {
        return Err(BrightError::InvalidArgument(format!("GWAS needs n >= 3, got {n}")));
    }
    if outcomes.len() != n {
        return Err(BrightError::Dimension(format!("{} outcomes for {n} samples", outcomes.len())));
    }
    let nf = n as f64;
    let mean_y = outcomes.iter().sum::<f64>() / nf;
    let yc: Vec<f64> = outcomes.iter().map(|y| y - mean_y).collect();
    let syy: f64 = yc.iter().map(|v| v * v).sum();
    if !(syy > 0.0) {
        return Err(BrightError::InvalidArgument("outcome has zero variance".into()));
    }
    let cols: Vec<(usize, ndarray::ArrayView1<f64>)> = panel.data.columns().into_iter().enumerate().collect();
    cols.into_par_iter()
        .map(|(j, col)| {
            let mean_x = col.sum() / nf;
            let mut sxx = 0.0;
            let mut sxy = 0.0;
            for (x, y) in col.iter().zip(&yc) {
                let d = x - mean_x;
                sxx += d * d;
                sxy += d * y;
            }
            if !(sxx > 0.0) {
                return Err(BrightError::Monomorphic(panel.variant_ids[j].clone()));
            }
            let slope = sxy / sxx;
            // Floor keeps |r| strictly below 1 for a perfect marginal fit.
            let rss = (syy - slope * sxy).max(syy * 1e-12);
            let se = (rss / (nf - 2.0) / sxx).sqrt();
            let mut rec = VariantRecord::new(panel.variant_ids[j].clone(), slope / se, n);
            rec.mean_x = Some(mean_x);
            rec.var_x = Some(sxx / (nf - 1.0));
            rec.mean_y = Some(mean_y);
            rec.var_y = Some(syy / (nf - 1.0));
            Ok(rec)
        })
        .collect()
}

/// Settings for the auxiliary-population fit that produces the prior.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorConfig {
    pub window: usize,
    pub m_prime: f64,
    pub lambda_count: usize,
    pub lambda_min_ratio: f64,
    pub solver: SolverConfig,
}

impl Default for PriorConfig {
    fn default() -> Self {
        PriorConfig {
            window: 50,
            m_prime: 1.0,
            lambda_count: DEFAULT_LAMBDA_COUNT,
            lambda_min_ratio: DEFAULT_LAMBDA_MIN_RATIO,
            solver: SolverConfig::default(),
        }
    }
}

/// Lasso (`eta = 0`) on the auxiliary population's own summary statistics
/// and LD, tuned by BIC; the selected coefficients become the prior.
pub fn gen_prior(panel: &GenotypePanel, outcomes: &[f64], config: &PriorConfig) -> Result<PriorWeights> {
    let records = compute_gwas(panel, outcomes)?;
    let stats = SummaryStats::from_records(&records, Scale::Standardized)?;
    let tau = default_tau(panel.variant_count(), panel.sample_count(), config.m_prime);
    let ld = estimate_ld(panel, config.window)?.apply_threshold(tau)?;
    let zero = PriorWeights::zeros(stats.variant_ids.clone());
    let path = fit_path(
        &stats,
        &ld,
        &zero,
        &[0.0],
        config.lambda_count,
        config.lambda_min_ratio,
        &config.solver,
    )?;
    let report = tune_path(&path, Criterion::PenalizedBic, &stats, &ld, None)?;
    PriorWeights::new(stats.variant_ids.clone(), path[report.best_index].beta_hat.clone())
}

/// A panel with its outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Cohort {
    pub panel: GenotypePanel,
    pub outcomes: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimDataset {
    pub target_train: Cohort,
    pub target_test: Cohort,
    pub caucasian: Cohort,
    pub reference: GenotypePanel,
    pub beta0: Vec<f64>,
    pub beta_c: Vec<f64>,
    pub s0: Vec<usize>,
}

/// Generates all panels, effects and outcomes of one scenario.
pub fn simulate(scenario: &SimScenario) -> Result<SimDataset> {
    scenario.validate()?;
    let effects = gen_effects(scenario)?;
    let cohort = |pop: Population, beta: &[f64]| -> Result<Cohort> {
        let panel = gen_genotypes(scenario, pop)?;
        let mut rng = substream(scenario.seed, DOMAIN_OUTCOMES, pop.code());
        let outcomes = gen_outcomes(&panel, beta, scenario.h2, &mut rng)?;
        Ok(Cohort { panel, outcomes })
    };
    Ok(SimDataset {
        target_train: cohort(Population::TargetTrain, &effects.beta0)?,
        target_test: cohort(Population::TargetTest, &effects.beta0)?,
        caucasian: cohort(Population::Caucasian, &effects.beta_c)?,
        reference: gen_genotypes(scenario, Population::Reference)?,
        beta0: effects.beta0,
        beta_c: effects.beta_c,
        s0: effects.s0,
    })
}

/// A simulated dataset with its target GWAS and auxiliary prior.
#[derive(Debug, Clone, PartialEq)]
pub struct Replicate {
    pub data: SimDataset,
    pub target_gwas: Vec<VariantRecord>,
    pub prior: PriorWeights,
}

pub fn prior_config_for(scenario: &SimScenario) -> PriorConfig {
    PriorConfig {
        window: scenario.window,
        m_prime: scenario.m_prime,
        ..PriorConfig::default()
    }
}

pub fn run_replicate(scenario: &SimScenario, prior_config: &PriorConfig) -> Result<Replicate> {
    let data = simulate(scenario)?;
    let target_gwas = compute_gwas(&data.target_train.panel, &data.target_train.outcomes)?;
    let prior = gen_prior(&data.caucasian.panel, &data.caucasian.outcomes, prior_config)?;
    Ok(Replicate {
        data,
        target_gwas,
        prior,
    })
}

/// Case/control labels: 1 above the median outcome, 0 otherwise.
pub fn binarize_at_median(outcomes: &[f64]) -> Vec<f64> {
    let mut sorted = outcomes.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    outcomes.iter().map(|&y| if y > median { 1.0 } else { 0.0 }).collect()
}
