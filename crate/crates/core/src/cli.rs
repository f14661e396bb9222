//! The `bright` command line: `fit`, `tune`, `simulate` and `eval`.
//!
//! Every command writes its outputs plus a `manifest.json` into `--out`.
//! Exit codes: 0 success, 2 invalid input, 3 solver divergence, 4 a tuning
//! criterion that the inputs cannot support.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use log::info;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::align::align;
use crate::error::{BrightError, Result};
use crate::eval::{
    auc, fpr_tpr_curve, manhattan_table, r_squared, predict_prs, selection_metrics, write_curve_csv,
    write_manhattan_csv,
};
use crate::io::{fmt_f64, read_id_list, read_keyed_column, read_vector, write_atomic, write_id_list, write_vector};
use crate::refpanel::{default_tau, estimate_ld, GenotypePanel, SparseLD, DEFAULT_WINDOW};
use crate::simulate::{binarize_at_median, prior_config_for, run_replicate, SimScenario};
use crate::solver::{
    fit, fit_path, FitResult, PriorWeights, SolverConfig, DEFAULT_LAMBDA_COUNT, DEFAULT_LAMBDA_MIN_RATIO,
    DEFAULT_MAX_ITERS, DEFAULT_TOL_XI,
};
use crate::sumstats::{load_sumstats, write_records, Scale, SummaryStats, SumstatsSchema};
use crate::tuning::{tune_path, Criterion, Validation, DEFAULT_ETA_GRID};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
pub const EXIT_CRITERION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "bright", version, about = "Transfer-lasso polygenic risk scores from summary statistics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one (eta, lambda) pair or a whole regularization path.
    Fit(FitArgs),
    /// Fit a path and select (eta, lambda) by BIC or held-out scoring.
    Tune(TuneArgs),
    /// Generate synthetic two-population studies.
    Simulate(SimulateArgs),
    /// Score fitted coefficients on a held-out panel.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Target GWAS summary statistics (tab-separated, with header).
    #[arg(long)]
    pub sumstats: PathBuf,
    /// Column-name overrides, e.g. `variant_id=SNP,t_stat=T,n=N`.
    #[arg(long)]
    pub columns: Option<String>,
    #[arg(long, default_value = "standardized")]
    pub scale: Scale,
    /// Precomputed LD triplet file; ids are read from `<ld>.ids`.
    #[arg(long, conflicts_with = "ref_panel")]
    pub ld: Option<PathBuf>,
    /// Reference genotype matrix; ids are read from `<ref-panel>.ids`.
    #[arg(long)]
    pub ref_panel: Option<PathBuf>,
    #[arg(long)]
    pub ref_ids: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: usize,
    /// LD soft-threshold; defaults to `M' sqrt(ln p / n_ref)`.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub m_prime: f64,
    /// Added to the LD diagonal.
    #[arg(long, default_value_t = 0.0)]
    pub diag_load: f64,
    /// Prior coefficients (`variant_id`, `beta`).
    #[arg(long)]
    pub prior: PathBuf,
    /// Work on the variants shared by all inputs.
    #[arg(long)]
    pub allow_subset: bool,
    #[arg(long, default_value_t = DEFAULT_TOL_XI)]
    pub xi: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, value_delimiter = ',')]
    pub eta_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_LAMBDA_COUNT)]
    pub lambda_count: usize,
    #[arg(long, default_value_t = DEFAULT_LAMBDA_MIN_RATIO)]
    pub lambda_min_ratio: f64,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Worker threads; 0 uses all cores. Outputs do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Fixed eta; requires --lambda.
    #[arg(long, requires = "lambda")]
    pub eta: Option<f64>,
    /// Fixed lambda; requires --eta.
    #[arg(long, requires = "eta")]
    pub lambda: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value = "bic")]
    pub criterion: Criterion,
    /// Validation genotypes for r2/auc; ids from `<path>.ids`.
    #[arg(long)]
    pub valid_panel: Option<PathBuf>,
    #[arg(long)]
    pub valid_ids: Option<PathBuf>,
    /// Validation outcomes, one per line.
    #[arg(long)]
    pub valid_outcomes: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Scenario file of `key = value` lines.
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub replicates: u64,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Coefficient file (`variant_id`, `beta_hat`).
    #[arg(long)]
    pub coefficients: PathBuf,
    #[arg(long)]
    pub test_panel: PathBuf,
    #[arg(long)]
    pub test_ids: Option<PathBuf>,
    /// Test outcomes, one per line. 0/1 outcomes also get an AUC.
    #[arg(long)]
    pub outcomes: PathBuf,
    #[arg(long, default_value = "standardized")]
    pub scale: Scale,
    /// Ids of the truly associated variants.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Output directory of a path fit, for the FPR/TPR curve.
    #[arg(long)]
    pub path: Option<PathBuf>,
    /// Summary statistics for the Manhattan table.
    #[arg(long)]
    pub sumstats: Option<PathBuf>,
    #[arg(long)]
    pub columns: Option<String>,
    #[command(flatten)]
    pub run: RunArgs,
}

/// Provenance record written next to every command's outputs.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
    pub timestamp: String,
    pub input_paths: Vec<String>,
    pub output_paths: Vec<String>,
}

/// Parses `std::env::args` and runs; returns the process exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().filter_or("BRIGHT_LOG", "error"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(err: &BrightError) -> i32 {
    match err {
        BrightError::Divergence { .. } | BrightError::DescentViolation { .. } => EXIT_DIVERGED,
        BrightError::Criterion(_) => EXIT_CRITERION,
        _ => EXIT_INVALID,
    }
}

pub fn execute(command: &Command) -> Result<()> {
    let run = match command {
        Command::Fit(a) => &a.run,
        Command::Tune(a) => &a.run,
        Command::Simulate(a) => &a.run,
        Command::Eval(a) => &a.run,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(run.threads)
        .build()
        .map_err(|e| BrightError::InvalidArgument(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match command {
        Command::Fit(a) => cmd_fit(a),
        Command::Tune(a) => cmd_tune(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Eval(a) => cmd_eval(a),
    })
}

/// `<path>.ids`
fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".ids");
    PathBuf::from(s)
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

/// sha256 over the configuration, ignoring where outputs go and how many
/// threads produce them.
fn config_hash<T: std::fmt::Debug>(command: &str, args: &T, run: &RunArgs) -> String {
    let canonical = format!("{command}\n{args:?}\nseed={}", run.seed);
    let canonical = canonical.replace(&format!("{:?}", run), "");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

fn write_manifest(
    command: &str,
    config_hash: String,
    run: &RunArgs,
    inputs: Vec<String>,
    outputs: Vec<String>,
) -> Result<()> {
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs().to_string())
        .unwrap_or_default();
    let manifest = RunManifest {
        command: command.to_string(),
        config_hash,
        seed: run.seed,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp,
        input_paths: inputs,
        output_paths: outputs,
    };
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| BrightError::InvalidArgument(format!("cannot serialize manifest: {e}")))?;
    write_atomic(&run.out.join("manifest.json"), format!("{json}\n").as_bytes())
}

struct Problem {
    stats: SummaryStats,
    ld: SparseLD,
    prior: PriorWeights,
    config: SolverConfig,
    inputs: Vec<String>,
}

fn schema(columns: &Option<String>) -> Result<SumstatsSchema> {
    match columns {
        Some(c) => SumstatsSchema::parse_overrides(c),
        None => Ok(SumstatsSchema::default()),
    }
}

fn load_panel(path: &Path, ids: &Option<PathBuf>) -> Result<GenotypePanel> {
    let ids = ids.clone().unwrap_or_else(|| sidecar(path));
    GenotypePanel::load(path, &ids)
}

fn load_problem(input: &InputArgs) -> Result<Problem> {
    let mut inputs = vec![display(&input.sumstats), display(&input.prior)];
    let stats = load_sumstats(&input.sumstats, &schema(&input.columns)?, input.scale)?;
    let ld = match (&input.ld, &input.ref_panel) {
        (Some(path), None) => {
            inputs.push(display(path));
            let ld = SparseLD::read_triplets(path, &sidecar(path))?;
            match input.tau {
                Some(tau) if tau > ld.tau => ld.apply_threshold(tau)?,
                _ => ld,
            }
        }
        (None, Some(path)) => {
            inputs.push(display(path));
            let panel = load_panel(path, &input.ref_ids)?;
            let tau = input
                .tau
                .unwrap_or_else(|| default_tau(panel.variant_count(), panel.sample_count(), input.m_prime));
            info!("LD from {} reference samples, window {}, tau {tau}", panel.sample_count(), input.window);
            estimate_ld(&panel, input.window)?.apply_threshold(tau)?
        }
        _ => {
            return Err(BrightError::InvalidArgument(
                "exactly one of --ld or --ref-panel is required".into(),
            ))
        }
    };
    let ld = if input.diag_load > 0.0 {
        ld.with_diagonal_loading(input.diag_load)?
    } else {
        ld
    };
    let prior = PriorWeights::load(&input.prior)?;
    let aligned = align(&stats, &ld, &prior, input.allow_subset)?;
    if aligned.dropped > 0 {
        info!("{} variants dropped during alignment", aligned.dropped);
    }
    let config = SolverConfig {
        tol_xi: input.xi,
        max_iters: input.max_iters,
        ..SolverConfig::default()
    };
    Ok(Problem {
        stats: aligned.stats,
        ld: aligned.ld,
        prior: aligned.prior,
        config,
        inputs,
    })
}

fn run_path(problem: &Problem, grid: &GridArgs) -> Result<Vec<FitResult>> {
    let etas = grid.eta_grid.clone().unwrap_or_else(|| DEFAULT_ETA_GRID.to_vec());
    fit_path(
        &problem.stats,
        &problem.ld,
        &problem.prior,
        &etas,
        grid.lambda_count,
        grid.lambda_min_ratio,
        &problem.config,
    )
}

/// Writes `variant_id, beta_hat, eta, lambda` for every variant.
pub fn write_coefficients(path: &Path, variant_ids: &[String], fit: &FitResult) -> Result<()> {
    let (eta, lambda) = (fmt_f64(fit.eta), fmt_f64(fit.lambda));
    let mut out = String::from("variant_id\tbeta_hat\teta\tlambda\n");
    for (id, b) in variant_ids.iter().zip(&fit.beta_hat) {
        let _ = writeln!(out, "{id}\t{}\t{eta}\t{lambda}", fmt_f64(*b));
    }
    write_atomic(path, out.as_bytes())
}

pub fn read_coefficients(path: &Path) -> Result<(Vec<String>, Vec<f64>)> {
    read_keyed_column(path, "variant_id", "beta_hat")
}

const PATH_HEADER: &str = "eta\tlambda\tn_nonzero\tobjective\titerations\tconverged\tkkt_violation\n";

fn write_path_summary(path: &Path, fits: &[FitResult]) -> Result<()> {
    let mut out = String::from(PATH_HEADER);
    for f in fits {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            fmt_f64(f.eta),
            fmt_f64(f.lambda),
            f.n_nonzero(),
            fmt_f64(f.objective),
            f.iterations,
            u8::from(f.converged),
            fmt_f64(f.kkt_violation)
        );
    }
    write_atomic(path, out.as_bytes())
}

/// Nonzero coefficients of every path point: `eta, lambda, variant_id,
/// beta_hat`.
fn write_path_coefficients(path: &Path, variant_ids: &[String], fits: &[FitResult]) -> Result<()> {
    let mut out = String::from("eta\tlambda\tvariant_id\tbeta_hat\n");
    for f in fits {
        let (eta, lambda) = (fmt_f64(f.eta), fmt_f64(f.lambda));
        for &j in &f.active_set {
            let _ = writeln!(out, "{eta}\t{lambda}\t{}\t{}", variant_ids[j], fmt_f64(f.beta_hat[j]));
        }
    }
    write_atomic(path, out.as_bytes())
}

/// Grid points with their active variant ids, read back from a path fit's
/// output directory.
fn read_path_supports(dir: &Path) -> Result<Vec<(f64, f64, Vec<String>)>> {
    let summary = dir.join("path.tsv");
    let text = std::fs::read_to_string(&summary).map_err(|e| BrightError::io(&summary, e))?;
    let mut points: Vec<(f64, f64, Vec<String>)> = Vec::new();
    let mut index: HashMap<(String, String), usize> = HashMap::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() < 2 {
            continue;
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| BrightError::parse(&summary, lineno + 1, format!("not a number: '{s}'")))
        };
        index.insert((f[0].to_string(), f[1].to_string()), points.len());
        points.push((parse(f[0])?, parse(f[1])?, Vec::new()));
    }
    let coefs = dir.join("path_coefficients.tsv");
    let text = std::fs::read_to_string(&coefs).map_err(|e| BrightError::io(&coefs, e))?;
    for (lineno, line) in text.lines().enumerate().skip(1) {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 4 {
            continue;
        }
        let k = index
            .get(&(f[0].to_string(), f[1].to_string()))
            .ok_or_else(|| BrightError::parse(&coefs, lineno + 1, "grid point missing from path.tsv"))?;
        points[*k].2.push(f[2].to_string());
    }
    Ok(points)
}

fn cmd_fit(args: &FitArgs) -> Result<()> {
    let problem = load_problem(&args.input)?;
    let out = &args.run.out;
    let ids = &problem.stats.variant_ids;
    let mut outputs = vec!["path.tsv".to_string()];
    let fits = match (args.eta, args.lambda) {
        (Some(eta), Some(lambda)) => {
            let cfg = problem.config.with_penalty(eta, lambda);
            let f = fit(&problem.stats, &problem.ld, &problem.prior, &cfg, None)?;
            write_coefficients(&out.join("coefficients.tsv"), ids, &f)?;
            outputs.push("coefficients.tsv".into());
            vec![f]
        }
        _ => {
            let fits = run_path(&problem, &args.grid)?;
            write_path_coefficients(&out.join("path_coefficients.tsv"), ids, &fits)?;
            outputs.push("path_coefficients.tsv".into());
            fits
        }
    };
    write_path_summary(&out.join("path.tsv"), &fits)?;
    let hash = config_hash("fit", args, &args.run);
    write_manifest("fit", hash, &args.run, problem.inputs, outputs)
}

fn cmd_tune(args: &TuneArgs) -> Result<()> {
    let problem = load_problem(&args.input)?;
    let mut inputs = problem.inputs.clone();
    let validation_data = match (&args.valid_panel, &args.valid_outcomes) {
        (Some(panel), Some(outcomes)) => {
            inputs.push(display(panel));
            inputs.push(display(outcomes));
            Some((load_panel(panel, &args.valid_ids)?, read_vector(outcomes)?))
        }
        (None, None) => None,
        _ => {
            return Err(BrightError::InvalidArgument(
                "--valid-panel and --valid-outcomes go together".into(),
            ))
        }
    };
    if args.criterion != Criterion::PenalizedBic && validation_data.is_none() {
        return Err(BrightError::Criterion(format!(
            "criterion {} needs --valid-panel and --valid-outcomes",
            args.criterion.name()
        )));
    }
    // fail before the path is fitted when BIC cannot be computed
    if args.criterion == Criterion::PenalizedBic
        && problem.stats.scale == Scale::Raw
        && problem.stats.outcome_second_moment.is_none()
    {
        return Err(BrightError::Criterion(
            "penalized BIC on raw-scale statistics needs mean_y and var_y columns".into(),
        ));
    }
    let validation_panel = match &validation_data {
        Some((panel, _)) if panel.variant_ids != problem.stats.variant_ids => {
            let pos: HashMap<&str, usize> =
                panel.variant_ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
            let cols = problem
                .stats
                .variant_ids
                .iter()
                .map(|id| {
                    pos.get(id.as_str()).copied().ok_or_else(|| {
                        BrightError::Alignment(format!("variant '{id}' missing from the validation panel"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let data = panel.data.select(ndarray::Axis(1), &cols);
            Some(GenotypePanel::new(problem.stats.variant_ids.clone(), data)?)
        }
        Some((panel, _)) => Some(panel.clone()),
        None => None,
    };
    let fits = run_path(&problem, &args.grid)?;
    let validation = match (&validation_panel, &validation_data) {
        (Some(panel), Some((_, outcomes))) => Some(Validation {
            genotypes: panel,
            outcomes,
        }),
        _ => None,
    };
    let report = tune_path(&fits, args.criterion, &problem.stats, &problem.ld, validation.as_ref())?;
    let out = &args.run.out;
    report.write_tsv(&out.join("tune_report.tsv"))?;
    write_coefficients(&out.join("coefficients.tsv"), &problem.stats.variant_ids, &fits[report.best_index])?;
    write_path_summary(&out.join("path.tsv"), &fits)?;
    write_path_coefficients(&out.join("path_coefficients.tsv"), &problem.stats.variant_ids, &fits)?;
    println!("{}", report.summary_line());
    let outputs = ["tune_report.tsv", "coefficients.tsv", "path.tsv", "path_coefficients.tsv"]
        .map(String::from)
        .to_vec();
    write_manifest("tune", config_hash("tune", args, &args.run), &args.run, inputs, outputs)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let mut scenario = SimScenario::load(&args.scenario)?;
    if args.replicates == 0 {
        return Err(BrightError::InvalidArgument("--replicates must be >= 1".into()));
    }
    scenario.seed = args.run.seed;
    scenario.validate()?;
    let out = &args.run.out;
    let mut outputs = Vec::new();
    for k in 1..=args.replicates {
        let sc = scenario.for_replicate(k);
        info!("replicate {k} (seed {})", sc.seed);
        let rep = run_replicate(&sc, &prior_config_for(&sc))?;
        let name = format!("rep_{k:03}");
        let dir = out.join(&name);
        let data = &rep.data;
        let ids = &data.reference.variant_ids;
        let tau = default_tau(sc.p, sc.n_ref, sc.m_prime);
        let ld = estimate_ld(&data.reference, sc.window)?.apply_threshold(tau)?;
        let truth: Vec<String> = data.s0.iter().map(|&j| ids[j].clone()).collect();
        write_atomic(&dir.join("scenario.cfg"), sc.to_config_string().as_bytes())?;
        write_records(&dir.join("sumstats.tsv"), &rep.target_gwas)?;
        rep.prior.write(&dir.join("prior.tsv"))?;
        data.reference.write(&dir.join("reference.txt"), &dir.join("reference.txt.ids"))?;
        ld.write_triplets(&dir.join("ld.tsv"), &dir.join("ld.tsv.ids"))?;
        data.target_test.panel.write(&dir.join("test.txt"), &dir.join("test.txt.ids"))?;
        write_vector(&dir.join("test_outcomes.txt"), &data.target_test.outcomes)?;
        write_vector(&dir.join("test_labels.txt"), &binarize_at_median(&data.target_test.outcomes))?;
        PriorWeights::new(ids.clone(), data.beta0.clone())?.write(&dir.join("beta0.tsv"))?;
        write_id_list(&dir.join("truth.txt"), &truth)?;
        for f in [
            "scenario.cfg",
            "sumstats.tsv",
            "prior.tsv",
            "reference.txt",
            "reference.txt.ids",
            "ld.tsv",
            "ld.tsv.ids",
            "test.txt",
            "test.txt.ids",
            "test_outcomes.txt",
            "test_labels.txt",
            "beta0.tsv",
            "truth.txt",
        ] {
            outputs.push(format!("{name}/{f}"));
        }
    }
    let hash = config_hash("simulate", &(args, scenario.to_config_string()), &args.run);
    write_manifest("simulate", hash, &args.run, vec![display(&args.scenario)], outputs)
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let mut inputs = vec![display(&args.coefficients), display(&args.test_panel), display(&args.outcomes)];
    let (coef_ids, beta) = read_coefficients(&args.coefficients)?;
    let panel = load_panel(&args.test_panel, &args.test_ids)?;
    let outcomes = read_vector(&args.outcomes)?;
    let pos: HashMap<&str, usize> = coef_ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    // coefficients are mapped onto the panel's variant order; absent ones are zero
    let mut aligned = vec![0.0; panel.variant_count()];
    let mut matched = 0usize;
    for (j, id) in panel.variant_ids.iter().enumerate() {
        if let Some(&i) = pos.get(id.as_str()) {
            aligned[j] = beta[i];
            matched += 1;
        }
    }
    if matched < coef_ids.len() {
        info!("{} coefficients have no column in the test panel", coef_ids.len() - matched);
    }
    if outcomes.len() != panel.sample_count() {
        return Err(BrightError::Dimension(format!(
            "{} outcomes for {} test samples",
            outcomes.len(),
            panel.sample_count()
        )));
    }
    let scores = predict_prs(&panel, &aligned, args.scale)?;
    let out = &args.run.out;
    let mut metrics = String::from("metric,value\n");
    let _ = writeln!(metrics, "r2,{}", fmt_f64(r_squared(&scores, &outcomes)?));
    let binary = outcomes.iter().all(|&y| y == 0.0 || y == 1.0);
    if binary && outcomes.contains(&0.0) && outcomes.contains(&1.0) {
        let _ = writeln!(metrics, "auc,{}", fmt_f64(auc(&scores, &outcomes)?));
    }
    write_atomic(&out.join("metrics.csv"), metrics.as_bytes())?;
    let mut outputs = vec!["metrics.csv".to_string()];

    let panel_pos: HashMap<&str, usize> =
        panel.variant_ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let to_index = |ids: &[String], what: &str| -> Result<Vec<usize>> {
        ids.iter()
            .map(|id| {
                panel_pos
                    .get(id.as_str())
                    .copied()
                    .ok_or_else(|| BrightError::Alignment(format!("{what} variant '{id}' is not in the test panel")))
            })
            .collect()
    };
    let active: Vec<usize> = (0..aligned.len()).filter(|&j| aligned[j] != 0.0).collect();
    let s0 = match &args.truth {
        Some(path) => {
            inputs.push(display(path));
            Some(to_index(&read_id_list(path)?, "truth")?)
        }
        None => None,
    };
    let p = panel.variant_count();
    if let Some(s0) = &s0 {
        let m = selection_metrics(&active, s0, p);
        let text = format!(
            "tp,fp,fn,tn,tpr,fpr,fnr\n{},{},{},{},{},{},{}\n",
            m.true_positives,
            m.false_positives,
            m.false_negatives,
            m.true_negatives,
            fmt_f64(m.tpr),
            fmt_f64(m.fpr),
            fmt_f64(m.fnr)
        );
        write_atomic(&out.join("selection.csv"), text.as_bytes())?;
        outputs.push("selection.csv".into());
        if let Some(dir) = &args.path {
            inputs.push(display(dir));
            let fits = read_path_supports(dir)?
                .into_iter()
                .map(|(eta, lambda, ids)| {
                    Ok(FitResult {
                        beta_hat: Vec::new(),
                        eta,
                        lambda,
                        iterations: 0,
                        converged: true,
                        objective: 0.0,
                        active_set: to_index(&ids, "path")?,
                        kkt_violation: 0.0,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            write_curve_csv(&out.join("fpr_tpr.csv"), &fpr_tpr_curve(&fits, s0, p))?;
            outputs.push("fpr_tpr.csv".into());
        }
    }
    if let Some(path) = &args.sumstats {
        inputs.push(display(path));
        let stats = load_sumstats(path, &schema(&args.columns)?, Scale::Standardized)?;
        let stat_pos: HashMap<&str, usize> =
            stats.variant_ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        let remap = |set: &[usize]| -> Vec<usize> {
            set.iter()
                .filter_map(|&j| stat_pos.get(panel.variant_ids[j].as_str()).copied())
                .collect()
        };
        let rows = manhattan_table(
            &stats.variant_ids,
            &stats.t_stats,
            &stats.sample_sizes,
            &remap(&active),
            &remap(s0.as_deref().unwrap_or(&[])),
        )?;
        write_manhattan_csv(&out.join("manhattan.csv"), &rows)?;
        outputs.push("manhattan.csv".into());
    }
    write_manifest("eval", config_hash("eval", args, &args.run), &args.run, inputs, outputs)
}
