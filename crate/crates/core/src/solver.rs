//! Cyclic coordinate descent for the transfer-lasso objective
//!
//! ```text
//! Q(b) = (1 + eta)/2 * b' S b - b' (r + eta * S bt) + lambda * |b|_1
//! ```
//!
//! where `S` is the thresholded reference LD matrix, `r` the target
//! summary statistics and `bt` the external prior coefficients. Setting
//! `eta = 0` gives the plain lasso on summary data; `eta -> inf` pulls the
//! solution onto the prior.
//!
//! Each coordinate update is the soft-thresholded Gauss-Seidel step
//!
//! ```text
//! b_j <- ST( q_j / ((1+eta) s_jj) - S_j b_{-j} / s_jj,  lambda / ((1+eta) s_jj) )
//! ```
//!
//! with `q = r + eta * S bt`. The off-diagonal product `S_j b_{-j}` is
//! maintained incrementally over the band, so a sweep costs `O(p W)`.

use std::path::Path;

use log::{debug, warn};

use crate::error::{BrightError, Result};
use crate::io::{fmt_f64, read_keyed_column, write_atomic};
use crate::refpanel::{soft_threshold, SparseLD};
use crate::sumstats::SummaryStats;

pub const DEFAULT_TOL_XI: f64 = 1e-6;
pub const DEFAULT_MAX_ITERS: usize = 10_000;
pub const DEFAULT_DIVERGENCE_BOUND: f64 = 1e8;
pub const DEFAULT_KKT_TOL: f64 = 1e-6;
pub const DEFAULT_LAMBDA_COUNT: usize = 50;
pub const DEFAULT_LAMBDA_MIN_RATIO: f64 = 0.01;

/// Number of full sweeps before the solver restricts to the active set.
const FULL_SWEEPS_BEFORE_ACTIVE_SET: usize = 2;

/// External coefficient estimates aligned to the working variant set.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorWeights {
    pub variant_ids: Vec<String>,
    pub beta_tilde: Vec<f64>,
}

impl PriorWeights {
    pub fn new(variant_ids: Vec<String>, beta_tilde: Vec<f64>) -> Result<Self> {
        if variant_ids.len() != beta_tilde.len() {
            return Err(BrightError::Dimension(format!(
                "{} prior ids for {} coefficients",
                variant_ids.len(),
                beta_tilde.len()
            )));
        }
        if let Some(k) = beta_tilde.iter().position(|b| !b.is_finite()) {
            return Err(BrightError::MalformedRecord {
                variant: variant_ids[k].clone(),
                message: "non-finite prior coefficient".into(),
            });
        }
        Ok(PriorWeights {
            variant_ids,
            beta_tilde,
        })
    }

    pub fn zeros(variant_ids: Vec<String>) -> Self {
        let p = variant_ids.len();
        PriorWeights {
            variant_ids,
            beta_tilde: vec![0.0; p],
        }
    }

    pub fn len(&self) -> usize {
        self.beta_tilde.len()
    }

    /// Reads a tab-separated file with `variant_id` and `beta` columns.
    pub fn load(path: &Path) -> Result<Self> {
        let (ids, beta) = read_keyed_column(path, "variant_id", "beta")?;
        PriorWeights::new(ids, beta)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = String::from("variant_id\tbeta\n");
        for (id, b) in self.variant_ids.iter().zip(&self.beta_tilde) {
            out.push_str(id);
            out.push('\t');
            out.push_str(&fmt_f64(*b));
            out.push('\n');
        }
        write_atomic(path, out.as_bytes())
    }

    pub fn is_empty(&self) -> bool {
        self.beta_tilde.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub eta: f64,
    pub lambda: f64,
    /// Stop when the infinity norm of the change over a full sweep drops
    /// below this.
    pub tol_xi: f64,
    /// Maximum number of sweeps (full or active-set).
    pub max_iters: usize,
    /// Abort when any coefficient magnitude exceeds this.
    pub divergence_bound: f64,
    /// A fit is only declared converged when its KKT violation is at most
    /// this.
    pub kkt_tol: f64,
    /// Evaluate the objective after every sweep and fail on any increase.
    pub check_descent: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eta: 0.0,
            lambda: 1.0,
            tol_xi: DEFAULT_TOL_XI,
            max_iters: DEFAULT_MAX_ITERS,
            divergence_bound: DEFAULT_DIVERGENCE_BOUND,
            kkt_tol: DEFAULT_KKT_TOL,
            check_descent: false,
        }
    }
}

impl SolverConfig {
    pub fn with_penalty(&self, eta: f64, lambda: f64) -> SolverConfig {
        SolverConfig {
            eta,
            lambda,
            ..self.clone()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(BrightError::InvalidArgument(format!("eta must be finite and >= 0, got {}", self.eta)));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(BrightError::InvalidArgument(format!("lambda must be finite and > 0, got {}", self.lambda)));
        }
        if !(self.tol_xi > 0.0) {
            return Err(BrightError::InvalidArgument("tol_xi must be > 0".into()));
        }
        if self.max_iters == 0 {
            return Err(BrightError::InvalidArgument("max_iters must be >= 1".into()));
        }
        if !(self.divergence_bound > 0.0) {
            return Err(BrightError::InvalidArgument("divergence_bound must be > 0".into()));
        }
        if !(self.kkt_tol > 0.0) {
            return Err(BrightError::InvalidArgument("kkt_tol must be > 0".into()));
        }
        Ok(())
    }
}

/// Solution for one `(eta, lambda)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub beta_hat: Vec<f64>,
    pub eta: f64,
    pub lambda: f64,
    /// Sweeps performed.
    pub iterations: usize,
    pub converged: bool,
    pub objective: f64,
    pub active_set: Vec<usize>,
    pub kkt_violation: f64,
}

impl FitResult {
    pub fn n_nonzero(&self) -> usize {
        self.active_set.len()
    }
}

fn check_dims(stats: &SummaryStats, ld: &SparseLD, prior: &PriorWeights) -> Result<usize> {
    let p = stats.len();
    if ld.dim() != p || prior.len() != p {
        return Err(BrightError::Dimension(format!(
            "summary statistics have {p} variants, LD {}, prior {}",
            ld.dim(),
            prior.len()
        )));
    }
    Ok(p)
}

/// `q = r + eta * S bt`, the linear term of the objective.
pub fn linear_term(stats: &SummaryStats, ld: &SparseLD, prior: &PriorWeights, eta: f64) -> Result<Vec<f64>> {
    check_dims(stats, ld, prior)?;
    if eta == 0.0 {
        return Ok(stats.r.clone());
    }
    let s_bt = ld.matvec(&prior.beta_tilde)?;
    Ok(stats.r.iter().zip(&s_bt).map(|(r, s)| r + eta * s).collect())
}

fn objective_with_q(beta: &[f64], q: &[f64], ld: &SparseLD, eta: f64, lambda: f64) -> Result<f64> {
    let quad = ld.quad_form(beta)?;
    let lin: f64 = beta.iter().zip(q).map(|(b, q)| b * q).sum();
    let l1: f64 = beta.iter().map(|b| b.abs()).sum();
    Ok(0.5 * (1.0 + eta) * quad - lin + lambda * l1)
}

/// Objective value in its proportional form (constants in the prior
/// dropped), comparable only within one `(r, S, bt)` instance.
pub fn objective(
    beta: &[f64],
    stats: &SummaryStats,
    ld: &SparseLD,
    prior: &PriorWeights,
    eta: f64,
    lambda: f64,
) -> Result<f64> {
    let p = check_dims(stats, ld, prior)?;
    if beta.len() != p {
        return Err(BrightError::Dimension(format!("beta has {} entries for p={p}", beta.len())));
    }
    let q = linear_term(stats, ld, prior, eta)?;
    objective_with_q(beta, &q, ld, eta, lambda)
}

#[inline]
fn update_value(q_j: f64, offdiag: f64, diag: f64, eta: f64, lambda: f64) -> f64 {
    let scale = (1.0 + eta) * diag;
    soft_threshold(q_j / scale - offdiag / diag, lambda / scale)
}

/// One coordinate update for index `j`, reading the other coordinates from
/// `beta` as given (the caller supplies the Gauss-Seidel mix of fresh and
/// stale values).
pub fn coordinate_update(
    j: usize,
    beta: &[f64],
    q_j: f64,
    ld: &SparseLD,
    eta: f64,
    lambda: f64,
) -> Result<f64> {
    if j >= ld.dim() || beta.len() != ld.dim() {
        return Err(BrightError::Dimension(format!(
            "index {j} / beta length {} for p={}",
            beta.len(),
            ld.dim()
        )));
    }
    let diag = ld.diag[j];
    if !(diag > 0.0) {
        return Err(BrightError::NonPositiveDiagonal { index: j, value: diag });
    }
    Ok(update_value(q_j, ld.offdiag_row_dot(j, beta), diag, eta, lambda))
}

/// Largest KKT residual of `beta`:
/// `|g_j + lambda sign(b_j)|` on the support and `max(|g_j| - lambda, 0)`
/// off it, with `g = (1+eta) S b - q`.
pub fn kkt_check(
    beta: &[f64],
    stats: &SummaryStats,
    ld: &SparseLD,
    prior: &PriorWeights,
    eta: f64,
    lambda: f64,
) -> Result<f64> {
    let p = check_dims(stats, ld, prior)?;
    if beta.len() != p {
        return Err(BrightError::Dimension(format!("beta has {} entries for p={p}", beta.len())));
    }
    let q = linear_term(stats, ld, prior, eta)?;
    kkt_with_q(beta, &q, ld, eta, lambda)
}

fn kkt_with_q(beta: &[f64], q: &[f64], ld: &SparseLD, eta: f64, lambda: f64) -> Result<f64> {
    let s_beta = ld.matvec(beta)?;
    Ok(beta
        .iter()
        .zip(&s_beta)
        .zip(q)
        .map(|((&b, &sb), &q)| {
            let g = (1.0 + eta) * sb - q;
            if b != 0.0 {
                (g + lambda * b.signum()).abs()
            } else {
                (g.abs() - lambda).max(0.0)
            }
        })
        .fold(0.0, f64::max))
}

/// Smallest `lambda` at which the zero vector solves the problem:
/// `max_j |r_j + eta * S_j bt|`.
pub fn lambda_max(stats: &SummaryStats, ld: &SparseLD, prior: &PriorWeights, eta: f64) -> Result<f64> {
    let q = linear_term(stats, ld, prior, eta)?;
    Ok(q.iter().map(|v| v.abs()).fold(0.0, f64::max))
}

/// Coordinate-descent state for one fit.
struct Workspace<'a> {
    ld: &'a SparseLD,
    q: &'a [f64],
    eta: f64,
    lambda: f64,
    beta: Vec<f64>,
    /// Off-diagonal product `S_offdiag * beta`.
    offdiag: Vec<f64>,
}

impl<'a> Workspace<'a> {
    fn new(ld: &'a SparseLD, q: &'a [f64], eta: f64, lambda: f64, init: Vec<f64>) -> Self {
        let offdiag = (0..ld.dim()).map(|j| ld.offdiag_row_dot(j, &init)).collect();
        Workspace {
            ld,
            q,
            eta,
            lambda,
            beta: init,
            offdiag,
        }
    }

    /// Updates coordinate `j` in place and returns `|change|`.
    #[inline]
    fn update(&mut self, j: usize) -> f64 {
        let new = update_value(self.q[j], self.offdiag[j], self.ld.diag[j], self.eta, self.lambda);
        let delta = new - self.beta[j];
        if delta != 0.0 {
            self.beta[j] = new;
            let (cols, vals) = self.ld.row_slices(j);
            for (&k, &a) in cols.iter().zip(vals) {
                self.offdiag[k] += a * delta;
            }
        }
        delta.abs()
    }

    fn objective(&self) -> f64 {
        let mut quad = 0.0;
        let mut lin = 0.0;
        let mut l1 = 0.0;
        for (j, &b) in self.beta.iter().enumerate() {
            if b != 0.0 {
                quad += b * (self.ld.diag[j] * b + self.offdiag[j]);
                lin += b * self.q[j];
                l1 += b.abs();
            }
        }
        0.5 * (1.0 + self.eta) * quad - lin + self.lambda * l1
    }
}

/// Minimizes the objective for one `(eta, lambda)`.
///
/// Starts from `init` (zero when absent). The first two sweeps are full;
/// afterwards sweeps run over the current support until they settle, and a
/// full sweep confirms. A fit is converged when a full sweep moves no
/// coordinate by `tol_xi` or more and the KKT violation is within
/// `kkt_tol`.
pub fn fit(
    stats: &SummaryStats,
    ld: &SparseLD,
    prior: &PriorWeights,
    config: &SolverConfig,
    init: Option<&[f64]>,
) -> Result<FitResult> {
    config.validate()?;
    let p = check_dims(stats, ld, prior)?;
    let q = linear_term(stats, ld, prior, config.eta)?;
    fit_with_q(ld, &q, config, init, p)
}

fn fit_with_q(
    ld: &SparseLD,
    q: &[f64],
    config: &SolverConfig,
    init: Option<&[f64]>,
    p: usize,
) -> Result<FitResult> {
    if let Some(j) = ld.diag.iter().position(|&d| !(d > 0.0)) {
        return Err(BrightError::NonPositiveDiagonal {
            index: j,
            value: ld.diag[j],
        });
    }
    let init = match init {
        Some(v) if v.len() != p => {
            return Err(BrightError::Dimension(format!("initial vector has {} entries for p={p}", v.len())))
        }
        Some(v) => v.to_vec(),
        None => vec![0.0; p],
    };
    let (eta, lambda) = (config.eta, config.lambda);
    let mut ws = Workspace::new(ld, q, eta, lambda, init);

    let mut sweeps = 0usize;
    let mut full_sweeps = 0usize;
    let mut need_full = true;
    let mut converged = false;
    let mut last_objective = if config.check_descent { ws.objective() } else { f64::NAN };
    let mut active: Vec<usize> = Vec::new();

    while sweeps < config.max_iters {
        let full = need_full || full_sweeps < FULL_SWEEPS_BEFORE_ACTIVE_SET;
        let mut max_delta = 0.0f64;
        if full {
            for j in 0..p {
                max_delta = max_delta.max(ws.update(j));
            }
        } else {
            active.clear();
            active.extend((0..p).filter(|&j| ws.beta[j] != 0.0));
            for &j in &active {
                max_delta = max_delta.max(ws.update(j));
            }
        }
        sweeps += 1;

        if let Some(index) = ws.beta.iter().position(|b| !(b.abs() <= config.divergence_bound)) {
            return Err(BrightError::Divergence {
                eta,
                lambda,
                index,
                bound: config.divergence_bound,
                sweeps,
            });
        }
        if config.check_descent {
            let current = ws.objective();
            let slack = 1e-10 * (1.0 + last_objective.abs());
            if current > last_objective + slack {
                return Err(BrightError::DescentViolation {
                    sweep: sweeps,
                    before: last_objective,
                    after: current,
                });
            }
            last_objective = current;
        }

        if full {
            full_sweeps += 1;
            if max_delta < config.tol_xi {
                let kkt = kkt_with_q(&ws.beta, q, ld, eta, lambda)?;
                if kkt <= config.kkt_tol {
                    converged = true;
                    break;
                }
                // Settled in beta but not yet stationary: keep sweeping.
                need_full = true;
            } else {
                need_full = false;
            }
        } else if max_delta < config.tol_xi {
            need_full = true;
        }
    }

    if !converged {
        warn!(
            "fit at eta={eta}, lambda={lambda} stopped after {sweeps} sweeps without converging"
        );
    }
    let objective = objective_with_q(&ws.beta, q, ld, eta, lambda)?;
    let kkt_violation = kkt_with_q(&ws.beta, q, ld, eta, lambda)?;
    let beta_hat = ws.beta;
    let active_set = (0..p).filter(|&j| beta_hat[j] != 0.0).collect();
    debug!("fit eta={eta} lambda={lambda}: {sweeps} sweeps, kkt={kkt_violation:.3e}, objective={objective}");
    Ok(FitResult {
        beta_hat,
        eta,
        lambda,
        iterations: sweeps,
        converged,
        objective,
        active_set,
        kkt_violation,
    })
}

/// Geometric grid from `lambda_max` down to `ratio * lambda_max`.
pub fn lambda_grid(lambda_max: f64, count: usize, ratio: f64) -> Vec<f64> {
    // A zero problem still needs a positive penalty.
    let top = if lambda_max > 0.0 { lambda_max } else { f64::MIN_POSITIVE };
    if count == 1 {
        return vec![top];
    }
    let step = ratio.ln() / (count - 1) as f64;
    (0..count)
        .map(|k| if k == 0 { top } else { top * (step * k as f64).exp() })
        .collect()
}

/// Fits the full `(eta, lambda)` grid with warm starts.
///
/// For each `eta` (ascending) the lambda grid runs from `lambda_max(eta)`
/// down to `lambda_min_ratio * lambda_max(eta)`, each fit starting from the
/// previous one. The first fit of each later `eta` starts from the
/// completed solution of the previous `eta` whose lambda is closest (on the
/// log scale) to the new `lambda_max`.
pub fn fit_path(
    stats: &SummaryStats,
    ld: &SparseLD,
    prior: &PriorWeights,
    eta_grid: &[f64],
    lambda_count: usize,
    lambda_min_ratio: f64,
    config: &SolverConfig,
) -> Result<Vec<FitResult>> {
    if eta_grid.is_empty() {
        return Err(BrightError::InvalidArgument("eta grid is empty".into()));
    }
    if eta_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(BrightError::InvalidArgument("eta grid must be strictly ascending".into()));
    }
    if lambda_count == 0 {
        return Err(BrightError::InvalidArgument("lambda count must be >= 1".into()));
    }
    if !(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0) {
        return Err(BrightError::InvalidArgument(format!(
            "lambda_min_ratio must lie in (0, 1), got {lambda_min_ratio}"
        )));
    }
    let p = check_dims(stats, ld, prior)?;
    let mut results: Vec<FitResult> = Vec::with_capacity(eta_grid.len() * lambda_count);
    let mut previous_eta: Option<std::ops::Range<usize>> = None;

    for &eta in eta_grid {
        let q = linear_term(stats, ld, prior, eta)?;
        let top = q.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let lambdas = lambda_grid(top, lambda_count, lambda_min_ratio);
        let start = results.len();
        let mut warm: Option<Vec<f64>> = previous_eta.clone().map(|range| {
            let target = lambdas[0].ln();
            let nearest = range
                .min_by(|&a, &b| {
                    let da = (results[a].lambda.ln() - target).abs();
                    let db = (results[b].lambda.ln() - target).abs();
                    da.total_cmp(&db)
                })
                .expect("non-empty range");
            results[nearest].beta_hat.clone()
        });
        for lambda in lambdas {
            let cfg = config.with_penalty(eta, lambda);
            cfg.validate()?;
            let res = fit_with_q(ld, &q, &cfg, warm.as_deref(), p)?;
            warm = Some(res.beta_hat.clone());
            results.push(res);
        }
        previous_eta = Some(start..results.len());
    }
    Ok(results)
}
