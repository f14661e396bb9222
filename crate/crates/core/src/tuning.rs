//! Selection of `(eta, lambda)`.
//!
//! Two routes: a lasso-style BIC computed from summary data alone, or a
//! predictive score on a held-out individual-level sample.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{BrightError, Result};
use crate::eval::{auc, predict_prs, r_squared};
use crate::io::{fmt_f64, write_atomic};
use crate::refpanel::{GenotypePanel, SparseLD};
use crate::solver::FitResult;
use crate::sumstats::{Scale, SummaryStats};

/// Lower clamp on the RSS proxy, relative to `y'y / n`.
const RSS_FLOOR: f64 = 1e-8;

pub const DEFAULT_ETA_GRID: [f64; 9] = [0.0, 0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    PenalizedBic,
    ValidationR2,
    ValidationAuc,
}

impl Criterion {
    pub fn minimizes(self) -> bool {
        matches!(self, Criterion::PenalizedBic)
    }

    pub fn name(self) -> &'static str {
        match self {
            Criterion::PenalizedBic => "penalized_bic",
            Criterion::ValidationR2 => "validation_r2",
            Criterion::ValidationAuc => "validation_auc",
        }
    }
}

impl std::str::FromStr for Criterion {
    type Err = BrightError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bic" | "penalized_bic" => Ok(Criterion::PenalizedBic),
            "r2" | "validation_r2" => Ok(Criterion::ValidationR2),
            "auc" | "validation_auc" => Ok(Criterion::ValidationAuc),
            other => Err(BrightError::InvalidArgument(format!(
                "unknown criterion '{other}' (expected bic, r2 or auc)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreKind {
    R2,
    Auc,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunePoint {
    pub eta: f64,
    pub lambda: f64,
    pub score: f64,
    pub n_nonzero: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneReport {
    pub grid: Vec<TunePoint>,
    pub best_index: usize,
    pub best_eta: f64,
    pub best_lambda: f64,
    pub criterion: Criterion,
}

impl TuneReport {
    pub fn best(&self) -> &TunePoint {
        &self.grid[self.best_index]
    }

    pub fn summary_line(&self) -> String {
        let b = self.best();
        format!(
            "best eta={} lambda={} {}={} n_nonzero={}",
            fmt_f64(b.eta),
            fmt_f64(b.lambda),
            self.criterion.name(),
            fmt_f64(b.score),
            b.n_nonzero
        )
    }

    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("eta\tlambda\tscore\tn_nonzero\tselected\n");
        for (k, g) in self.grid.iter().enumerate() {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                fmt_f64(g.eta),
                fmt_f64(g.lambda),
                fmt_f64(g.score),
                g.n_nonzero,
                u8::from(k == self.best_index)
            );
        }
        write_atomic(path, out.as_bytes())
    }
}

/// `n log(RSS / n) + |A| log n` with the summary-data proxy
/// `RSS = n (y'y/n - 2 b'r + b'S b)`.
pub fn penalized_bic(fit: &FitResult, stats: &SummaryStats, ld: &SparseLD, sample_n: usize) -> Result<f64> {
    penalized_bic_beta(&fit.beta_hat, fit.active_set.len(), stats, ld, sample_n)
}

/// Like [`penalized_bic`], but `+inf` when the RSS proxy sits at its floor.
///
/// A clamped proxy means the reference LD no longer supports the fit (the
/// proxy went non-positive), so the score carries no information and the
/// point is not admissible for selection.
pub fn admissible_bic(fit: &FitResult, stats: &SummaryStats, ld: &SparseLD, sample_n: usize) -> Result<f64> {
    let (score, clamped) = bic_parts(&fit.beta_hat, fit.active_set.len(), stats, ld, sample_n)?;
    Ok(if clamped { f64::INFINITY } else { score })
}

pub(crate) fn penalized_bic_beta(
    beta: &[f64],
    n_nonzero: usize,
    stats: &SummaryStats,
    ld: &SparseLD,
    sample_n: usize,
) -> Result<f64> {
    bic_parts(beta, n_nonzero, stats, ld, sample_n).map(|(score, _)| score)
}

fn bic_parts(
    beta: &[f64],
    n_nonzero: usize,
    stats: &SummaryStats,
    ld: &SparseLD,
    sample_n: usize,
) -> Result<(f64, bool)> {
    if sample_n < 2 {
        return Err(BrightError::InvalidArgument(format!("BIC needs n >= 2, got {sample_n}")));
    }
    if beta.len() != stats.len() || ld.dim() != stats.len() {
        return Err(BrightError::Dimension("BIC inputs differ in dimension".into()));
    }
    let second_moment = match (stats.scale, stats.outcome_second_moment) {
        (Scale::Standardized, _) => 1.0,
        (Scale::Raw, Some(m)) => m,
        (Scale::Raw, None) => {
            return Err(BrightError::Criterion(
                "penalized BIC on raw-scale statistics needs the outcome mean and variance (var_y)".into(),
            ))
        }
    };
    let n = sample_n as f64;
    let cross: f64 = beta.iter().zip(&stats.r).map(|(b, r)| b * r).sum();
    let quad = ld.quad_form(beta)?;
    let floor = RSS_FLOOR * second_moment;
    let proxy = second_moment - 2.0 * cross + quad;
    let rss_over_n = proxy.max(floor);
    Ok((n * rss_over_n.ln() + n_nonzero as f64 * n.ln(), proxy <= floor))
}

/// Predictive score of `beta` on held-out genotypes and outcomes.
pub fn validation_score(
    beta: &[f64],
    genotypes: &GenotypePanel,
    outcomes: &[f64],
    kind: ScoreKind,
    scale: Scale,
) -> Result<f64> {
    if outcomes.len() != genotypes.sample_count() {
        return Err(BrightError::Dimension(format!(
            "{} outcomes for {} samples",
            outcomes.len(),
            genotypes.sample_count()
        )));
    }
    let scores = predict_prs(genotypes, beta, scale)?;
    match kind {
        ScoreKind::R2 => r_squared(&scores, outcomes),
        ScoreKind::Auc => auc(&scores, outcomes),
    }
}

/// Picks the best grid point: minimum for BIC, maximum otherwise. Exact
/// ties go to the smaller `eta`, then the larger `lambda`. NaN scores never
/// win.
pub fn select(grid: Vec<TunePoint>, criterion: Criterion) -> Result<TuneReport> {
    if grid.is_empty() {
        return Err(BrightError::InvalidArgument("cannot select from an empty grid".into()));
    }
    let better = |a: &TunePoint, b: &TunePoint| -> bool {
        // is `a` strictly preferred over `b`?
        match (a.score.is_nan(), b.score.is_nan()) {
            (true, _) => return false,
            (false, true) => return true,
            _ => {}
        }
        if a.score != b.score {
            return if criterion.minimizes() {
                a.score < b.score
            } else {
                a.score > b.score
            };
        }
        if a.eta != b.eta {
            return a.eta < b.eta;
        }
        a.lambda > b.lambda
    };
    let mut best = 0;
    for k in 1..grid.len() {
        if better(&grid[k], &grid[best]) {
            best = k;
        }
    }
    Ok(TuneReport {
        best_eta: grid[best].eta,
        best_lambda: grid[best].lambda,
        best_index: best,
        grid,
        criterion,
    })
}

/// Held-out data for the validation criteria.
pub struct Validation<'a> {
    pub genotypes: &'a GenotypePanel,
    pub outcomes: &'a [f64],
}

/// Scores every fit of a path and selects. BIC points whose RSS proxy is
/// clamped score `+inf`. Scoring runs in parallel; the
/// result does not depend on the thread count.
pub fn tune_path(
    fits: &[FitResult],
    criterion: Criterion,
    stats: &SummaryStats,
    ld: &SparseLD,
    validation: Option<&Validation<'_>>,
) -> Result<TuneReport> {
    let scores: Vec<f64> = fits
        .par_iter()
        .map(|fit| match criterion {
            Criterion::PenalizedBic => admissible_bic(fit, stats, ld, stats.sample_n),
            Criterion::ValidationR2 | Criterion::ValidationAuc => {
                let v = validation.ok_or_else(|| {
                    BrightError::Criterion(format!("{} needs a validation panel and outcomes", criterion.name()))
                })?;
                let kind = if criterion == Criterion::ValidationR2 { ScoreKind::R2 } else { ScoreKind::Auc };
                validation_score(&fit.beta_hat, v.genotypes, v.outcomes, kind, stats.scale)
            }
        })
        .collect::<Result<_>>()?;
    let grid = fits
        .iter()
        .zip(scores)
        .map(|(f, score)| TunePoint {
            eta: f.eta,
            lambda: f.lambda,
            score,
            n_nonzero: f.n_nonzero(),
        })
        .collect();
    select(grid, criterion)
}
