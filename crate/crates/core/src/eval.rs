//! Scoring of fitted models: prediction accuracy, variable selection and
//! the per-variant association table.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{BrightError, Result};
use crate::io::{fmt_f64, write_atomic};
use crate::refpanel::GenotypePanel;
use crate::solver::FitResult;
use crate::sumstats::Scale;

/// Polygenic scores `X beta`. On the standardized scale each column is
/// centered and scaled by its own population standard deviation first.
pub fn predict_prs(panel: &GenotypePanel, beta: &[f64], scale: Scale) -> Result<Vec<f64>> {
    if beta.len() != panel.variant_count() {
        return Err(BrightError::Dimension(format!(
            "beta has {} entries for a panel with {} variants",
            beta.len(),
            panel.variant_count()
        )));
    }
    let support: Vec<usize> = (0..beta.len()).filter(|&j| beta[j] != 0.0).collect();
    let mut scores = vec![0.0; panel.sample_count()];
    if support.is_empty() {
        return Ok(scores);
    }
    let (weights, offset) = match scale {
        Scale::Raw => (support.iter().map(|&j| beta[j]).collect::<Vec<_>>(), 0.0),
        Scale::Standardized => {
            let (means, sds) = panel.column_moments();
            let w: Vec<f64> = support.iter().map(|&j| beta[j] / sds[j]).collect();
            let off: f64 = support.iter().zip(&w).map(|(&j, w)| w * means[j]).sum();
            (w, off)
        }
    };
    for (i, row) in panel.data.rows().into_iter().enumerate() {
        let mut s = 0.0;
        for (&j, &w) in support.iter().zip(&weights) {
            s += row[j] * w;
        }
        scores[i] = s - offset;
    }
    Ok(scores)
}

/// Squared Pearson correlation; zero when either vector is constant.
pub fn r_squared(pred: &[f64], y: &[f64]) -> Result<f64> {
    if pred.len() != y.len() {
        return Err(BrightError::Dimension(format!(
            "{} predictions for {} outcomes",
            pred.len(),
            y.len()
        )));
    }
    let n = pred.len() as f64;
    let mp = pred.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in pred.iter().zip(y) {
        let (da, db) = (a - mp, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(0.0);
    }
    Ok(((sxy * sxy) / (sxx * syy)).min(1.0))
}

/// Mann-Whitney AUC with mid-ranks for ties. Labels must be 0 or 1 with
/// both classes present.
pub fn auc(scores: &[f64], labels: &[f64]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(BrightError::Dimension(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if let Some(bad) = labels.iter().find(|&&l| l != 0.0 && l != 1.0) {
        return Err(BrightError::InvalidArgument(format!("labels must be 0 or 1, found {bad}")));
    }
    let positives = labels.iter().filter(|&&l| l == 1.0).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(BrightError::InvalidArgument("AUC needs both classes present".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // ranks start..end (0-based) share the mid-rank
        let mid = (start + end + 1) as f64 / 2.0;
        rank_sum += order[start..end].iter().filter(|&&i| labels[i] == 1.0).count() as f64 * mid;
        start = end;
    }
    let (np, nn) = (positives as f64, negatives as f64);
    Ok((rank_sum - np * (np + 1.0) / 2.0) / (np * nn))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionMetrics {
    pub tpr: f64,
    pub fpr: f64,
    pub fnr: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
}

/// Confusion counts of a selected set against the true support.
pub fn selection_metrics(active_set: &[usize], s0: &[usize], p: usize) -> SelectionMetrics {
    let truth: HashSet<usize> = s0.iter().copied().collect();
    let chosen: HashSet<usize> = active_set.iter().copied().collect();
    let tp = chosen.intersection(&truth).count();
    let fp = chosen.len() - tp;
    let fnc = truth.len() - tp;
    let tn = p - tp - fp - fnc;
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    SelectionMetrics {
        tpr: ratio(tp, tp + fnc),
        fpr: ratio(fp, fp + tn),
        fnr: ratio(fnc, tp + fnc),
        true_positives: tp,
        false_positives: fp,
        false_negatives: fnc,
        true_negatives: tn,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub eta: f64,
    pub lambda: f64,
    pub fpr: f64,
    pub tpr: f64,
}

/// One `(lambda, fpr, tpr)` row per fit, sorted by lambda descending.
pub fn fpr_tpr_curve(path: &[FitResult], s0: &[usize], p: usize) -> Vec<CurvePoint> {
    let mut rows: Vec<CurvePoint> = path
        .iter()
        .map(|fit| {
            let m = selection_metrics(&fit.active_set, s0, p);
            CurvePoint {
                eta: fit.eta,
                lambda: fit.lambda,
                fpr: m.fpr,
                tpr: m.tpr,
            }
        })
        .collect();
    rows.sort_by(|a, b| b.lambda.total_cmp(&a.lambda));
    rows
}

/// FPR of the first curve point (largest lambda) whose TPR reaches
/// `target`; `None` when the curve never gets there.
pub fn fpr_at_tpr(curve: &[CurvePoint], target: f64) -> Option<f64> {
    curve.iter().find(|c| c.tpr >= target - 1e-12).map(|c| c.fpr)
}

pub fn write_curve_csv(path: &Path, curve: &[CurvePoint]) -> Result<()> {
    let mut out = String::from("eta,lambda,fpr,tpr\n");
    for c in curve {
        let _ = writeln!(out, "{},{},{},{}", fmt_f64(c.eta), fmt_f64(c.lambda), fmt_f64(c.fpr), fmt_f64(c.tpr));
    }
    write_atomic(path, out.as_bytes())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionStatus {
    TruePositive,
    FalsePositive,
    FalseNegative,
    TrueNegative,
}

impl SelectionStatus {
    pub fn label(self) -> &'static str {
        match self {
            SelectionStatus::TruePositive => "TP",
            SelectionStatus::FalsePositive => "FP",
            SelectionStatus::FalseNegative => "FN",
            SelectionStatus::TrueNegative => "TN",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManhattanRow {
    pub variant_id: String,
    pub p_value: f64,
    pub neg_log10_p: f64,
    pub status: SelectionStatus,
}

/// Two-sided p-value of a marginal regression t-statistic on `n - 2`
/// degrees of freedom.
pub fn two_sided_p_value(t_stat: f64, sample_n: usize) -> Result<f64> {
    if sample_n < 3 {
        return Err(BrightError::InvalidArgument(format!("sample size {sample_n} < 3")));
    }
    let dist = StudentsT::new(0.0, 1.0, (sample_n - 2) as f64)
        .map_err(|e| BrightError::InvalidArgument(e.to_string()))?;
    Ok((2.0 * dist.sf(t_stat.abs())).min(1.0))
}

/// Per-variant `-log10(p)` with selection status against the truth.
pub fn manhattan_table(
    variant_ids: &[String],
    t_stats: &[f64],
    sample_sizes: &[usize],
    active_set: &[usize],
    s0: &[usize],
) -> Result<Vec<ManhattanRow>> {
    if variant_ids.len() != t_stats.len() || t_stats.len() != sample_sizes.len() {
        return Err(BrightError::Dimension("manhattan inputs differ in length".into()));
    }
    let chosen: HashSet<usize> = active_set.iter().copied().collect();
    let truth: HashSet<usize> = s0.iter().copied().collect();
    variant_ids
        .iter()
        .enumerate()
        .map(|(j, id)| {
            let p_value = two_sided_p_value(t_stats[j], sample_sizes[j])?;
            let status = match (chosen.contains(&j), truth.contains(&j)) {
                (true, true) => SelectionStatus::TruePositive,
                (true, false) => SelectionStatus::FalsePositive,
                (false, true) => SelectionStatus::FalseNegative,
                (false, false) => SelectionStatus::TrueNegative,
            };
            Ok(ManhattanRow {
                variant_id: id.clone(),
                p_value,
                neg_log10_p: -(p_value.max(f64::MIN_POSITIVE)).log10() + 0.0,
                status,
            })
        })
        .collect()
}

pub fn write_manhattan_csv(path: &Path, rows: &[ManhattanRow]) -> Result<()> {
    let mut out = String::from("variant_id,p_value,neg_log10_p,status\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.variant_id,
            fmt_f64(r.p_value),
            fmt_f64(r.neg_log10_p),
            r.status.label()
        );
    }
    write_atomic(path, out.as_bytes())
}

/// `(b - b0)' Sigma (b - b0)` against the known population covariance.
pub fn empirical_excess_risk(beta_hat: &[f64], beta0: &[f64], sigma_true: &Array2<f64>) -> Result<f64> {
    let p = beta0.len();
    if beta_hat.len() != p || sigma_true.dim() != (p, p) {
        return Err(BrightError::Dimension(format!(
            "beta_hat {}, beta0 {p}, sigma {:?}",
            beta_hat.len(),
            sigma_true.dim()
        )));
    }
    let diff: Vec<(usize, f64)> = beta_hat
        .iter()
        .zip(beta0)
        .enumerate()
        .filter_map(|(j, (a, b))| (a != b).then_some((j, a - b)))
        .collect();
    let mut total = 0.0;
    for &(i, di) in &diff {
        for &(j, dj) in &diff {
            total += di * sigma_true[[i, j]] * dj;
        }
    }
    Ok(total.max(0.0))
}
