//! Alignment of summary statistics, LD and prior onto one variant set.

use std::collections::HashMap;

use crate::error::{BrightError, Result};
use crate::refpanel::SparseLD;
use crate::solver::PriorWeights;
use crate::sumstats::SummaryStats;

/// Inputs restricted to a common, identically ordered variant set.
#[derive(Debug, Clone)]
pub struct Aligned {
    pub stats: SummaryStats,
    pub ld: SparseLD,
    pub prior: PriorWeights,
    /// Variants of the summary file that were dropped.
    pub dropped: usize,
}

/// Aligns by variant id.
///
/// Without `allow_subset` all three id lists must be identical, in the
/// same order. With it, the working set is the intersection of the summary
/// and LD ids in summary order (the LD order must agree so the band
/// survives), and prior entries missing for a working variant are zero.
pub fn align(stats: &SummaryStats, ld: &SparseLD, prior: &PriorWeights, allow_subset: bool) -> Result<Aligned> {
    if !allow_subset {
        if let Some(k) = first_mismatch(&stats.variant_ids, &ld.variant_ids) {
            return Err(BrightError::Alignment(format!(
                "summary statistics and LD differ at position {k} ({}); pass --allow-subset to use the intersection",
                describe(&stats.variant_ids, &ld.variant_ids, k)
            )));
        }
        if let Some(k) = first_mismatch(&stats.variant_ids, &prior.variant_ids) {
            return Err(BrightError::Alignment(format!(
                "summary statistics and prior differ at position {k} ({}); pass --allow-subset to use the intersection",
                describe(&stats.variant_ids, &prior.variant_ids, k)
            )));
        }
        return Ok(Aligned {
            stats: stats.clone(),
            ld: ld.clone(),
            prior: prior.clone(),
            dropped: 0,
        });
    }

    let ld_pos: HashMap<&str, usize> = ld
        .variant_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let mut stat_keep = Vec::new();
    let mut ld_keep = Vec::new();
    for (i, id) in stats.variant_ids.iter().enumerate() {
        if let Some(&j) = ld_pos.get(id.as_str()) {
            if let Some(&last) = ld_keep.last() {
                if j <= last {
                    return Err(BrightError::Alignment(format!(
                        "variant '{id}' appears in a different order in the LD matrix"
                    )));
                }
            }
            stat_keep.push(i);
            ld_keep.push(j);
        }
    }
    if stat_keep.is_empty() {
        return Err(BrightError::Alignment("no shared variants between summary statistics and LD".into()));
    }
    let stats_sub = stats.select(&stat_keep);
    let ld_sub = ld.subset(&ld_keep)?;
    let prior_map: HashMap<&str, f64> = prior
        .variant_ids
        .iter()
        .map(String::as_str)
        .zip(prior.beta_tilde.iter().copied())
        .collect();
    let beta_tilde = stats_sub
        .variant_ids
        .iter()
        .map(|id| prior_map.get(id.as_str()).copied().unwrap_or(0.0))
        .collect();
    let prior_sub = PriorWeights::new(stats_sub.variant_ids.clone(), beta_tilde)?;
    Ok(Aligned {
        dropped: stats.len() - stats_sub.len(),
        stats: stats_sub,
        ld: ld_sub,
        prior: prior_sub,
    })
}

fn first_mismatch(a: &[String], b: &[String]) -> Option<usize> {
    if let Some(k) = a.iter().zip(b).position(|(x, y)| x != y) {
        return Some(k);
    }
    (a.len() != b.len()).then(|| a.len().min(b.len()))
}

fn describe(a: &[String], b: &[String], k: usize) -> String {
    let show = |v: &[String]| v.get(k).map(|s| format!("'{s}'")).unwrap_or_else(|| "end of list".into());
    format!("{} vs {}", show(a), show(b))
}
