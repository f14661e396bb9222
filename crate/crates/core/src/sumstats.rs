//! GWAS marginal-association summaries and recovery of the inner-product
//! vector `r` used by the objective.
//!
//! A GWAS file reports, per variant, the t-statistic of the slope in the
//! marginal simple linear regression `y = a_j + X_j b_j + e`. The sample
//! correlation between `X_j` and `y` is a function of `t` and `n` alone, so
//! the standardized `r` is always recoverable. When the column and outcome
//! means and variances are also released, the raw inner product `X_j' y` can
//! be rebuilt as well.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use crate::error::{BrightError, Result};
use crate::io::{fmt_f64, read_to_string, write_atomic};

/// Scale on which `r` is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scale {
    /// Correlations between standardized genotypes and standardized outcome.
    Standardized,
    /// `X'y / n` on the original genotype and outcome scale.
    Raw,
}

impl std::str::FromStr for Scale {
    type Err = BrightError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standardized" | "std" => Ok(Scale::Standardized),
            "raw" => Ok(Scale::Raw),
            other => Err(BrightError::InvalidArgument(format!(
                "unknown scale '{other}' (expected 'standardized' or 'raw')"
            ))),
        }
    }
}

impl std::fmt::Display for Scale {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scale::Standardized => f.write_str("standardized"),
            Scale::Raw => f.write_str("raw"),
        }
    }
}

/// One row of a GWAS summary file.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantRecord {
    pub variant_id: String,
    pub t_stat: f64,
    pub sample_n: usize,
    pub mean_x: Option<f64>,
    pub var_x: Option<f64>,
    pub mean_y: Option<f64>,
    pub var_y: Option<f64>,
}

impl VariantRecord {
    pub fn new(variant_id: impl Into<String>, t_stat: f64, sample_n: usize) -> Self {
        VariantRecord {
            variant_id: variant_id.into(),
            t_stat,
            sample_n,
            mean_x: None,
            var_x: None,
            mean_y: None,
            var_y: None,
        }
    }

    fn malformed(&self, message: impl Into<String>) -> BrightError {
        BrightError::MalformedRecord {
            variant: self.variant_id.clone(),
            message: message.into(),
        }
    }

    /// Sample correlation of the variant with the outcome.
    pub fn standardized_r(&self) -> Result<f64> {
        standardized_r_from_t(self.t_stat, self.sample_n).map_err(|e| self.malformed(e.to_string()))
    }

    /// The raw inner product `X_j' y`; needs all four moment fields.
    pub fn raw_inner_product(&self) -> Result<f64> {
        let r_prime = self.standardized_r()?;
        let (Some(mean_x), Some(var_x), Some(mean_y), Some(var_y)) =
            (self.mean_x, self.var_x, self.mean_y, self.var_y)
        else {
            return Err(self.malformed("raw scale needs mean_x, var_x, mean_y and var_y"));
        };
        raw_r_from_standardized(r_prime, self.sample_n, var_x, var_y, mean_x, mean_y)
            .map_err(|e| self.malformed(e.to_string()))
    }
}

/// `t / sqrt(t^2 + n - 2)`: the sample correlation implied by a marginal
/// regression t-statistic. Always strictly inside (-1, 1) for finite `t`.
pub fn standardized_r_from_t(t_stat: f64, sample_n: usize) -> Result<f64> {
    if !t_stat.is_finite() {
        return Err(BrightError::InvalidArgument(format!(
            "t-statistic must be finite, got {t_stat}"
        )));
    }
    if sample_n < 3 {
        return Err(BrightError::InvalidArgument(format!(
            "sample size must be at least 3, got {sample_n}"
        )));
    }
    let dof = (sample_n - 2) as f64;
    Ok(t_stat / (t_stat * t_stat + dof).sqrt())
}

/// Rebuilds `X_j' y` from the standardized correlation and the released
/// moments. Variances use the `n - 1` divisor.
pub fn raw_r_from_standardized(
    r_prime: f64,
    sample_n: usize,
    var_x: f64,
    var_y: f64,
    mean_x: f64,
    mean_y: f64,
) -> Result<f64> {
    if !(var_x > 0.0) || !(var_y > 0.0) {
        return Err(BrightError::InvalidArgument(format!(
            "variances must be strictly positive (var_x={var_x}, var_y={var_y})"
        )));
    }
    let n = sample_n as f64;
    Ok((n - 1.0) * r_prime * (var_x * var_y).sqrt() + n * mean_x * mean_y)
}

/// Summary statistics for the target population, ready for the solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub variant_ids: Vec<String>,
    /// Standardized: correlations. Raw: `X'y / n`.
    pub r: Vec<f64>,
    pub scale: Scale,
    /// Smallest per-variant GWAS sample size.
    pub sample_n: usize,
    /// Per-variant t-statistics, kept for p-value reporting.
    pub t_stats: Vec<f64>,
    /// Per-variant sample sizes.
    pub sample_sizes: Vec<usize>,
    /// `y'y / n`; exactly 1 on the standardized scale, derived from the
    /// outcome moments on the raw scale when they are present.
    pub outcome_second_moment: Option<f64>,
}

impl SummaryStats {
    pub fn from_records(records: &[VariantRecord], scale: Scale) -> Result<Self> {
        if records.is_empty() {
            return Err(BrightError::NoVariants);
        }
        let mut seen = HashSet::with_capacity(records.len());
        let mut r = Vec::with_capacity(records.len());
        for rec in records {
            if !seen.insert(rec.variant_id.as_str()) {
                return Err(BrightError::DuplicateVariant(rec.variant_id.clone()));
            }
            let value = match scale {
                Scale::Standardized => rec.standardized_r()?,
                Scale::Raw => rec.raw_inner_product()? / rec.sample_n as f64,
            };
            if !value.is_finite() {
                return Err(rec.malformed("recovered r is not finite"));
            }
            r.push(value);
        }
        let outcome_second_moment = match scale {
            Scale::Standardized => Some(1.0),
            Scale::Raw => {
                let first = &records[0];
                match (first.mean_y, first.var_y) {
                    (Some(m), Some(v)) => {
                        let n = first.sample_n as f64;
                        Some((n - 1.0) / n * v + m * m)
                    }
                    _ => None,
                }
            }
        };
        Ok(SummaryStats {
            variant_ids: records.iter().map(|r| r.variant_id.clone()).collect(),
            r,
            scale,
            sample_n: records.iter().map(|r| r.sample_n).min().unwrap_or(0),
            t_stats: records.iter().map(|r| r.t_stat).collect(),
            sample_sizes: records.iter().map(|r| r.sample_n).collect(),
            outcome_second_moment,
        })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Restricts to the given positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> SummaryStats {
        SummaryStats {
            variant_ids: positions.iter().map(|&i| self.variant_ids[i].clone()).collect(),
            r: positions.iter().map(|&i| self.r[i]).collect(),
            scale: self.scale,
            sample_n: self.sample_n,
            t_stats: positions.iter().map(|&i| self.t_stats[i]).collect(),
            sample_sizes: positions.iter().map(|&i| self.sample_sizes[i]).collect(),
            outcome_second_moment: self.outcome_second_moment,
        }
    }
}

/// Column names used to locate fields in a summary file header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumstatsSchema {
    pub variant_id: String,
    pub t_stat: String,
    pub n: String,
    pub mean_x: String,
    pub var_x: String,
    pub mean_y: String,
    pub var_y: String,
}

impl Default for SumstatsSchema {
    fn default() -> Self {
        SumstatsSchema {
            variant_id: "variant_id".into(),
            t_stat: "t_stat".into(),
            n: "n".into(),
            mean_x: "mean_x".into(),
            var_x: "var_x".into(),
            mean_y: "mean_y".into(),
            var_y: "var_y".into(),
        }
    }
}

impl SumstatsSchema {
    /// Parses overrides of the form `variant_id=SNP,t_stat=T,n=N`.
    pub fn parse_overrides(spec: &str) -> Result<Self> {
        let mut schema = SumstatsSchema::default();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(|| {
                BrightError::InvalidArgument(format!("column mapping '{part}' is not key=value"))
            })?;
            let slot = match key.trim() {
                "variant_id" => &mut schema.variant_id,
                "t_stat" => &mut schema.t_stat,
                "n" => &mut schema.n,
                "mean_x" => &mut schema.mean_x,
                "var_x" => &mut schema.var_x,
                "mean_y" => &mut schema.mean_y,
                "var_y" => &mut schema.var_y,
                other => {
                    return Err(BrightError::InvalidArgument(format!(
                        "unknown logical column '{other}'"
                    )))
                }
            };
            *slot = value.trim().to_string();
        }
        Ok(schema)
    }
}

/// Reads GWAS records from a tab-separated file with a header row.
pub fn read_records(path: &Path, schema: &SumstatsSchema, scale: Scale) -> Result<Vec<VariantRecord>> {
    let text = read_to_string(path)?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((_, header)) = lines.next() else {
        return Err(BrightError::NoVariants);
    };
    let columns: HashMap<&str, usize> = header
        .split('\t')
        .enumerate()
        .map(|(i, name)| (name.trim(), i))
        .collect();
    let required = |name: &str| -> Result<usize> {
        columns
            .get(name)
            .copied()
            .ok_or_else(|| BrightError::MissingColumn(name.to_string()))
    };
    let id_col = required(&schema.variant_id)?;
    let t_col = required(&schema.t_stat)?;
    let n_col = required(&schema.n)?;
    let moment_cols = match scale {
        Scale::Raw => Some([
            required(&schema.mean_x)?,
            required(&schema.var_x)?,
            required(&schema.mean_y)?,
            required(&schema.var_y)?,
        ]),
        Scale::Standardized => None,
    };

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (lineno, line) in lines {
        let lineno = lineno + 1;
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let field = |col: usize| -> Result<&str> {
            fields.get(col).copied().ok_or_else(|| {
                BrightError::parse(path, lineno, format!("expected at least {} fields", col + 1))
            })
        };
        let number = |col: usize| -> Result<f64> {
            let raw = field(col)?;
            raw.parse::<f64>()
                .map_err(|_| BrightError::parse(path, lineno, format!("cannot parse '{raw}' as a number")))
        };
        let id = field(id_col)?.to_string();
        if id.is_empty() {
            return Err(BrightError::parse(path, lineno, "empty variant id"));
        }
        if !seen.insert(id.clone()) {
            return Err(BrightError::DuplicateVariant(id));
        }
        let t_stat = number(t_col)?;
        let n_raw = field(n_col)?;
        let sample_n = n_raw
            .parse::<usize>()
            .or_else(|_| {
                // Some tools write integral sample sizes as floats.
                n_raw
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.fract() == 0.0 && *v >= 0.0)
                    .map(|v| v as usize)
                    .ok_or(())
            })
            .map_err(|_| BrightError::parse(path, lineno, format!("cannot parse sample size '{n_raw}'")))?;
        let mut rec = VariantRecord::new(id, t_stat, sample_n);
        if let Some([mx, vx, my, vy]) = moment_cols {
            rec.mean_x = Some(number(mx)?);
            rec.var_x = Some(number(vx)?);
            rec.mean_y = Some(number(my)?);
            rec.var_y = Some(number(vy)?);
        }
        // Validate eagerly so the error carries the line number.
        let check = match scale {
            Scale::Standardized => rec.standardized_r().map(|_| ()),
            Scale::Raw => rec.raw_inner_product().map(|_| ()),
        };
        check.map_err(|e| BrightError::parse(path, lineno, e.to_string()))?;
        records.push(rec);
    }
    if records.is_empty() {
        return Err(BrightError::NoVariants);
    }
    Ok(records)
}

/// Loads a summary file and recovers `r` on the requested scale.
pub fn load_sumstats(path: &Path, schema: &SumstatsSchema, scale: Scale) -> Result<SummaryStats> {
    let records = read_records(path, schema, scale)?;
    SummaryStats::from_records(&records, scale)
}

/// Writes records with the default column names. Moment columns are
/// written when every record carries them.
pub fn write_records(path: &Path, records: &[VariantRecord]) -> Result<()> {
    let with_moments = records
        .iter()
        .all(|r| r.mean_x.is_some() && r.var_x.is_some() && r.mean_y.is_some() && r.var_y.is_some());
    let mut out = String::from("variant_id\tt_stat\tn");
    if with_moments {
        out.push_str("\tmean_x\tvar_x\tmean_y\tvar_y");
    }
    out.push('\n');
    for rec in records {
        out.push_str(&rec.variant_id);
        out.push('\t');
        out.push_str(&fmt_f64(rec.t_stat));
        out.push('\t');
        out.push_str(&rec.sample_n.to_string());
        if with_moments {
            for v in [rec.mean_x, rec.var_x, rec.mean_y, rec.var_y] {
                out.push('\t');
                out.push_str(&fmt_f64(v.unwrap_or(f64::NAN)));
            }
        }
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write as _;

    fn tsv(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn zero_t_gives_zero_r() {
        assert_eq!(standardized_r_from_t(0.0, 100).unwrap(), 0.0);
    }

    #[test]
    fn smallest_sample_size() {
        let r = standardized_r_from_t(1.0, 3).unwrap();
        assert!((r - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(standardized_r_from_t(f64::NAN, 10).is_err());
        assert!(standardized_r_from_t(f64::INFINITY, 10).is_err());
        assert!(standardized_r_from_t(1.0, 2).is_err());
        let rec = VariantRecord::new("rs9", f64::NAN, 50);
        let err = rec.standardized_r().unwrap_err().to_string();
        assert!(err.contains("rs9"), "{err}");
    }

    #[test]
    fn raw_recovery_hand_values() {
        assert_eq!(raw_r_from_standardized(0.5, 11, 1.0, 1.0, 0.0, 0.0).unwrap(), 5.0);
        assert_eq!(raw_r_from_standardized(0.0, 10, 2.0, 3.0, 1.0, 1.0).unwrap(), 10.0);
        assert!(raw_r_from_standardized(0.1, 10, 0.0, 1.0, 0.0, 0.0).is_err());
        assert!(raw_r_from_standardized(0.1, 10, 1.0, -1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn loads_three_rows() {
        let f = tsv("variant_id\tt_stat\tn\nrs1\t2.0\t102\nrs2\t-1.5\t102\nrs3\t0\t102\n");
        let stats = load_sumstats(f.path(), &SumstatsSchema::default(), Scale::Standardized).unwrap();
        assert_eq!(stats.variant_ids, vec!["rs1", "rs2", "rs3"]);
        let expect = [2.0 / (4.0f64 + 100.0).sqrt(), -1.5 / (2.25f64 + 100.0).sqrt(), 0.0];
        for (got, want) in stats.r.iter().zip(expect) {
            assert!((got - want).abs() < 1e-15);
        }
        assert_eq!(stats.sample_n, 102);
        assert_eq!(stats.outcome_second_moment, Some(1.0));
    }

    #[test]
    fn custom_column_names() {
        let f = tsv("SNP\tBETA\tT\tN\nrs1\t0.1\t3.0\t50\n");
        let schema = SumstatsSchema::parse_overrides("variant_id=SNP, t_stat=T,n=N").unwrap();
        let stats = load_sumstats(f.path(), &schema, Scale::Standardized).unwrap();
        assert_eq!(stats.len(), 1);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let f = tsv("variant_id\tt_stat\tn\nrs1\t2.0\t10\nrs1\t1.0\t10\n");
        let err = load_sumstats(f.path(), &SumstatsSchema::default(), Scale::Standardized).unwrap_err();
        assert!(matches!(&err, BrightError::DuplicateVariant(id) if id == "rs1"), "{err}");
    }

    #[test]
    fn header_only_is_no_variants() {
        let f = tsv("variant_id\tt_stat\tn\n");
        let err = load_sumstats(f.path(), &SumstatsSchema::default(), Scale::Standardized).unwrap_err();
        assert_eq!(err.to_string(), "no variants");
    }

    #[test]
    fn missing_column_and_bad_row() {
        let f = tsv("variant_id\tt_stat\nrs1\t2.0\n");
        let err = load_sumstats(f.path(), &SumstatsSchema::default(), Scale::Standardized).unwrap_err();
        assert!(matches!(err, BrightError::MissingColumn(ref c) if c == "n"));

        let f = tsv("variant_id\tt_stat\tn\nrs1\t2.0\t10\nrs2\tabc\t10\n");
        let err = load_sumstats(f.path(), &SumstatsSchema::default(), Scale::Standardized).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");

        let f = tsv("variant_id\tt_stat\tn\nrs1\t2.0\t10\n");
        let err = load_sumstats(f.path(), &SumstatsSchema::default(), Scale::Raw).unwrap_err();
        assert!(matches!(err, BrightError::MissingColumn(ref c) if c == "mean_x"));
    }

    #[test]
    fn raw_scale_divides_by_n() {
        let f = tsv(
            "variant_id\tt_stat\tn\tmean_x\tvar_x\tmean_y\tvar_y\nrs1\t0\t10\t1\t2\t1\t3\n",
        );
        let stats = load_sumstats(f.path(), &SumstatsSchema::default(), Scale::Raw).unwrap();
        assert_eq!(stats.r, vec![1.0]);
        let m2 = stats.outcome_second_moment.unwrap();
        assert!((m2 - (0.9 * 3.0 + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn write_then_load_is_stable() {
        let mut rec = VariantRecord::new("a", 1.25, 40);
        rec.mean_x = Some(0.5);
        rec.var_x = Some(0.25);
        rec.mean_y = Some(-1.0);
        rec.var_y = Some(2.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.tsv");
        write_records(&path, &[rec.clone()]).unwrap();
        let back = read_records(&path, &SumstatsSchema::default(), Scale::Raw).unwrap();
        assert_eq!(back, vec![rec]);
        let a = load_sumstats(&path, &SumstatsSchema::default(), Scale::Raw).unwrap();
        let b = load_sumstats(&path, &SumstatsSchema::default(), Scale::Raw).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn r_from_t_is_monotone_and_bounded(t1 in -1e6f64..1e6, dt in 1e-6f64..10.0, n in 3usize..100_000) {
            let a = standardized_r_from_t(t1, n).unwrap();
            let b = standardized_r_from_t(t1 + dt, n).unwrap();
            prop_assert!(a.abs() < 1.0 && b.abs() < 1.0);
            prop_assert!(b >= a);
            prop_assert_eq!(a.signum() == t1.signum() || t1 == 0.0, true);
        }
    }
}
