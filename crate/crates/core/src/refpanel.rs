//! Reference-panel LD estimation.
//!
//! The LD matrix is estimated from a public genotype sample of the target
//! ancestry, restricted to a band of width `W` around the diagonal and
//! soft-thresholded entrywise. Off-diagonals live in a symmetric CSR store
//! (both halves, sorted columns); the diagonal is held separately and is
//! never thresholded.

use std::path::Path;

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{BrightError, Result};
use crate::io::{fmt_f64, read_id_list, read_to_string, write_atomic, write_id_list};

pub const DEFAULT_WINDOW: usize = 200;

/// Individual-level genotype dosages, one sample per row.
#[derive(Debug, Clone, PartialEq)]
pub struct GenotypePanel {
    pub variant_ids: Vec<String>,
    pub data: Array2<f64>,
}

impl GenotypePanel {
    pub fn new(variant_ids: Vec<String>, data: Array2<f64>) -> Result<Self> {
        if variant_ids.len() != data.ncols() {
            return Err(BrightError::Dimension(format!(
                "{} variant ids for {} genotype columns",
                variant_ids.len(),
                data.ncols()
            )));
        }
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(BrightError::NoVariants);
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(BrightError::InvalidArgument(
                "genotype panel contains non-finite values".into(),
            ));
        }
        for (j, col) in data.columns().into_iter().enumerate() {
            let first = col[0];
            if col.iter().all(|&v| v == first) {
                return Err(BrightError::Monomorphic(variant_ids[j].clone()));
            }
        }
        Ok(GenotypePanel { variant_ids, data })
    }

    pub fn sample_count(&self) -> usize {
        self.data.nrows()
    }

    pub fn variant_count(&self) -> usize {
        self.data.ncols()
    }

    /// Column means and population standard deviations (divisor `n`).
    pub fn column_moments(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.sample_count() as f64;
        self.data
            .columns()
            .into_iter()
            .map(|col| {
                let mean = col.sum() / n;
                let ss: f64 = col.iter().map(|&v| (v - mean) * (v - mean)).sum();
                (mean, (ss / n).sqrt())
            })
            .unzip()
    }

    /// Columns centered and scaled to unit population variance.
    pub fn standardized(&self) -> Array2<f64> {
        let (means, sds) = self.column_moments();
        let mut out = self.data.clone();
        for (j, mut col) in out.columns_mut().into_iter().enumerate() {
            col.mapv_inplace(|v| (v - means[j]) / sds[j]);
        }
        out
    }

    /// Reads a whitespace-delimited matrix (one sample per row) and a
    /// sidecar list of variant ids.
    pub fn load(path: &Path, ids_path: &Path) -> Result<Self> {
        let ids = read_id_list(ids_path)?;
        let text = read_to_string(path)?;
        let mut values = Vec::new();
        let mut rows = 0usize;
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let before = values.len();
            for tok in line.split_whitespace() {
                let v: f64 = tok.parse().map_err(|_| {
                    BrightError::parse(path, lineno + 1, format!("cannot parse '{tok}' as a number"))
                })?;
                values.push(v);
            }
            let width = values.len() - before;
            if width != ids.len() {
                return Err(BrightError::parse(
                    path,
                    lineno + 1,
                    format!("expected {} values, found {width}", ids.len()),
                ));
            }
            rows += 1;
        }
        let data = Array2::from_shape_vec((rows, ids.len()), values)
            .map_err(|e| BrightError::Dimension(e.to_string()))?;
        GenotypePanel::new(ids, data)
    }

    pub fn write(&self, path: &Path, ids_path: &Path) -> Result<()> {
        let mut out = String::with_capacity(self.data.len() * 14);
        for row in self.data.rows() {
            let mut first = true;
            for &v in row {
                if !first {
                    out.push(' ');
                }
                first = false;
                out.push_str(&fmt_f64(v));
            }
            out.push('\n');
        }
        write_atomic(path, out.as_bytes())?;
        write_id_list(ids_path, &self.variant_ids)
    }
}

/// `sign(z) * max(|z| - t, 0)`.
#[inline]
pub fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// `m_prime * sqrt(ln p / n_ref)`, the thresholding level under which the
/// thresholded estimate converges in operator norm.
pub fn default_tau(p: usize, n_ref: usize, m_prime: f64) -> f64 {
    default_tau_real(p as f64, n_ref, m_prime)
}

pub(crate) fn default_tau_real(p: f64, n_ref: usize, m_prime: f64) -> f64 {
    m_prime * (p.ln() / n_ref as f64).sqrt()
}

/// Banded, symmetric, sparse correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseLD {
    pub variant_ids: Vec<String>,
    pub window: usize,
    pub tau: f64,
    pub diag: Vec<f64>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseLD {
    /// Builds from upper-triangle off-diagonal triplets `(i, j, v)` with
    /// `i < j`. Zero values are dropped; pairs outside the band are
    /// rejected.
    pub fn from_upper_triplets(
        variant_ids: Vec<String>,
        window: usize,
        tau: f64,
        diag: Vec<f64>,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let p = variant_ids.len();
        if diag.len() != p {
            return Err(BrightError::Dimension(format!("diag has {} entries for p={p}", diag.len())));
        }
        if window == 0 {
            return Err(BrightError::InvalidArgument("window must be at least 1".into()));
        }
        let mut counts = vec![0usize; p];
        for &(i, j, v) in triplets {
            if i >= j || j >= p {
                return Err(BrightError::InvalidArgument(format!(
                    "triplet ({i}, {j}) is not a strictly upper entry of a {p}x{p} matrix"
                )));
            }
            if j - i > window {
                return Err(BrightError::InvalidArgument(format!(
                    "triplet ({i}, {j}) lies outside window {window}"
                )));
            }
            if !v.is_finite() {
                return Err(BrightError::InvalidArgument(format!("non-finite LD value at ({i}, {j})")));
            }
            if v != 0.0 {
                counts[i] += 1;
                counts[j] += 1;
            }
        }
        let mut row_ptr = Vec::with_capacity(p + 1);
        row_ptr.push(0);
        for c in &counts {
            row_ptr.push(row_ptr.last().unwrap() + c);
        }
        let nnz = *row_ptr.last().unwrap();
        let mut cols = vec![0usize; nnz];
        let mut vals = vec![0.0; nnz];
        let mut fill = row_ptr[..p].to_vec();
        for &(i, j, v) in triplets {
            if v == 0.0 {
                continue;
            }
            cols[fill[i]] = j;
            vals[fill[i]] = v;
            fill[i] += 1;
            cols[fill[j]] = i;
            vals[fill[j]] = v;
            fill[j] += 1;
        }
        for k in 0..p {
            let (lo, hi) = (row_ptr[k], row_ptr[k + 1]);
            let mut pairs: Vec<(usize, f64)> =
                cols[lo..hi].iter().copied().zip(vals[lo..hi].iter().copied()).collect();
            pairs.sort_by_key(|&(c, _)| c);
            for w in pairs.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(BrightError::InvalidArgument(format!(
                        "duplicate LD entry ({k}, {})",
                        w[0].0
                    )));
                }
            }
            for (slot, (c, v)) in pairs.into_iter().enumerate() {
                cols[lo + slot] = c;
                vals[lo + slot] = v;
            }
        }
        Ok(SparseLD {
            variant_ids,
            window,
            tau,
            diag,
            row_ptr,
            cols,
            vals,
        })
    }

    pub fn identity(variant_ids: Vec<String>, window: usize) -> Self {
        let p = variant_ids.len();
        SparseLD::from_upper_triplets(variant_ids, window.max(1), 0.0, vec![1.0; p], &[])
            .expect("identity is well formed")
    }

    /// Converts a dense symmetric matrix, keeping only the band.
    pub fn from_dense(variant_ids: Vec<String>, window: usize, dense: &Array2<f64>) -> Result<Self> {
        let p = variant_ids.len();
        if dense.dim() != (p, p) {
            return Err(BrightError::Dimension(format!("dense matrix is {:?}, expected ({p}, {p})", dense.dim())));
        }
        let diag = (0..p).map(|i| dense[[i, i]]).collect();
        let mut triplets = Vec::new();
        for i in 0..p {
            for j in (i + 1)..p.min(i + window + 1) {
                triplets.push((i, j, dense[[i, j]]));
            }
        }
        SparseLD::from_upper_triplets(variant_ids, window, 0.0, diag, &triplets)
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of stored off-diagonal pairs `(i, j)` with `i < j`.
    pub fn nnz_offdiag(&self) -> usize {
        self.vals.len() / 2
    }

    /// Off-diagonal neighbours of row `j` as `(column, value)`.
    #[inline]
    pub fn row(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (lo, hi) = (self.row_ptr[j], self.row_ptr[j + 1]);
        self.cols[lo..hi].iter().copied().zip(self.vals[lo..hi].iter().copied())
    }

    #[inline]
    pub(crate) fn row_slices(&self, j: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.row_ptr[j], self.row_ptr[j + 1]);
        (&self.cols[lo..hi], &self.vals[lo..hi])
    }

    /// Entry `(i, j)`; zero outside the stored pattern.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        let (cols, vals) = self.row_slices(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// Upper-triangle off-diagonal entries in row-major order.
    pub fn upper_triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz_offdiag());
        for i in 0..self.dim() {
            for (j, v) in self.row(i) {
                if j > i {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    /// `sum_k entry(j, k) * v[k]` over the stored band, diagonal included.
    pub fn row_dot(&self, j: usize, v: &[f64]) -> Result<f64> {
        if j >= self.dim() {
            return Err(BrightError::Dimension(format!("row {j} out of range for p={}", self.dim())));
        }
        if v.len() != self.dim() {
            return Err(BrightError::Dimension(format!(
                "vector length {} for p={}",
                v.len(),
                self.dim()
            )));
        }
        Ok(self.diag[j] * v[j] + self.offdiag_row_dot(j, v))
    }

    #[inline]
    pub(crate) fn offdiag_row_dot(&self, j: usize, v: &[f64]) -> f64 {
        let (cols, vals) = self.row_slices(j);
        cols.iter().zip(vals).map(|(&k, &a)| a * v[k]).sum()
    }

    /// Full product `Sigma * v`.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(BrightError::Dimension(format!(
                "vector length {} for p={}",
                v.len(),
                self.dim()
            )));
        }
        Ok((0..self.dim())
            .map(|j| self.diag[j] * v[j] + self.offdiag_row_dot(j, v))
            .collect())
    }

    /// `v' Sigma v`.
    pub fn quad_form(&self, v: &[f64]) -> Result<f64> {
        let sv = self.matvec(v)?;
        Ok(v.iter().zip(&sv).map(|(a, b)| a * b).sum())
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let p = self.dim();
        let mut out = Array2::zeros((p, p));
        for i in 0..p {
            out[[i, i]] = self.diag[i];
            for (j, v) in self.row(i) {
                out[[i, j]] = v;
            }
        }
        out
    }

    /// Soft-thresholds the off-diagonal entries so that the cumulative
    /// threshold becomes `tau`. Thresholding composes exactly
    /// (`ST(ST(z, a), b) = ST(z, a + b)`), so a raw estimate thresholded at
    /// `tau` and a matrix re-thresholded up to `tau` agree.
    pub fn apply_threshold(&self, tau: f64) -> Result<SparseLD> {
        if !(tau >= 0.0) || !tau.is_finite() {
            return Err(BrightError::InvalidArgument(format!("tau must be non-negative, got {tau}")));
        }
        if tau < self.tau {
            return Err(BrightError::InvalidArgument(format!(
                "cannot lower the threshold from {} to {tau}",
                self.tau
            )));
        }
        let step = tau - self.tau;
        let triplets: Vec<(usize, usize, f64)> = self
            .upper_triplets()
            .into_iter()
            .map(|(i, j, v)| (i, j, soft_threshold(v, step)))
            .collect();
        SparseLD::from_upper_triplets(self.variant_ids.clone(), self.window, tau, self.diag.clone(), &triplets)
    }

    /// `Sigma + eps * I`.
    pub fn with_diagonal_loading(&self, eps: f64) -> Result<SparseLD> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(BrightError::InvalidArgument(format!(
                "diagonal loading must be non-negative, got {eps}"
            )));
        }
        let mut out = self.clone();
        for d in &mut out.diag {
            *d += eps;
        }
        Ok(out)
    }

    /// Principal submatrix on the given positions (ascending).
    pub fn subset(&self, positions: &[usize]) -> Result<SparseLD> {
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(BrightError::InvalidArgument("subset positions must be strictly ascending".into()));
        }
        let mut new_index = vec![usize::MAX; self.dim()];
        for (k, &pos) in positions.iter().enumerate() {
            if pos >= self.dim() {
                return Err(BrightError::Dimension(format!("position {pos} out of range")));
            }
            new_index[pos] = k;
        }
        let triplets: Vec<(usize, usize, f64)> = self
            .upper_triplets()
            .into_iter()
            .filter_map(|(i, j, v)| {
                let (a, b) = (new_index[i], new_index[j]);
                (a != usize::MAX && b != usize::MAX).then_some((a, b, v))
            })
            .collect();
        SparseLD::from_upper_triplets(
            positions.iter().map(|&i| self.variant_ids[i].clone()).collect(),
            self.window,
            self.tau,
            positions.iter().map(|&i| self.diag[i]).collect(),
            &triplets,
        )
    }

    /// Writes the `(i, j, value)` triplets (diagonal included, `i <= j`,
    /// sorted) under a header carrying `p`, `W` and `tau`, plus a sidecar
    /// variant-id list.
    pub fn write_triplets(&self, path: &Path, ids_path: &Path) -> Result<()> {
        let mut out = format!(
            "# p={}\tW={}\ttau={}\ni\tj\tvalue\n",
            self.dim(),
            self.window,
            fmt_f64(self.tau)
        );
        for i in 0..self.dim() {
            out.push_str(&format!("{i}\t{i}\t{}\n", fmt_f64(self.diag[i])));
            for (j, v) in self.row(i) {
                if j > i {
                    out.push_str(&format!("{i}\t{j}\t{}\n", fmt_f64(v)));
                }
            }
        }
        write_atomic(path, out.as_bytes())?;
        write_id_list(ids_path, &self.variant_ids)
    }

    pub fn read_triplets(path: &Path, ids_path: &Path) -> Result<SparseLD> {
        let ids = read_id_list(ids_path)?;
        let text = read_to_string(path)?;
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| BrightError::parse(path, 1, "empty LD file"))?;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| BrightError::parse(path, 1, "missing '# p=.. W=.. tau=..' header"))?;
        let (mut p, mut window, mut tau) = (None, None, None);
        for kv in header.split_whitespace() {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| BrightError::parse(path, 1, format!("bad header field '{kv}'")))?;
            let bad = || BrightError::parse(path, 1, format!("bad header value '{kv}'"));
            match k {
                "p" => p = Some(v.parse::<usize>().map_err(|_| bad())?),
                "W" => window = Some(v.parse::<usize>().map_err(|_| bad())?),
                "tau" => tau = Some(v.parse::<f64>().map_err(|_| bad())?),
                _ => {}
            }
        }
        let (Some(p), Some(window), Some(tau)) = (p, window, tau) else {
            return Err(BrightError::parse(path, 1, "header must carry p, W and tau"));
        };
        if p != ids.len() {
            return Err(BrightError::Dimension(format!(
                "LD header says p={p} but {} variant ids were listed",
                ids.len()
            )));
        }
        let mut diag = vec![f64::NAN; p];
        let mut triplets = Vec::new();
        for (lineno, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with("i\t") {
                continue;
            }
            let mut it = line.split('\t');
            let mut next = |what: &str| {
                it.next()
                    .ok_or_else(|| BrightError::parse(path, lineno + 1, format!("missing {what}")))
            };
            let i: usize = next("i")?
                .parse()
                .map_err(|_| BrightError::parse(path, lineno + 1, "bad row index"))?;
            let j: usize = next("j")?
                .parse()
                .map_err(|_| BrightError::parse(path, lineno + 1, "bad column index"))?;
            let v: f64 = next("value")?
                .parse()
                .map_err(|_| BrightError::parse(path, lineno + 1, "bad value"))?;
            if i >= p || j >= p || j < i {
                return Err(BrightError::parse(path, lineno + 1, format!("index ({i}, {j}) invalid for p={p}")));
            }
            if i == j {
                diag[i] = v;
            } else {
                triplets.push((i, j, v));
            }
        }
        if let Some(k) = diag.iter().position(|d| d.is_nan()) {
            return Err(BrightError::parse(path, 0, format!("missing diagonal entry for index {k}")));
        }
        SparseLD::from_upper_triplets(ids, window, tau, diag, &triplets)
    }
}

/// Raw banded correlation estimate (`tau = 0`, unit diagonal).
pub fn estimate_ld(panel: &GenotypePanel, window: usize) -> Result<SparseLD> {
    if window == 0 {
        return Err(BrightError::InvalidArgument("window must be at least 1".into()));
    }
    let n = panel.sample_count();
    if n < 2 {
        return Err(BrightError::InvalidArgument(format!(
            "reference panel needs at least 2 samples, got {n}"
        )));
    }
    let p = panel.variant_count();
    // Centered columns, stored contiguously.
    let centered: Vec<Vec<f64>> = panel
        .data
        .columns()
        .into_iter()
        .map(|col| {
            let mean = col.sum() / n as f64;
            col.iter().map(|&v| v - mean).collect()
        })
        .collect();
    let ss: Vec<f64> = centered
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum())
        .collect();
    if let Some(j) = ss.iter().position(|&s| !(s > 0.0)) {
        return Err(BrightError::Monomorphic(panel.variant_ids[j].clone()));
    }
    let triplets: Vec<(usize, usize, f64)> = (0..p)
        .into_par_iter()
        .flat_map_iter(|i| {
            let centered = &centered;
            let ss = &ss;
            ((i + 1)..p.min(i + window + 1)).map(move |j| {
                let cross: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
                let corr = (cross / (ss[i] * ss[j]).sqrt()).clamp(-1.0, 1.0);
                (i, j, corr)
            })
        })
        .collect();
    SparseLD::from_upper_triplets(panel.variant_ids.clone(), window, 0.0, vec![1.0; p], &triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn ids(p: usize) -> Vec<String> {
        (0..p).map(|j| format!("v{j}")).collect()
    }

    fn gaussian_panel(n: usize, p: usize, seed: u64) -> GenotypePanel {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = Array2::from_shape_fn((n, p), |_| rng.sample::<f64, _>(StandardNormal));
        GenotypePanel::new(ids(p), data).unwrap()
    }

    #[test]
    fn soft_threshold_values() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-2.5, 1.0), -1.5);
        assert_eq!(soft_threshold(1.0, 1.0), 0.0);
    }

    #[test]
    fn default_tau_values() {
        let e2 = std::f64::consts::E * std::f64::consts::E;
        assert!((default_tau_real(e2, 2, 1.0) - 1.0).abs() < 1e-15);
        let expect = 0.5 * ((1000f64).ln() / 503.0).sqrt();
        assert!((default_tau(1000, 503, 0.5) - expect).abs() < 1e-15);
        assert!((default_tau(1000, 503, 0.5) - 0.0585941804).abs() < 1e-10);
        assert_eq!(default_tau(1000, 503, 0.0), 0.0);
    }

    #[test]
    fn duplicated_column_has_unit_correlation() {
        let data = array![[1.0, 1.0, 0.0], [2.0, 2.0, 1.0], [0.0, 0.0, 2.0], [1.5, 1.5, 1.0]];
        let panel = GenotypePanel::new(ids(3), data).unwrap();
        let ld = estimate_ld(&panel, 2).unwrap();
        assert_eq!(ld.get(0, 1), 1.0);
        assert_eq!(ld.get(1, 0), 1.0);
        assert_eq!(ld.diag, vec![1.0; 3]);
    }

    #[test]
    fn band_geometry() {
        let panel = gaussian_panel(20, 3, 1);
        assert!(estimate_ld(&panel, 0).is_err());
        let ld = estimate_ld(&panel, 1).unwrap();
        assert_eq!(ld.nnz_offdiag(), 2);
        assert_eq!(ld.get(0, 2), 0.0);
    }

    #[test]
    fn independent_columns_are_nearly_uncorrelated() {
        let panel = gaussian_panel(10_000, 6, 7);
        let ld = estimate_ld(&panel, 2).unwrap();
        // Oracle: dense correlation of the same sample.
        let z = panel.standardized();
        let dense = z.t().dot(&z) / 10_000.0;
        for (i, j, v) in ld.upper_triplets() {
            assert!((v - dense[[i, j]]).abs() < 1e-12);
            assert!(v.abs() < 0.05, "({i},{j}) = {v}");
        }
    }

    #[test]
    fn monomorphic_column_named() {
        let data = array![[1.0, 0.0], [1.0, 1.0], [1.0, 2.0]];
        let err = GenotypePanel::new(ids(2), data).unwrap_err();
        assert!(matches!(err, BrightError::Monomorphic(ref v) if v == "v0"));
    }

    #[test]
    fn threshold_identity_and_full_kill() {
        let ld = estimate_ld(&gaussian_panel(50, 8, 3), 3).unwrap();
        assert_eq!(ld.apply_threshold(0.0).unwrap(), ld);
        let max = ld.upper_triplets().iter().map(|t| t.2.abs()).fold(0.0, f64::max);
        let killed = ld.apply_threshold(max).unwrap();
        assert_eq!(killed.nnz_offdiag(), 0);
        assert_eq!(killed.diag, ld.diag);
        assert!(ld.apply_threshold(-0.1).is_err());
        assert!(killed.apply_threshold(max / 2.0).is_err());
    }

    #[test]
    fn row_dot_cases() {
        let ld = estimate_ld(&gaussian_panel(30, 7, 11), 2).unwrap();
        assert_eq!(ld.row_dot(3, &[0.0; 7]).unwrap(), 0.0);
        let mut e = vec![0.0; 7];
        e[3] = 1.0;
        assert_eq!(ld.row_dot(3, &e).unwrap(), ld.diag[3]);
        assert!(ld.row_dot(7, &e).is_err());
        assert!(ld.row_dot(0, &[1.0]).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v: Vec<f64> = (0..7).map(|_| rng.random_range(-1.0..1.0)).collect();
        let dense = ld.to_dense();
        for j in 0..7 {
            let oracle: f64 = (0..7).map(|k| dense[[j, k]] * v[k]).sum();
            assert!((ld.row_dot(j, &v).unwrap() - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn triplet_file_round_trip() {
        let ld = estimate_ld(&gaussian_panel(40, 9, 2), 3)
            .unwrap()
            .apply_threshold(0.05)
            .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let (f, i) = (dir.path().join("ld.tsv"), dir.path().join("ld.ids"));
        ld.write_triplets(&f, &i).unwrap();
        let back = SparseLD::read_triplets(&f, &i).unwrap();
        assert_eq!(back.dim(), 9);
        assert_eq!(back.window, 3);
        assert_eq!(back.nnz_offdiag(), ld.nnz_offdiag());
        for (a, b) in back.upper_triplets().iter().zip(ld.upper_triplets()) {
            assert_eq!((a.0, a.1), (b.0, b.1));
            assert!((a.2 - b.2).abs() < 1e-9);
        }
    }

    #[test]
    fn subset_keeps_band() {
        let ld = estimate_ld(&gaussian_panel(40, 6, 9), 2).unwrap();
        let sub = ld.subset(&[0, 2, 3, 5]).unwrap();
        assert_eq!(sub.dim(), 4);
        assert_eq!(sub.get(0, 1), ld.get(0, 2));
        assert_eq!(sub.get(1, 2), ld.get(2, 3));
        assert_eq!(sub.get(0, 3), 0.0);
    }

    #[test]
    fn panel_file_round_trip() {
        let panel = gaussian_panel(5, 4, 21);
        let dir = tempfile::tempdir().unwrap();
        let (f, i) = (dir.path().join("g.txt"), dir.path().join("g.ids"));
        panel.write(&f, &i).unwrap();
        let back = GenotypePanel::load(&f, &i).unwrap();
        assert_eq!(back.variant_ids, panel.variant_ids);
        for (a, b) in back.data.iter().zip(panel.data.iter()) {
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
        }
    }

    proptest! {
        #[test]
        fn thresholding_contracts_and_is_monotone(seed in 0u64..500, t1 in 0.0f64..0.5, dt in 0.0f64..0.5) {
            let ld = estimate_ld(&gaussian_panel(12, 6, seed), 3).unwrap();
            let a = ld.apply_threshold(t1).unwrap();
            let b = ld.apply_threshold(t1 + dt).unwrap();
            let chained = a.apply_threshold(t1 + dt).unwrap();
            for i in 0..6 {
                for j in 0..6 {
                    prop_assert_eq!(a.get(i, j), a.get(j, i));
                    prop_assert!(a.get(i, j).abs() <= ld.get(i, j).abs());
                    prop_assert!(b.get(i, j).abs() <= a.get(i, j).abs());
                    prop_assert!((chained.get(i, j) - b.get(i, j)).abs() < 1e-15);
                    if i.abs_diff(j) > 3 {
                        prop_assert_eq!(a.get(i, j), 0.0);
                    }
                    if i != j {
                        prop_assert!(a.get(i, j).abs() <= 1.0);
                    }
                }
                prop_assert!(a.diag[i] > 0.0);
            }
        }
    }
}
