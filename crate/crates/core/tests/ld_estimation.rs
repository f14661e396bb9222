mod common;

use bright::simulate::{ar1_block_covariance, gen_ar1_panel};
use bright::{default_tau, estimate_ld, soft_threshold, GenotypePanel, SparseLD};
use common::*;
use ndarray::Array2;

/// Pearson correlation written out directly.
fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

#[test]
fn banded_estimate_matches_pairwise_correlations() {
    let mut g = rng(5);
    let (n, p, w) = (120, 25, 4);
    let data = Array2::from_shape_fn((n, p), |(_, j)| normal(&mut g) + 0.1 * j as f64);
    let panel = GenotypePanel::new(ids(p), data.clone()).unwrap();
    let ld = estimate_ld(&panel, w).unwrap();
    for i in 0..p {
        assert_eq!(ld.get(i, i), 1.0);
        for j in 0..p {
            let expected = if i != j && i.abs_diff(j) <= w {
                pearson(&data.column(i).to_vec(), &data.column(j).to_vec())
            } else if i == j {
                1.0
            } else {
                0.0
            };
            assert!((ld.get(i, j) - expected).abs() < 1e-12, "({i}, {j})");
        }
    }
}

#[test]
fn thresholding_acts_entrywise_off_the_diagonal() {
    let mut g = rng(8);
    let panel = GenotypePanel::new(ids(30), Array2::from_shape_fn((60, 30), |_| normal(&mut g))).unwrap();
    let raw = estimate_ld(&panel, 6).unwrap();
    let tau = 0.12;
    let thr = raw.apply_threshold(tau).unwrap();
    for i in 0..30 {
        assert_eq!(thr.get(i, i), raw.get(i, i));
        for j in 0..30 {
            if i != j {
                assert_eq!(thr.get(i, j), soft_threshold(raw.get(i, j), tau));
            }
        }
    }
    assert!(thr.nnz_offdiag() <= raw.nnz_offdiag());
    assert!(raw.apply_threshold(0.2).unwrap().apply_threshold(0.1).is_err());
}

#[test]
fn triplet_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut g = rng(9);
    let panel = GenotypePanel::new(ids(40), Array2::from_shape_fn((80, 40), |_| normal(&mut g))).unwrap();
    let ld = estimate_ld(&panel, 5).unwrap().apply_threshold(0.05).unwrap();
    let (path, id_path) = (dir.path().join("ld.tsv"), dir.path().join("ld.ids"));
    ld.write_triplets(&path, &id_path).unwrap();
    let back = SparseLD::read_triplets(&path, &id_path).unwrap();
    assert_eq!(back.variant_ids, ld.variant_ids);
    assert_eq!(back.window, 5);
    assert_eq!(back.nnz_offdiag(), ld.nnz_offdiag());
    for i in 0..40 {
        for j in 0..40 {
            assert!((back.get(i, j) - ld.get(i, j)).abs() <= 1e-9 * ld.get(i, j).abs().max(1e-300));
        }
    }
}

#[test]
fn threshold_error_shrinks_with_reference_size() {
    let p = 100;
    let truth = ar1_block_covariance(p, p, 0.6);
    let mut medians = Vec::new();
    for &n in &[200usize, 800, 3200] {
        let mut errs: Vec<f64> = (0..7u64)
            .map(|k| {
                let panel = gen_ar1_panel(ids(p), n, p, 0.6, 1000 + k, 0).unwrap();
                let ld = estimate_ld(&panel, p - 1).unwrap().apply_threshold(default_tau(p, n, 1.0)).unwrap();
                let dense = ld.to_dense();
                (&dense - &truth).iter().map(|v| v.abs()).fold(0.0, f64::max)
            })
            .collect();
        errs.sort_by(f64::total_cmp);
        medians.push(errs[3]);
    }
    assert!(medians[0] > medians[1] && medians[1] > medians[2], "{medians:?}");
}
