use bright::eval::{auc, r_squared, two_sided_p_value};

/// Two-sided Student-t tail by Simpson integration of the density over
/// `[0, |t|]`.
fn t_two_sided_quadrature(t: f64, df: f64) -> f64 {
    let ln_gamma = |x: f64| statrs::function::gamma::ln_gamma(x);
    let c = (ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0)).exp() / (df * std::f64::consts::PI).sqrt();
    let density = |x: f64| c * (1.0 + x * x / df).powf(-(df + 1.0) / 2.0);
    let steps = 20_000;
    let h = t.abs() / steps as f64;
    let mut s = density(0.0) + density(t.abs());
    for k in 1..steps {
        s += density(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    1.0 - 2.0 * s * h / 3.0
}

#[test]
fn p_values_match_numerical_integration() {
    for &(t, n) in &[(0.5, 30usize), (1.96, 1000), (-2.5, 12), (3.3, 400), (0.0, 50), (-4.0, 100)] {
        let p = two_sided_p_value(t, n).unwrap();
        let q = t_two_sided_quadrature(t, (n - 2) as f64);
        assert!((p - q).abs() < 1e-9, "t={t} n={n}: {p} vs {q}");
    }
}

#[test]
fn r_squared_is_invariant_to_affine_maps_of_the_predictor() {
    let y: Vec<f64> = (0..50).map(|i| ((i * 17) % 23) as f64 + 0.3 * i as f64).collect();
    let pred: Vec<f64> = (0..50).map(|i| ((i * 5) % 11) as f64 + 0.2 * i as f64).collect();
    let base = r_squared(&pred, &y).unwrap();
    for &(a, b) in &[(2.0, 1.0), (-3.0, 7.0), (1e-3, -5.0)] {
        let mapped: Vec<f64> = pred.iter().map(|v| a * v + b).collect();
        assert!((r_squared(&mapped, &y).unwrap() - base).abs() < 1e-12);
    }
    assert_eq!(r_squared(&vec![1.0; 50], &y).unwrap(), 0.0);
    assert!((r_squared(&y, &y).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn auc_is_invariant_to_monotone_maps_and_hits_its_extremes() {
    let labels: Vec<f64> = (0..40).map(|i| if (i * 7) % 5 < 2 { 1.0 } else { 0.0 }).collect();
    let scores: Vec<f64> = (0..40).map(|i| ((i * 13) % 17) as f64 - 0.5 * labels[i]).collect();
    let base = auc(&scores, &labels).unwrap();
    let mapped: Vec<f64> = scores.iter().map(|s| (0.3 * s).exp() + s.powi(3)).collect();
    assert_eq!(auc(&mapped, &labels).unwrap(), base);
    assert_eq!(auc(&labels, &labels).unwrap(), 1.0);
    let flipped: Vec<f64> = labels.iter().map(|l| -l).collect();
    assert_eq!(auc(&flipped, &labels).unwrap(), 0.0);
    assert_eq!(auc(&vec![0.0; 40], &labels).unwrap(), 0.5);
    assert!(auc(&scores, &vec![1.0; 40]).is_err());
}
