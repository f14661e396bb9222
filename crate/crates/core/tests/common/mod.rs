//! Dense reference implementations used as test oracles.
#![allow(dead_code)]

use bright::{PriorWeights, Scale, SparseLD, SummaryStats};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn ids(p: usize) -> Vec<String> {
    (0..p).map(|j| format!("v{j}")).collect()
}

pub fn stats_from_r(r: &[f64]) -> SummaryStats {
    SummaryStats {
        variant_ids: ids(r.len()),
        r: r.to_vec(),
        scale: Scale::Standardized,
        sample_n: 1000,
        t_stats: vec![0.0; r.len()],
        sample_sizes: vec![1000; r.len()],
        outcome_second_moment: Some(1.0),
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// `A'A/m + load * I` for a Gaussian `m x p` matrix `A`.
pub fn random_psd(rng: &mut ChaCha8Rng, p: usize, m: usize, load: f64) -> Array2<f64> {
    let a = Array2::from_shape_fn((m, p), |_| normal(rng));
    let mut s = a.t().dot(&a) / m as f64;
    for j in 0..p {
        s[[j, j]] += load;
    }
    s
}

pub fn matvec(a: &Array2<f64>, v: &[f64]) -> Vec<f64> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[[i, j]] * v[j]).sum()).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(1+eta)/2 b'Sb - b'(r + eta S bt) + lambda |b|_1` evaluated densely.
pub fn dense_objective(s: &Array2<f64>, r: &[f64], bt: &[f64], eta: f64, lambda: f64, b: &[f64]) -> f64 {
    let sb = matvec(s, b);
    let sbt = matvec(s, bt);
    let q: Vec<f64> = r.iter().zip(&sbt).map(|(ri, si)| ri + eta * si).collect();
    0.5 * (1.0 + eta) * dot(b, &sb) - dot(b, &q) + lambda * b.iter().map(|x| x.abs()).sum::<f64>()
}

fn largest_eigenvalue(s: &Array2<f64>) -> f64 {
    // Gershgorin bound: safe step size without an eigen solver
    (0..s.nrows())
        .map(|i| (0..s.ncols()).map(|j| s[[i, j]].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Accelerated proximal gradient (FISTA with gradient restart) on the
/// dense objective. Runs until an iterate moves less than `tol`.
pub fn prox_gradient(s: &Array2<f64>, r: &[f64], bt: &[f64], eta: f64, lambda: f64, tol: f64) -> Vec<f64> {
    let p = r.len();
    let sbt = matvec(s, bt);
    let q: Vec<f64> = r.iter().zip(&sbt).map(|(ri, si)| ri + eta * si).collect();
    let step = 1.0 / ((1.0 + eta) * largest_eigenvalue(s));
    let shrink = |z: f64, t: f64| z.signum() * (z.abs() - t).max(0.0);
    let mut x = vec![0.0; p];
    let mut y = x.clone();
    let mut t = 1.0f64;
    for _ in 0..2_000_000 {
        let sy = matvec(s, &y);
        let next: Vec<f64> = (0..p)
            .map(|j| shrink(y[j] - step * ((1.0 + eta) * sy[j] - q[j]), step * lambda))
            .collect();
        let moved = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        // restart momentum when it points uphill
        let uphill: f64 = (0..p).map(|j| (y[j] - next[j]) * (next[j] - x[j])).sum();
        let t_next = if uphill > 0.0 { 1.0 } else { (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0 };
        let momentum = if uphill > 0.0 { 0.0 } else { (t - 1.0) / t_next };
        y = (0..p).map(|j| next[j] + momentum * (next[j] - x[j])).collect();
        x = next;
        t = t_next;
        if moved < tol {
            break;
        }
    }
    x
}

/// Plain lasso `1/2 b'Sb - b'r + lambda |b|_1` by cyclic proximal steps on
/// a dense matrix, written without reference to the transfer objective.
pub fn dense_lasso(s: &Array2<f64>, r: &[f64], lambda: f64, tol: f64) -> Vec<f64> {
    let p = r.len();
    let mut b = vec![0.0; p];
    for _ in 0..1_000_000 {
        let mut moved = 0.0f64;
        for j in 0..p {
            let partial: f64 = (0..p).filter(|&k| k != j).map(|k| s[[j, k]] * b[k]).sum();
            let z = r[j] - partial;
            let new = z.signum() * (z.abs() - lambda).max(0.0) / s[[j, j]];
            moved = moved.max((new - b[j]).abs());
            b[j] = new;
        }
        if moved < tol {
            break;
        }
    }
    b
}

/// Largest violation of the subgradient optimality conditions.
pub fn dense_kkt(s: &Array2<f64>, r: &[f64], bt: &[f64], eta: f64, lambda: f64, b: &[f64]) -> f64 {
    let sb = matvec(s, b);
    let sbt = matvec(s, bt);
    (0..r.len())
        .map(|j| {
            let g = (1.0 + eta) * sb[j] - r[j] - eta * sbt[j];
            if b[j] != 0.0 {
                (g + lambda * b[j].signum()).abs()
            } else {
                (g.abs() - lambda).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}

/// A random dense problem in the form the library consumes.
pub struct Instance {
    pub dense: Array2<f64>,
    pub stats: SummaryStats,
    pub ld: SparseLD,
    pub prior: PriorWeights,
    pub eta: f64,
}

pub fn random_instance(seed: u64, p: usize) -> Instance {
    let mut g = rng(seed);
    let dense = random_psd(&mut g, p, (p / 2).max(2), 0.1);
    let r: Vec<f64> = (0..p).map(|_| 0.3 * normal(&mut g)).collect();
    let bt: Vec<f64> = (0..p)
        .map(|_| if g.random_bool(0.3) { 0.5 * normal(&mut g) } else { 0.0 })
        .collect();
    let eta = [0.0, 0.1, 0.5, 1.0, 3.0][g.random_range(0..5)];
    let ld = SparseLD::from_dense(ids(p), p, &dense).unwrap();
    Instance {
        dense,
        stats: stats_from_r(&r),
        ld,
        prior: PriorWeights::new(ids(p), bt).unwrap(),
        eta,
    }
}
