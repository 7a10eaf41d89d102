#![allow(dead_code)]
// Random problem generators and dense reference computations shared by the
// integration tests.

use gk_kaczmarz::SparseRowMatrix;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Consistent system with standard normal entries: `(A, x*, b = A x*)`.
pub struct System {
    pub a: SparseRowMatrix,
    pub x_star: Vec<f64>,
    pub b: Vec<f64>,
}

pub fn gaussian_system(rng: &mut impl Rng, m: usize, n: usize) -> System {
    let rows: Vec<Vec<f64>> = (0..m).map(|_| normal_vec(rng, n)).collect();
    let a = SparseRowMatrix::from_dense_rows(&rows).unwrap();
    let x_star = normal_vec(rng, n);
    let b = a.mul_vec(&x_star);
    System { a, x_star, b }
}

/// Gaussian system whose 2-norm condition number is at most `max_cond`.
pub fn well_conditioned(rng: &mut impl Rng, m: usize, n: usize, max_cond: f64) -> System {
    loop {
        let s = gaussian_system(rng, m, n);
        if cond(&s.a) <= max_cond {
            return s;
        }
    }
}

/// Sparse consistent system with about `density · m · n` normal entries and
/// no zero rows.
pub fn sparse_system(rng: &mut impl Rng, m: usize, n: usize, density: f64) -> System {
    let mut trip = Vec::new();
    for i in 0..m {
        let forced = rng.random_range(0..n);
        for j in 0..n {
            if j == forced || rng.random::<f64>() < density {
                trip.push((i, j, rng.sample::<f64, _>(StandardNormal) + 0.1));
            }
        }
    }
    let a = SparseRowMatrix::from_triplets(m, n, trip).unwrap();
    let x_star = normal_vec(rng, n);
    let b = a.mul_vec(&x_star);
    System { a, x_star, b }
}

pub fn dense(a: &SparseRowMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(a.n_rows(), a.n_cols());
    for (i, j, v) in a.triplets() {
        d[(i, j)] = v;
    }
    d
}

pub fn cond(a: &SparseRowMatrix) -> f64 {
    let sv = dense(a).singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Columns as a dense matrix.
pub fn columns(cols: &[Vec<f64>]) -> DMatrix<f64> {
    let n = cols.first().map_or(0, Vec::len);
    DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

/// Orthogonal projection of `target` onto the affine hull of `points`,
/// by dense least squares over `points[last] + span(points[i] − points[last])`.
pub fn affine_projection(points: &[Vec<f64>], target: &[f64]) -> Vec<f64> {
    let base = points.last().unwrap();
    let cols: Vec<Vec<f64>> = points[..points.len() - 1].iter().map(|p| sub(p, base)).collect();
    if cols.is_empty() {
        return base.clone();
    }
    let m = columns(&cols);
    let rhs = DVector::from_vec(sub(target, base));
    let coef = m.clone().svd(true, true).solve(&rhs, 0.0).unwrap();
    let step = m * coef;
    base.iter().zip(step.iter()).map(|(b, s)| b + s).collect()
}

/// `det(XᵀX)` for the given columns; 1 for no columns.
pub fn gram_det(cols: &[Vec<f64>]) -> f64 {
    if cols.is_empty() {
        return 1.0;
    }
    let m = columns(cols);
    (m.transpose() * m).determinant()
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}
