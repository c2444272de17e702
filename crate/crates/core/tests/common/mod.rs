#![allow(dead_code)]
pub mod lemmas;

use mols::rng::{rng_from_seed, Rng};
use mols::SensingMatrix;
use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::Rng as _;
use rand_distr::StandardNormal;

pub fn gaussian_vec(rng: &mut Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn random_support(rng: &mut Rng, n: usize, s: usize) -> Vec<usize> {
    let mut v = sample(rng, n, s).into_vec();
    v.sort_unstable();
    v
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Columns of `matrix` on `support` as a dense block.
pub fn block(matrix: &SensingMatrix, support: &[usize]) -> DMatrix<f64> {
    matrix.select_columns(support)
}

/// Moore-Penrose pseudo-inverse through the SVD.
pub fn pinv(a: &DMatrix<f64>) -> DMatrix<f64> {
    a.clone().svd(true, true).pseudo_inverse(1e-13).expect("svd converged")
}

/// Least-squares residual `y - A A^+ y` computed through the SVD.
pub fn svd_residual(matrix: &SensingMatrix, support: &[usize], y: &[f64]) -> Vec<f64> {
    let yv = DVector::from_column_slice(y);
    if support.is_empty() {
        return y.to_vec();
    }
    let a = block(matrix, support);
    let fit = &a * (pinv(&a) * &yv);
    (yv - fit).as_slice().to_vec()
}

/// Orthogonal projector onto the complement of the span of `support`.
pub fn complement_projector(matrix: &SensingMatrix, support: &[usize]) -> DMatrix<f64> {
    let m = matrix.rows();
    if support.is_empty() {
        return DMatrix::identity(m, m);
    }
    let a = block(matrix, support);
    DMatrix::identity(m, m) - &a * pinv(&a)
}

/// Haar-random orthogonal `m x m` matrix.
pub fn random_rotation(m: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = rng_from_seed(seed);
    let g = DMatrix::from_fn(m, m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let signs = DMatrix::from_diagonal(&DVector::from_fn(m, |i, _| r[(i, i)].signum()));
    q * signs
}

/// Sylvester Hadamard matrix of order `2^p`.
pub fn hadamard(order: usize) -> DMatrix<f64> {
    assert!(order.is_power_of_two());
    let mut h = DMatrix::from_element(1, 1, 1.0);
    while h.nrows() < order {
        let k = h.nrows();
        let mut next = DMatrix::zeros(2 * k, 2 * k);
        next.view_mut((0, 0), (k, k)).copy_from(&h);
        next.view_mut((0, k), (k, k)).copy_from(&h);
        next.view_mut((k, 0), (k, k)).copy_from(&h);
        next.view_mut((k, k), (k, k)).copy_from(&(-&h));
        h = next;
    }
    h
}

/// Regular simplex frame: 16 unit columns in 15 dimensions with pairwise
/// inner products `-1/15`, randomly rotated. Every `s`-column Gram matrix has
/// eigenvalues `16/15` and `1 - (s - 1)/15`, so `delta_s = (s - 1)/15`.
pub fn simplex_frame(seed: u64) -> SensingMatrix {
    let h = hadamard(16);
    let trimmed = h.rows(1, 15).into_owned() / 15f64.sqrt();
    SensingMatrix::new(random_rotation(15, seed) * trimmed).unwrap()
}

pub fn simplex_delta(s: usize) -> f64 {
    (s as f64 - 1.0).max(0.0) / 15.0
}

/// Checks the structural invariants of a greedy trace: `|T^k| = L k`, disjoint
/// selections, non-increasing residual norms, `Phi_{T^k}^T r^k = 0` and a
/// residual norm that matches an SVD least-squares solve on `T^k`.
pub fn check_trace(instance: &mols::ProblemInstance, result: &mols::RecoveryResult, l: usize) -> Result<(), String> {
    let y_norm = norm(&instance.y);
    let norms = result.residual_norms();
    if (norms[0] - y_norm).abs() > 1e-12 * y_norm {
        return Err("initial residual differs from ||y||".into());
    }
    let mut seen = std::collections::HashSet::new();
    for (k, rec) in result.trace.iter().enumerate() {
        if rec.selected.len() != l || rec.support.len() != l * (k + 1) {
            return Err(format!("iteration {k}: |T^k| = {} for L = {l}", rec.support.len()));
        }
        if !rec.selected.iter().all(|j| seen.insert(*j)) {
            return Err(format!("iteration {k}: index selected twice"));
        }
        if norms[k + 1] > norms[k] * (1.0 + 1e-12) + 1e-14 * y_norm {
            return Err(format!("iteration {k}: residual grew from {} to {}", norms[k], norms[k + 1]));
        }
        let basis = mols::IncrementalBasis::from_support(&instance.matrix, &rec.support).unwrap();
        let r = basis.project_out(&instance.y);
        for &j in &rec.support {
            let c: f64 = instance.matrix.col(j).iter().zip(&r).map(|(a, b)| a * b).sum();
            if c.abs() > 1e-10 * y_norm {
                return Err(format!("iteration {k}: <phi_{j}, r> = {c:e}"));
            }
        }
        let oracle = norm(&svd_residual(&instance.matrix, &rec.support, &instance.y));
        if (oracle - rec.residual_norm).abs() > 1e-9 * y_norm {
            return Err(format!("iteration {k}: residual {} vs svd {}", rec.residual_norm, oracle));
        }
    }
    Ok(())
}

/// Checks that the output coefficients are the least-squares fit on the
/// output support. Padded outputs of failed runs are skipped.
pub fn check_refit(instance: &mols::ProblemInstance, result: &mols::RecoveryResult) -> Result<(), String> {
    if result.termination.is_failure() || result.support.is_empty() {
        return Ok(());
    }
    let a = block(&instance.matrix, &result.support);
    let fit = pinv(&a) * DVector::from_column_slice(&instance.y);
    let scale = fit.norm().max(1.0);
    for (c, f) in result.coefficients.iter().zip(fit.iter()) {
        if (c - f).abs() > 1e-8 * scale {
            return Err(format!("coefficient {c} vs least squares {f}"));
        }
    }
    Ok(())
}
