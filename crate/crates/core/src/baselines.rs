//! Comparison solvers: CoSaMP, IRLS with `p = 1`, and least squares on the
//! true support.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::greedy::{prune_and_refit, IterationRecord, RecoveryResult, Termination};
use crate::identify::top_l;
use crate::linalg::{ls_on_support, norm};
use crate::problem::{axpy, AlgorithmParams, ProblemInstance};

/// Default iteration cap for CoSaMP.
pub const COSAMP_MAX_ITERATIONS: usize = 50;
/// Relative change of the residual norm below which CoSaMP stops.
pub const COSAMP_STALL_TOL: f64 = 1e-6;
/// Default iteration cap for IRLS.
pub const IRLS_MAX_ITERATIONS: usize = 100;
/// IRLS stops once its smoothing parameter falls below this value.
pub const IRLS_EPS_FLOOR: f64 = 1e-8;

/// Compressive sampling matching pursuit.
///
/// Each iteration merges the `2K` largest proxy entries `|Phi^T r|` with the
/// current support (capped so the merged set fits in `m` rows), solves least
/// squares on the union and keeps its `K` largest entries.
/// `params.max_iterations` is the iteration cap.
pub fn cosamp(instance: &ProblemInstance, params: &AlgorithmParams) -> Result<RecoveryResult> {
    let matrix = &instance.matrix;
    let y = &instance.y;
    let (m, n) = (matrix.rows(), matrix.cols());
    let k = params.sparsity;
    if k == 0 || k > n || k > m {
        return Err(Error::InvalidSparsity { k, n: n.min(m) });
    }
    if params.max_iterations == 0 {
        return Err(Error::InvalidParameter("max_iterations must be positive".into()));
    }
    let y_norm = norm(y);
    let eps = params.epsilon.resolve(y_norm);

    let mut support: Vec<usize> = Vec::new();
    let mut coef: Vec<f64> = Vec::new();
    let mut residual = y.clone();
    let mut rn = y_norm;
    let mut trace = Vec::new();
    let mut termination = Termination::ReachedKIterations;

    for _ in 0..params.max_iterations {
        if rn < eps {
            termination = Termination::ResidualBelowEpsilon;
            break;
        }
        let proxy = matrix.correlate(&residual);
        let outside: Vec<usize> = (0..n).filter(|i| !support.contains(i)).collect();
        let take = (2 * k).min(m - support.len()).min(outside.len());
        let mags: Vec<f64> = outside.iter().map(|&i| proxy[i].abs()).collect();
        let (fresh, tie) = top_l(&outside, &mags, take);
        let mut merged = support.clone();
        merged.extend(&fresh);
        merged.sort_unstable();
        let b = match ls_on_support(matrix, y, &merged) {
            Ok((b, _)) => b,
            Err(Error::RankDeficient { .. }) => {
                termination = Termination::RankDeficient;
                break;
            }
            Err(e) => return Err(e),
        };
        let mags: Vec<f64> = b.iter().map(|v| v.abs()).collect();
        let mut keep = top_l(&merged, &mags, k.min(merged.len())).0;
        keep.sort_unstable();
        coef = keep
            .iter()
            .map(|j| b[merged.binary_search(j).unwrap()])
            .collect();
        support = keep;
        residual = y.clone();
        for (&j, &c) in support.iter().zip(&coef) {
            axpy(-c, matrix.col(j), &mut residual);
        }
        let prev = rn;
        rn = norm(&residual);
        trace.push(IterationRecord {
            selected: fresh,
            support: support.clone(),
            residual_norm: rn,
            tie,
            surrogate_objective: None,
        });
        if rn < eps {
            termination = Termination::ResidualBelowEpsilon;
            break;
        }
        if (prev - rn).abs() < COSAMP_STALL_TOL * prev {
            termination = Termination::Stalled;
            break;
        }
    }
    let iterations = trace.len();
    let (support, coefficients) = prune_and_refit(instance, &support, &coef, k)?;
    Ok(RecoveryResult {
        n,
        support,
        coefficients,
        iterations,
        trace,
        termination,
        initial_residual_norm: y_norm,
    })
}

/// Iteratively reweighted least squares for `min ||x||_1 s.t. Phi x = y`.
///
/// Each step solves `min sum_i x_i^2 / d_i` subject to `Phi x = y` with
/// `d_i = sqrt(x_i^2 + eps^2)`, i.e. `x = D Phi^T (Phi D Phi^T)^{-1} y`. The
/// smoothing `eps` starts at 1 and is divided by 10 whenever the relative change
/// of `x` drops below `sqrt(eps) / 100`. The result keeps the `K` largest
/// entries and refits on them. Each trace record carries the smoothed objective
/// `sum_i sqrt(x_i^2 + eps^2)`.
pub fn irls(instance: &ProblemInstance, params: &AlgorithmParams) -> Result<RecoveryResult> {
    let matrix = &instance.matrix;
    let (m, n) = (matrix.rows(), matrix.cols());
    let k = params.sparsity;
    if k == 0 || k > n || k > m {
        return Err(Error::InvalidSparsity { k, n: n.min(m) });
    }
    if params.max_iterations == 0 {
        return Err(Error::InvalidParameter("max_iterations must be positive".into()));
    }
    let phi = matrix.entries();
    let y = DVector::from_column_slice(&instance.y);
    let y_norm = y.norm();

    let solve = |d: &DVector<f64>| -> Result<DVector<f64>> {
        // Phi D Phi^T via the scaled copy Phi D^{1/2}.
        let mut scaled = phi.clone();
        for (j, mut c) in scaled.column_iter_mut().enumerate() {
            c.scale_mut(d[j].sqrt());
        }
        let a: DMatrix<f64> = &scaled * scaled.transpose();
        let chol = a.cholesky().ok_or(Error::RankDeficient { index: 0 })?;
        let z = chol.solve(&y);
        let mut x = phi.tr_mul(&z);
        x.component_mul_assign(d);
        Ok(x)
    };

    let mut x = solve(&DVector::from_element(n, 1.0))?;
    let mut eps = 1.0f64;
    let mut trace = Vec::new();
    let mut termination = Termination::ReachedKIterations;

    for _ in 0..params.max_iterations {
        let d = x.map(|v| (v * v + eps * eps).sqrt());
        let next = match solve(&d) {
            Ok(v) => v,
            Err(_) => {
                termination = Termination::RankDeficient;
                break;
            }
        };
        let change = (&next - &x).norm() / next.norm().max(f64::MIN_POSITIVE);
        x = next;
        if change < eps.sqrt() / 100.0 {
            eps /= 10.0;
        }
        let objective: f64 = x.iter().map(|v| (v * v + eps * eps).sqrt()).sum();
        let residual = &y - phi * &x;
        trace.push(IterationRecord {
            selected: Vec::new(),
            support: Vec::new(),
            residual_norm: residual.norm(),
            tie: false,
            surrogate_objective: Some(objective),
        });
        if eps < IRLS_EPS_FLOOR {
            termination = Termination::Converged;
            break;
        }
    }
    let iterations = trace.len();
    let all: Vec<usize> = (0..n).collect();
    let (support, coefficients) = prune_and_refit(instance, &all, x.as_slice(), k)?;
    Ok(RecoveryResult {
        n,
        support,
        coefficients,
        iterations,
        trace,
        termination,
        initial_residual_norm: y_norm,
    })
}

/// Least squares on the true support.
pub fn oracle_ls(instance: &ProblemInstance) -> Result<RecoveryResult> {
    let truth = instance.truth.as_ref().ok_or(Error::MissingGroundTruth)?;
    let support = truth.support().to_vec();
    let (coefficients, residual) = ls_on_support(&instance.matrix, &instance.y, &support)?;
    let rn = norm(&residual);
    Ok(RecoveryResult {
        n: instance.cols(),
        support: support.clone(),
        coefficients,
        iterations: 1,
        trace: vec![IterationRecord {
            selected: support.clone(),
            support,
            residual_norm: rn,
            tie: false,
            surrogate_objective: None,
        }],
        termination: Termination::ReachedKIterations,
        initial_residual_norm: norm(&instance.y),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{
        generate_gaussian_matrix, generate_sparse_signal, ResidualThreshold, SensingMatrix,
        SignalKind, SnrDb, SparseSignal,
    };

    #[test]
    fn cosamp_orthonormal_one_iteration() {
        let g = generate_gaussian_matrix(16, 16, 2, false);
        let phi = SensingMatrix::new(g.entries().clone().qr().q()).unwrap();
        let x = generate_sparse_signal(16, 4, SignalKind::Gaussian, 3).unwrap();
        let inst = ProblemInstance::noiseless(phi, x.clone()).unwrap();
        let p = AlgorithmParams::new(4, 1).with_max_iterations(COSAMP_MAX_ITERATIONS);
        let res = cosamp(&inst, &p).unwrap();
        assert_eq!(res.iterations, 1);
        assert_eq!(res.termination, Termination::ResidualBelowEpsilon);
        assert!(res.error_norm(&x) < 1e-12);
    }

    #[test]
    fn cosamp_respects_cap_and_returns_k() {
        for seed in 0..5 {
            let phi = generate_gaussian_matrix(40, 80, seed, true);
            let x = generate_sparse_signal(80, 8, SignalKind::Pam2, seed).unwrap();
            let inst = ProblemInstance::noiseless(phi, x)
                .unwrap()
                .add_noise(SnrDb::Finite(10.0), seed)
                .unwrap();
            let p = AlgorithmParams::new(8, 1).with_max_iterations(COSAMP_MAX_ITERATIONS);
            let res = cosamp(&inst, &p).unwrap();
            assert!(res.trace.len() <= COSAMP_MAX_ITERATIONS);
            assert_eq!(res.support.len(), 8);
        }
    }

    #[test]
    fn irls_one_sparse() {
        let phi = generate_gaussian_matrix(20, 40, 5, true);
        let x = SparseSignal::new(40, vec![17], vec![1.5]).unwrap();
        let inst = ProblemInstance::noiseless(phi, x.clone()).unwrap();
        let p = AlgorithmParams::new(1, 1).with_max_iterations(IRLS_MAX_ITERATIONS);
        let res = irls(&inst, &p).unwrap();
        assert!(res.error_norm(&x) < 1e-6);
    }

    #[test]
    fn irls_surrogate_non_increasing() {
        for seed in 0..5 {
            let phi = generate_gaussian_matrix(30, 60, seed, true);
            let x = generate_sparse_signal(60, 5, SignalKind::Gaussian, seed).unwrap();
            let inst = ProblemInstance::noiseless(phi, x.clone()).unwrap();
            let p = AlgorithmParams::new(5, 1).with_max_iterations(IRLS_MAX_ITERATIONS);
            let res = irls(&inst, &p).unwrap();
            let obj: Vec<f64> = res.trace.iter().map(|t| t.surrogate_objective.unwrap()).collect();
            for w in obj.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-9), "{} > {}", w[1], w[0]);
            }
            assert!(res.error_norm(&x) < 1e-6 * x.norm());
        }
    }

    #[test]
    fn oracle_noiseless_and_noisy() {
        let phi = generate_gaussian_matrix(30, 60, 1, true);
        let x = generate_sparse_signal(60, 6, SignalKind::Gaussian, 2).unwrap();
        let clean = ProblemInstance::noiseless(phi.clone(), x.clone()).unwrap();
        assert!(oracle_ls(&clean).unwrap().error_norm(&x) < 1e-12);

        let noisy = clean.add_noise(SnrDb::Finite(20.0), 3).unwrap();
        let res = oracle_ls(&noisy).unwrap();
        // Error equals pinv(Phi_T) v, computed through an SVD pseudoinverse.
        let a = phi.select_columns(x.support());
        let pinv = a.clone().pseudo_inverse(1e-14).unwrap();
        let v = DVector::from_column_slice(noisy.noise.as_ref().unwrap());
        let expect = (pinv * v).norm();
        assert!((res.error_norm(&x) - expect).abs() < 1e-10);
    }

    #[test]
    fn oracle_needs_truth() {
        let phi = generate_gaussian_matrix(4, 8, 1, true);
        let inst = ProblemInstance::new(phi, vec![0.0; 4]).unwrap();
        assert_eq!(oracle_ls(&inst), Err(Error::MissingGroundTruth));
    }

    #[test]
    fn epsilon_zero_cosamp_still_stops() {
        let phi = generate_gaussian_matrix(40, 80, 3, true);
        let x = generate_sparse_signal(80, 5, SignalKind::Gaussian, 3).unwrap();
        let inst = ProblemInstance::noiseless(phi, x).unwrap();
        let p = AlgorithmParams::new(5, 1)
            .with_epsilon(ResidualThreshold::Absolute(0.0))
            .with_max_iterations(COSAMP_MAX_ITERATIONS);
        let res = cosamp(&inst, &p).unwrap();
        assert!(res.iterations <= COSAMP_MAX_ITERATIONS);
    }
}
