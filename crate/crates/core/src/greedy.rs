//! MOLS (with OLS as `L = 1`) and OMP.

use crate::error::{Error, Result};
use crate::identify::{select_fast, top_l};
use crate::linalg::{ls_on_support, norm, IncrementalBasis, ProjectedNorms};
use crate::problem::{dot, AlgorithmParams, ProblemInstance, SparseSignal};

/// Why a solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Termination {
    ResidualBelowEpsilon,
    /// The iteration cap was reached (`K` for the greedy solvers).
    ReachedKIterations,
    ExhaustedCandidates,
    RankDeficient,
    /// CoSaMP: the residual norm stopped changing.
    Stalled,
    /// IRLS: the smoothing parameter reached its floor.
    Converged,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::ResidualBelowEpsilon => "residual_below_epsilon",
            Termination::ReachedKIterations => "reached_K_iterations",
            Termination::ExhaustedCandidates => "exhausted_candidates",
            Termination::RankDeficient => "rank_deficient",
            Termination::Stalled => "stalled",
            Termination::Converged => "converged",
        }
    }

    /// True for terminations that indicate the solver could not proceed.
    pub fn is_failure(&self) -> bool {
        matches!(self, Termination::ExhaustedCandidates | Termination::RankDeficient)
    }
}

/// One iteration of a solver.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// Indices added in this iteration, in rank order.
    pub selected: Vec<usize>,
    /// Support after this iteration, in insertion order.
    pub support: Vec<usize>,
    /// `||r^k||`.
    pub residual_norm: f64,
    /// Whether the selection hit a score tie at its boundary.
    pub tie: bool,
    /// Solver-specific objective (IRLS smoothed l1 norm).
    pub surrogate_objective: Option<f64>,
}

/// Output of any solver.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    pub n: usize,
    /// Estimated support, increasing, of size `K`.
    pub support: Vec<usize>,
    /// Estimated values aligned with `support`. Entries can be zero when the
    /// solver stopped before gathering `K` indices.
    pub coefficients: Vec<f64>,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
    pub termination: Termination,
    /// `||y||`, the residual norm before the first iteration.
    pub initial_residual_norm: f64,
}

impl RecoveryResult {
    pub fn to_dense(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (&i, &v) in self.support.iter().zip(&self.coefficients) {
            x[i] = v;
        }
        x
    }

    /// `||x - x_hat||`.
    pub fn error_norm(&self, truth: &SparseSignal) -> f64 {
        let mut d = self.to_dense();
        for (&i, &v) in truth.support().iter().zip(truth.values()) {
            d[i] -= v;
        }
        norm(&d)
    }

    /// `(1/n) ||x - x_hat||^2`.
    pub fn mse(&self, truth: &SparseSignal) -> f64 {
        self.error_norm(truth).powi(2) / self.n as f64
    }

    /// The support accumulated by the last iteration (`T^l`).
    pub fn final_iterate_support(&self) -> &[usize] {
        self.trace.last().map(|t| t.support.as_slice()).unwrap_or(&[])
    }

    /// Residual norms `||r^0||, ||r^1||, ...`.
    pub fn residual_norms(&self) -> Vec<f64> {
        std::iter::once(self.initial_residual_norm)
            .chain(self.trace.iter().map(|t| t.residual_norm))
            .collect()
    }
}

/// Keeps the `k` entries of `coef` (aligned with `support`) with the largest
/// magnitude, lowest index winning ties, refits by least squares and pads with
/// zero-valued indices if fewer than `k` are available.
pub(crate) fn prune_and_refit(
    instance: &ProblemInstance,
    support: &[usize],
    coef: &[f64],
    k: usize,
) -> Result<(Vec<usize>, Vec<f64>)> {
    let keep = if support.len() > k {
        let mags: Vec<f64> = coef.iter().map(|c| c.abs()).collect();
        top_l(support, &mags, k).0
    } else {
        support.to_vec()
    };
    let mut keep = keep;
    keep.sort_unstable();
    let (fit, _) = if keep.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        ls_on_support(&instance.matrix, &instance.y, &keep)?
    };
    let mut pairs: Vec<(usize, f64)> = keep.into_iter().zip(fit).collect();
    let mut pad = 0;
    while pairs.len() < k.min(instance.cols()) {
        if !pairs.iter().any(|p| p.0 == pad) {
            pairs.push((pad, 0.0));
        }
        pad += 1;
    }
    pairs.sort_unstable_by_key(|p| p.0);
    Ok(pairs.into_iter().unzip())
}

enum Rule {
    Mols,
    Omp,
}

fn greedy_loop(instance: &ProblemInstance, params: &AlgorithmParams, rule: Rule) -> Result<RecoveryResult> {
    let matrix = &instance.matrix;
    let y = &instance.y;
    let (m, n) = (matrix.rows(), matrix.cols());
    params.validate(m, n)?;
    let k_target = params.sparsity;
    let l = match rule {
        Rule::Mols => params.selection,
        Rule::Omp => 1,
    };
    let y_norm = norm(y);
    let eps = params.epsilon.resolve(y_norm);

    let mut basis = IncrementalBasis::new(m);
    let mut pn = ProjectedNorms::new(matrix);
    let mut residual = y.clone();
    let mut rn = y_norm;
    let mut trace = Vec::new();
    let mut k = 0;
    let mut termination = None;

    while (rn >= eps && k < params.max_iterations) || l * k < k_target {
        let norms = pn.norms();
        let selection = match rule {
            Rule::Mols => select_fast(matrix, &residual, &norms, l),
            Rule::Omp => {
                let candidates: Vec<usize> = (0..n).filter(|&i| norms[i] > 0.0).collect();
                if candidates.is_empty() {
                    Err(Error::ExhaustedCandidates { available: 0, requested: 1 })
                } else {
                    let scores: Vec<f64> =
                        candidates.iter().map(|&i| dot(matrix.col(i), &residual).abs()).collect();
                    let (chosen, tie) = top_l(&candidates, &scores, 1);
                    Ok(crate::identify::SelectionOutcome {
                        chosen,
                        candidates,
                        scores,
                        tie_note: tie,
                    })
                }
            }
        };
        let selection = match selection {
            Ok(s) => s,
            Err(Error::ExhaustedCandidates { .. }) => {
                termination = Some(Termination::ExhaustedCandidates);
                break;
            }
            Err(e) => return Err(e),
        };
        let from = basis.dim();
        let mut grown = basis.clone();
        let mut rank_failure = false;
        for &j in &selection.chosen {
            if grown.append(matrix, j).is_err() {
                rank_failure = true;
                break;
            }
        }
        if rank_failure {
            termination = Some(Termination::RankDeficient);
            break;
        }
        basis = grown;
        pn.update(matrix, &basis, from);
        k += 1;
        residual = basis.project_out(y);
        rn = norm(&residual);
        trace.push(IterationRecord {
            selected: selection.chosen,
            support: basis.support().to_vec(),
            residual_norm: rn,
            tie: selection.tie_note,
            surrogate_objective: None,
        });
    }
    let termination = termination.unwrap_or(if rn < eps {
        Termination::ResidualBelowEpsilon
    } else {
        Termination::ReachedKIterations
    });
    let coef = basis.coefficients(y);
    let (support, coefficients) = prune_and_refit(instance, basis.support(), &coef, k_target)?;
    Ok(RecoveryResult {
        n,
        support,
        coefficients,
        iterations: k,
        trace,
        termination,
        initial_residual_norm: y_norm,
    })
}

/// Multiple orthogonal least squares.
///
/// Each iteration adds the `L` columns whose inclusion most reduces the
/// residual, then refits by least squares. The loop runs while
/// `(||r|| >= eps and k < max_iterations) or L k < K`, so at least `K` indices
/// are gathered. The output keeps the `K` largest entries and refits on them.
pub fn mols(instance: &ProblemInstance, params: &AlgorithmParams) -> Result<RecoveryResult> {
    greedy_loop(instance, params, Rule::Mols)
}

/// Orthogonal least squares: [`mols`] with `L = 1`.
pub fn ols(instance: &ProblemInstance, params: &AlgorithmParams) -> Result<RecoveryResult> {
    let mut p = *params;
    p.selection = 1;
    mols(instance, &p)
}

/// Orthogonal matching pursuit: one index of largest `|<phi_i, r>|` per
/// iteration, `K` iterations. `params.selection` is ignored.
pub fn omp(instance: &ProblemInstance, params: &AlgorithmParams) -> Result<RecoveryResult> {
    let mut p = *params;
    p.selection = 1;
    greedy_loop(instance, &p, Rule::Omp)
}
