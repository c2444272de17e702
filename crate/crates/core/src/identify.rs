//! The per-iteration selection rule.
//!
//! [`select_naive`] scores each candidate by the residual energy left after
//! adding it to the current support. [`select_fast`] ranks candidates by
//! `|<phi_i, r>| / ||P_perp phi_i||`, which orders them identically because
//! `||P_perp_{T + i} y||^2 = ||r||^2 - (|<phi_i, r>| / ||P_perp phi_i||)^2`.

use crate::error::{Error, Result};
use crate::linalg::{IncrementalBasis, NORM_FLOOR};
use crate::problem::{axpy, dot, SensingMatrix, SparseSignal};

/// Two scores closer than this are treated as tied.
pub const TIE_TOL: f64 = 1e-12;

/// Result of one selection step.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionOutcome {
    /// The `L` chosen indices, best first.
    pub chosen: Vec<usize>,
    /// Admissible candidates, increasing.
    pub candidates: Vec<usize>,
    /// Score of each admissible candidate (aligned with `candidates`).
    pub scores: Vec<f64>,
    /// Set when the `L`-th and `(L+1)`-th scores are within [`TIE_TOL`].
    pub tie_note: bool,
}

/// Top-`l` of `scores` with lowest index winning ties within [`TIE_TOL`].
///
/// Returns the chosen entries of `candidates` in rank order and the tie flag.
pub fn top_l(candidates: &[usize], scores: &[f64], l: usize) -> (Vec<usize>, bool) {
    assert!(l <= candidates.len());
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b].total_cmp(&scores[a]).then(candidates[a].cmp(&candidates[b]))
    });
    if l == 0 {
        return (Vec::new(), false);
    }
    let threshold = scores[order[l - 1]];
    let tie_note = order.len() > l && (scores[order[l]] - threshold).abs() <= TIE_TOL;
    let mut chosen: Vec<usize> = order
        .iter()
        .filter(|&&p| scores[p] > threshold + TIE_TOL)
        .map(|&p| candidates[p])
        .collect();
    let mut boundary: Vec<usize> = order
        .iter()
        .filter(|&&p| (scores[p] - threshold).abs() <= TIE_TOL)
        .map(|&p| candidates[p])
        .collect();
    boundary.sort_unstable();
    let need = l - chosen.len();
    chosen.extend(boundary.into_iter().take(need));
    (chosen, tie_note)
}

fn exhausted(available: usize, requested: usize) -> Error {
    Error::ExhaustedCandidates { available, requested }
}

/// Fast rule: top-`L` of `|<phi_i, r>| / ||P_perp phi_i||`.
///
/// `projected_norms[i]` must be `||P_perp phi_i||` for the current basis, with
/// zero marking selected or in-span columns; those are not admissible.
pub fn select_fast(
    matrix: &SensingMatrix,
    residual: &[f64],
    projected_norms: &[f64],
    l: usize,
) -> Result<SelectionOutcome> {
    let mut candidates = Vec::new();
    let mut scores = Vec::new();
    for (i, &pn) in projected_norms.iter().enumerate() {
        if pn > 0.0 {
            candidates.push(i);
            scores.push(dot(matrix.col(i), residual).abs() / pn);
        }
    }
    if candidates.len() < l {
        return Err(exhausted(candidates.len(), l));
    }
    let (chosen, tie_note) = top_l(&candidates, &scores, l);
    Ok(SelectionOutcome { chosen, candidates, scores, tie_note })
}

/// Residual energy `||P_perp_{T + i} y||^2` after a trial append of column `i`
/// to `basis`, or `None` when the column is numerically in the span.
pub fn augmented_residual_sq(
    matrix: &SensingMatrix,
    basis: &IncrementalBasis,
    residual: &[f64],
    i: usize,
) -> Option<f64> {
    let col = matrix.col(i);
    let mut w = basis.project_out(col);
    let wn = dot(&w, &w).sqrt();
    if wn <= NORM_FLOOR * dot(col, col).sqrt() {
        return None;
    }
    w.iter_mut().for_each(|v| *v /= wn);
    let mut r = residual.to_vec();
    axpy(-dot(&w, residual), &w, &mut r);
    Some(dot(&r, &r))
}

/// Oracle rule: for every candidate `i` outside `current_support`, solve the
/// augmented least-squares problem on `current_support + {i}` and keep the `L`
/// candidates with the smallest residual energy. Scores are the negated energies.
pub fn select_naive(
    matrix: &SensingMatrix,
    y: &[f64],
    current_support: &[usize],
    l: usize,
) -> Result<SelectionOutcome> {
    let basis = IncrementalBasis::from_support(matrix, current_support)?;
    let residual = basis.project_out(y);
    let mut in_support = vec![false; matrix.cols()];
    for &j in current_support {
        in_support[j] = true;
    }
    let mut candidates = Vec::new();
    let mut scores = Vec::new();
    for i in (0..matrix.cols()).filter(|&i| !in_support[i]) {
        if let Some(e) = augmented_residual_sq(matrix, &basis, &residual, i) {
            candidates.push(i);
            scores.push(-e);
        }
    }
    if candidates.len() < l {
        return Err(exhausted(candidates.len(), l));
    }
    let (chosen, tie_note) = top_l(&candidates, &scores, l);
    Ok(SelectionOutcome { chosen, candidates, scores, tie_note })
}

/// The quantities compared in the exact-selection argument: `u1`, the largest
/// ratio over true indices not yet selected, and `v_l`, the `L`-th largest
/// ratio over indices outside both the true and the current support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probes {
    pub u1: f64,
    pub v_l: f64,
}

/// Computes [`Probes`] for the current residual and support.
///
/// Ratios of inadmissible columns count as zero, and `v_l` is zero when fewer
/// than `L` incorrect candidates remain.
pub fn iteration_probes(
    matrix: &SensingMatrix,
    residual: &[f64],
    basis: &IncrementalBasis,
    projected_norms: &[f64],
    truth: &SparseSignal,
    l: usize,
) -> Result<Probes> {
    let n = matrix.cols();
    let mut in_truth = vec![false; n];
    for &j in truth.support() {
        in_truth[j] = true;
    }
    let mut selected = vec![false; n];
    for &j in basis.support() {
        selected[j] = true;
    }
    let ratio = |i: usize| {
        let pn = projected_norms[i];
        if pn > 0.0 {
            dot(matrix.col(i), residual).abs() / pn
        } else {
            0.0
        }
    };
    let missing: Vec<usize> = truth.support().iter().copied().filter(|&j| !selected[j]).collect();
    if missing.is_empty() {
        return Err(Error::ProbeNotApplicable);
    }
    let u1 = missing.iter().map(|&i| ratio(i)).fold(0.0, f64::max);
    let mut wrong: Vec<f64> =
        (0..n).filter(|&i| !in_truth[i] && !selected[i]).map(ratio).collect();
    wrong.sort_by(|a, b| b.total_cmp(a));
    let v_l = wrong.get(l - 1).copied().unwrap_or(0.0);
    Ok(Probes { u1, v_l })
}
