use super::{BoundCheck, Relation, RipReport};
use crate::error::{Error, Result};
use crate::greedy::{RecoveryResult, Termination};
use crate::identify::iteration_probes;
use crate::identify::Probes;
use crate::linalg::{norm, projected_column_norms, IncrementalBasis, NORM_FLOOR};
use crate::problem::{ProblemInstance, SparseSignal};

/// Exact-recovery condition on the isometry constants:
/// `delta_{LK} < sqrt(L) / (sqrt(K) + 2 sqrt(L))` for `L > 1`, and
/// `delta_{K+1} < 1 / (sqrt(K) + 2)` for `L = 1`.
pub fn recovery_condition(k: usize, l: usize, delta_lk: f64, delta_k1: f64) -> BoundCheck {
    let sk = (k as f64).sqrt();
    if l == 1 {
        BoundCheck::new("recovery_condition_ols", delta_k1, 1.0 / (sk + 2.0), Relation::Lt, true)
    } else {
        let sl = (l as f64).sqrt();
        BoundCheck::new("recovery_condition_mols", delta_lk, sl / (sk + 2.0 * sl), Relation::Lt, true)
    }
}

/// [`recovery_condition`] with the constants taken from a report.
pub fn recovery_condition_from(rip: &RipReport, k: usize, l: usize) -> Result<BoundCheck> {
    if l == 1 {
        Ok(recovery_condition(k, l, f64::NAN, rip.delta(k + 1)?))
    } else {
        Ok(recovery_condition(k, l, rip.delta(l * k)?, f64::NAN))
    }
}

/// Contraction factor of the residual energy at iteration `k`:
///
/// `alpha(k, L) = 1 - L (1 - d_{Lk} - d_{Lk+1}^2)(1 - d_{K+Lk})^2 /
///                    (K (1 + d_L)(1 - d_{Lk})(1 + d_{K+Lk}))`.
///
/// `None` when a factor of the derivation is non-positive (the constants
/// exceed 1) or the result falls outside `(0, 1)`.
pub fn alpha(rip: &RipReport, k: usize, big_k: usize, l: usize) -> Result<Option<f64>> {
    let d_l = rip.delta(l)?;
    let d_lk = rip.delta(l * k)?;
    let d_lk1 = rip.delta(l * k + 1)?;
    let d_klk = rip.delta(big_k + l * k)?;
    let num_factor = 1.0 - d_lk - d_lk1 * d_lk1;
    if d_lk >= 1.0 || d_klk >= 1.0 || num_factor <= 0.0 {
        return Ok(None);
    }
    let a = 1.0
        - (l as f64 * num_factor * (1.0 - d_klk).powi(2))
            / (big_k as f64 * (1.0 + d_l) * (1.0 - d_lk) * (1.0 + d_klk));
    Ok((a > 0.0 && a < 1.0).then_some(a))
}

/// Per-iteration residual decay checks for a noiseless run:
/// `||r^{k+1}||^2 <= alpha(k, L)^{k+1} ||y||^2` (`residual_decay`) and the
/// one-step form `||r^{k+1}||^2 <= alpha(k, L) ||r^k||^2`
/// (`residual_step_decay`), for every recorded iteration with `k < K`.
pub fn residual_decay_check(
    result: &RecoveryResult,
    rip: &RipReport,
    big_k: usize,
    l: usize,
) -> Result<Vec<BoundCheck>> {
    let norms = result.residual_norms();
    let y_sq = norms[0].powi(2);
    let mut out = Vec::new();
    for k in 0..result.iterations.min(big_k) {
        let a = alpha(rip, k, big_k, l)?;
        let lhs = norms[k + 1].powi(2);
        let (rhs, rhs_step, ok) = match a {
            Some(a) => (a.powi(k as i32 + 1) * y_sq, a * norms[k].powi(2), true),
            None => (f64::NAN, f64::NAN, false),
        };
        out.push(BoundCheck::new(format!("residual_decay[k={k}]"), lhs, rhs, Relation::Le, ok));
        out.push(BoundCheck::new(
            format!("residual_step_decay[k={k}]"),
            lhs,
            rhs_step,
            Relation::Le,
            ok,
        ));
    }
    Ok(out)
}

/// Support bookkeeping at the start of iteration `k + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationState {
    /// Number of completed iterations; `|T^k| = L k`.
    pub k: usize,
    /// `|T intersect T^k|`.
    pub ell: usize,
    /// `||x_{T \ T^k}||`.
    pub missing_norm: f64,
    /// `||v||`, zero for noiseless measurements.
    pub noise_norm: f64,
}

/// Lower bound on `u1` and upper bound on `v_L` at one iteration.
///
/// Noiseless form:
/// `u1 >= (1 - d_{K+Lk-l}) / sqrt(K - l) * ||x_miss||` and
/// `v_L <= sqrt(1 + d_{Lk+1}^2 / (1 - d_{Lk} - d_{Lk+1}^2))
///         * (d_{L+K-l} + d_{L+Lk} d_{Lk+K-l} / (1 - d_{Lk})) * ||x_miss|| / sqrt(L)`.
/// With `noisy`, the `u1` bound loses `sqrt(1 + d_{K+Lk-l}) ||v|| / sqrt(K - l)`
/// and the bracket of the `v_L` bound gains `sqrt(1 + d_{L+Lk}) ||v||`.
/// Both require unit-norm columns.
pub fn iteration_bound_check(
    probes: Probes,
    state: IterationState,
    rip: &RipReport,
    big_k: usize,
    l: usize,
    noisy: bool,
) -> Result<Vec<BoundCheck>> {
    let IterationState { k, ell, missing_norm, noise_norm } = state;
    if ell >= big_k {
        return Err(Error::ProbeNotApplicable);
    }
    let lk = l * k;
    let d_u = rip.delta(big_k + lk - ell)?;
    let d_lk = rip.delta(lk)?;
    let d_lk1 = rip.delta(lk + 1)?;
    let d_lkl = rip.delta(l + big_k - ell)?;
    let d_llk = rip.delta(l + lk)?;
    let d_lkk = rip.delta(lk + big_k - ell)?;
    let v = if noisy { noise_norm } else { 0.0 };
    let all_below_one = [d_u, d_lk, d_lk1, d_lkl, d_llk, d_lkk].iter().all(|d| *d < 1.0);
    let factor = 1.0 - d_lk - d_lk1 * d_lk1;

    let root = ((big_k - ell) as f64).sqrt();
    let u_rhs = ((1.0 - d_u) * missing_norm - (1.0 + d_u).sqrt() * v) / root;
    let v_rhs = if factor > 0.0 {
        (1.0 + d_lk1 * d_lk1 / factor).sqrt()
            * ((d_lkl + d_llk * d_lkk / (1.0 - d_lk)) * missing_norm + (1.0 + d_llk).sqrt() * v)
            / (l as f64).sqrt()
    } else {
        f64::NAN
    };
    let tag = if noisy { "noisy" } else { "noiseless" };
    Ok(vec![
        BoundCheck::new(format!("u1_lower_{tag}[k={k}]"), probes.u1, u_rhs, Relation::Ge, all_below_one),
        BoundCheck::new(
            format!("vL_upper_{tag}[k={k}]"),
            probes.v_l,
            v_rhs,
            Relation::Le,
            all_below_one && factor > 0.0,
        ),
    ])
}

/// Replays a MOLS trace and, at every iteration where a true index is still
/// missing, recomputes the probes from scratch and evaluates
/// [`iteration_bound_check`] plus the implication check
/// `u1 > v_L => the next selection contains a true index` (`probe_implication`).
pub fn probe_trace_checks(
    instance: &ProblemInstance,
    result: &RecoveryResult,
    rip: &RipReport,
    big_k: usize,
    l: usize,
    noisy: bool,
) -> Result<Vec<BoundCheck>> {
    let truth = instance.truth.as_ref().ok_or(Error::MissingGroundTruth)?;
    let noise_norm = match (&instance.noise, noisy) {
        (Some(v), true) => norm(v),
        (None, true) => return Err(Error::MissingNoise),
        _ => 0.0,
    };
    let matrix = &instance.matrix;
    let all: Vec<usize> = (0..matrix.cols()).collect();
    let mut out = Vec::new();
    for k in 0..result.trace.len() {
        let support: &[usize] = if k == 0 { &[] } else { &result.trace[k - 1].support };
        let basis = IncrementalBasis::from_support(matrix, support)?;
        let residual = basis.project_out(&instance.y);
        let mut pn = projected_column_norms(matrix, &basis, &all);
        for (i, p) in pn.iter_mut().enumerate() {
            if support.contains(&i) || *p <= NORM_FLOOR * matrix.column_norm(i) {
                *p = 0.0;
            }
        }
        let probes = match iteration_probes(matrix, &residual, &basis, &pn, truth, l) {
            Ok(p) => p,
            Err(Error::ProbeNotApplicable) => break,
            Err(e) => return Err(e),
        };
        let (ell, missing_norm) = overlap(truth, support);
        let state = IterationState { k, ell, missing_norm, noise_norm };
        out.extend(iteration_bound_check(probes, state, rip, big_k, l, noisy)?);
        let hits = result.trace[k]
            .selected
            .iter()
            .filter(|j| truth.support().binary_search(j).is_ok())
            .count();
        out.push(BoundCheck::new(
            format!("probe_implication[k={k}]"),
            hits as f64,
            1.0,
            Relation::Ge,
            probes.u1 > probes.v_l,
        ));
    }
    Ok(out)
}

fn overlap(truth: &SparseSignal, support: &[usize]) -> (usize, f64) {
    let mut ell = 0;
    let mut sq = 0.0;
    for (&j, &v) in truth.support().iter().zip(truth.values()) {
        if support.contains(&j) {
            ell += 1;
        } else {
            sq += v * v;
        }
    }
    (ell, sq.sqrt())
}

/// Noise condition under which `K` iterations catch the whole support:
/// `sqrt(snr) >= 2 (1 + d_{K+1}) sqrt(K) / (kappa (1 - (sqrt(K) + 2) d_{K+1}))`
/// for `L = 1`, and
/// `sqrt(snr) >= (sqrt(L) + 1)(1 + d_{LK}) sqrt(K) / (kappa (sqrt(L) - (sqrt(K) + 2 sqrt(L)) d_{LK}))`
/// for `L > 1`. Not applicable when the denominator is non-positive.
pub fn snr_condition(big_k: usize, l: usize, delta: f64, kappa: f64, snr: f64) -> BoundCheck {
    let sk = (big_k as f64).sqrt();
    let sl = (l as f64).sqrt();
    let (num, den) = if l == 1 {
        (2.0 * (1.0 + delta), 1.0 - (sk + 2.0) * delta)
    } else {
        ((sl + 1.0) * (1.0 + delta), sl - (sk + 2.0 * sl) * delta)
    };
    let rhs = if den > 0.0 && kappa > 0.0 { num * sk / (kappa * den) } else { f64::NAN };
    BoundCheck::new("snr_condition", snr.sqrt(), rhs, Relation::Ge, den > 0.0 && kappa > 0.0)
}

/// Distortion bounds for a run that stopped with `||r^l|| <= eps` after
/// `l < K` iterations.
///
/// `eps_stop_distortion` evaluates the literal form
/// `(2 eps sqrt(1 - d_2K) + 2 (sqrt(1 - d_2K) + sqrt(1 - d_{Ll+K})) ||v||)
///   / sqrt((1 - d_{Ll+K})(1 + d_2K))`.
/// `eps_stop_distortion_rip_consistent` evaluates the bound obtained when each
/// isometry inequality is applied in its valid direction:
/// `(2 sqrt(1 + d_2K)(eps + ||v||) / sqrt(1 - d_{Ll+K}) + 2 ||v||) / sqrt(1 - d_2K)`.
pub fn distortion_checks_after_epsilon_stop(
    result: &RecoveryResult,
    truth: &SparseSignal,
    noise_norm: f64,
    rip: &RipReport,
    big_k: usize,
    l: usize,
    epsilon: f64,
) -> Result<Vec<BoundCheck>> {
    let iters = result.iterations;
    let applicable = result.termination == Termination::ResidualBelowEpsilon && iters < big_k;
    if !applicable {
        return Ok(Vec::new());
    }
    let d_a = rip.delta(l * iters + big_k)?;
    let d_2k = rip.delta(2 * big_k)?;
    let ok = d_a < 1.0 && d_2k < 1.0;
    let err = result.error_norm(truth);
    let literal = (2.0 * epsilon * (1.0 - d_2k).sqrt()
        + 2.0 * ((1.0 - d_2k).sqrt() + (1.0 - d_a).sqrt()) * noise_norm)
        / ((1.0 - d_a) * (1.0 + d_2k)).sqrt();
    let consistent = (2.0 * (1.0 + d_2k).sqrt() * (epsilon + noise_norm) / (1.0 - d_a).sqrt()
        + 2.0 * noise_norm)
        / (1.0 - d_2k).sqrt();
    Ok(vec![
        BoundCheck::new("eps_stop_distortion", err, literal, Relation::Le, ok),
        BoundCheck::new("eps_stop_distortion_rip_consistent", err, consistent, Relation::Le, ok),
    ])
}

/// Noisy guarantees for a MOLS run on `instance`.
///
/// * After an `eps` stop before `K` iterations: the checks of
///   [`distortion_checks_after_epsilon_stop`].
/// * After `K` iterations: the recovery condition and [`snr_condition`];
///   when both hold, `T` must be contained in `T^K` (`noisy_support_inclusion`)
///   and the distortion must satisfy `||v|| / sqrt(1 - d_K)` for `L = 1` or
///   `(1 + sqrt((1 - d_2K) / (1 - d_LK))) 2 ||v|| / sqrt(1 + d_2K)` for `L > 1`
///   (`noisy_distortion`). For `L > 1` the form with isometry inequalities in
///   their valid direction,
///   `(2 sqrt(1 + d_2K) / sqrt(1 - d_LK) + 2) ||v|| / sqrt(1 - d_2K)`, is
///   reported as `noisy_distortion_rip_consistent`.
pub fn noisy_guarantee_check(
    result: &RecoveryResult,
    instance: &ProblemInstance,
    rip: &RipReport,
    big_k: usize,
    l: usize,
    epsilon: f64,
) -> Result<Vec<BoundCheck>> {
    let truth = instance.truth.as_ref().ok_or(Error::MissingGroundTruth)?;
    let noise = instance.noise.as_ref().ok_or(Error::MissingNoise)?;
    let v = norm(noise);
    let mut out =
        distortion_checks_after_epsilon_stop(result, truth, v, rip, big_k, l, epsilon)?;
    if result.iterations != big_k {
        return Ok(out);
    }
    let (snr, kappa) = instance.snr_and_mar()?;
    let cond = recovery_condition_from(rip, big_k, l)?;
    let delta = if l == 1 { rip.delta(big_k + 1)? } else { rip.delta(l * big_k)? };
    let snr_ok = snr_condition(big_k, l, delta, kappa, snr);
    let guaranteed = cond.satisfied && snr_ok.satisfied;
    out.push(cond);
    out.push(snr_ok);

    let t_k = result.final_iterate_support();
    let caught = truth.support().iter().filter(|j| t_k.contains(j)).count();
    out.push(BoundCheck::new(
        "noisy_support_inclusion",
        caught as f64,
        big_k as f64,
        Relation::Ge,
        guaranteed,
    ));
    let err = result.error_norm(truth);
    if l == 1 {
        let d_k = rip.delta(big_k)?;
        out.push(BoundCheck::new(
            "noisy_distortion",
            err,
            v / (1.0 - d_k).sqrt(),
            Relation::Le,
            guaranteed && d_k < 1.0,
        ));
        let exact = result.support == truth.support();
        out.push(BoundCheck::new(
            "noisy_exact_support",
            if exact { 1.0 } else { 0.0 },
            1.0,
            Relation::Ge,
            guaranteed,
        ));
    } else {
        let d_2k = rip.delta(2 * big_k)?;
        let d_lk = rip.delta(l * big_k)?;
        let ok = guaranteed && d_2k < 1.0 && d_lk < 1.0;
        let literal = (1.0 + ((1.0 - d_2k) / (1.0 - d_lk)).sqrt()) * 2.0 * v / (1.0 + d_2k).sqrt();
        let consistent = (2.0 * (1.0 + d_2k).sqrt() / (1.0 - d_lk).sqrt() + 2.0) * v / (1.0 - d_2k).sqrt();
        out.push(BoundCheck::new("noisy_distortion", err, literal, Relation::Le, ok));
        out.push(BoundCheck::new(
            "noisy_distortion_rip_consistent",
            err,
            consistent,
            Relation::Le,
            ok,
        ));
    }
    Ok(out)
}

/// Spot check of `f(d) > g(d)` on an evenly spaced interior grid of
/// `(0, (sqrt(5) - 1) / 2)`, where
/// `f(d) = (1 - d)^{3/2} (1 - d - d^2)^{1/2} / d` and `g(d) = 1/d - 2`.
/// Returns the smallest margin `f - g` found as `lhs`.
pub fn f_exceeds_g_on_grid(points: usize) -> BoundCheck {
    let upper = (5f64.sqrt() - 1.0) / 2.0;
    let mut min_margin = f64::INFINITY;
    for i in 1..=points {
        let d = upper * i as f64 / (points + 1) as f64;
        let f = (1.0 - d).powf(1.5) * (1.0 - d - d * d).sqrt() / d;
        let g = 1.0 / d - 2.0;
        min_margin = min_margin.min(f - g);
    }
    BoundCheck::new("f_exceeds_g", 0.0, min_margin, Relation::Lt, points > 0)
}
