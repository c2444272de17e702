//! Isometry-constant lemma checks against exact enumerated constants. Each
//! check takes a fixture seed and returns the number of inequalities it
//! evaluated, or a description of the first violation.

use super::*;
use itertools::Itertools;
use mols::analysis::{rip_bruteforce, support_deviation, RipReport};
use mols::linalg::{gram, symmetric_eigen_extremes};
use mols::problem::generate_gaussian_matrix;
use mols::rng::rng_from_seed;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub const MATRICES: u64 = 50;
const MAX_ORDER: usize = 4;
const TOL: f64 = 1e-10;

pub type Check = fn(u64) -> Result<usize, String>;

pub const ALL: [(&str, Check); 6] = [
    ("delta monotone", delta_monotone),
    ("gram bounds", gram_bounds),
    ("cross correlation", cross_correlation),
    ("adjoint norm", adjoint_norm),
    ("projected gram interlacing", projected_gram_interlacing),
    ("pinv transpose bounds", pinv_transpose_bounds),
];

/// Small random matrices; every third one is left unnormalized.
pub fn fixture(seed: u64) -> (SensingMatrix, RipReport) {
    let m = 8 + (seed % 5) as usize;
    let n = 12 + (seed % 4) as usize;
    let phi = generate_gaussian_matrix(m, n, 1000 + seed, seed % 3 != 0);
    let rip = rip_bruteforce(&phi, MAX_ORDER).unwrap();
    (phi, rip)
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Monotonicity of `delta_s` in `s`.
pub fn delta_monotone(seed: u64) -> Result<usize, String> {
    let (_, rip) = fixture(seed);
    ensure(rip.delta(0) == Ok(0.0), || "delta_0 != 0".into())?;
    ensure(rip.delta.iter().all(|d| *d >= 0.0), || "negative delta".into())?;
    for s in 1..MAX_ORDER {
        let (a, b) = (rip.delta(s).unwrap(), rip.delta(s + 1).unwrap());
        ensure(a <= b + TOL, || format!("seed {seed}: delta_{s} = {a} > delta_{} = {b}", s + 1))?;
    }
    Ok(MAX_ORDER)
}

/// `(1 - d)||u|| <= ||G u|| <= (1 + d)||u||` and the inverse form, with the
/// exact per-support deviation `d`, for every support of size up to 3.
pub fn gram_bounds(seed: u64) -> Result<usize, String> {
    let (phi, rip) = fixture(seed);
    let mut rng = rng_from_seed(seed);
    let full = phi.entries().transpose() * phi.entries();
    let mut count = 0;
    for s in 1..=3 {
        let global = rip.delta(s).unwrap();
        for support in (0..phi.cols()).combinations(s) {
            let g = gram(&phi, &support);
            let (d, lo, hi) = support_deviation(&full, &support);
            ensure(d <= global + TOL, || format!("seed {seed}: support deviation above delta_{s}"))?;
            let inv = (d < 1.0).then(|| g.clone().try_inverse().unwrap());
            for _ in 0..200 {
                let u = DVector::from_vec(gaussian_vec(&mut rng, s));
                let un = u.norm();
                let gu = (&g * &u).norm();
                ensure(gu >= (1.0 - d - TOL) * un && gu <= (1.0 + d + TOL) * un, || {
                    format!("seed {seed}, support {support:?}: ||Gu|| = {gu} outside (1 -+ {d}) {un}")
                })?;
                ensure(gu >= (lo - TOL) * un && gu <= (hi + TOL) * un, || {
                    format!("seed {seed}, support {support:?}: ||Gu|| outside eigenvalue range")
                })?;
                count += 2;
                if let Some(inv) = &inv {
                    let iu = (inv * &u).norm();
                    ensure(
                        iu >= un / (1.0 + d) * (1.0 - TOL) && iu <= un / (1.0 - d) * (1.0 + TOL),
                        || format!("seed {seed}, support {support:?}: inverse bound fails"),
                    )?;
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// `||Phi_{S1}^T Phi v|| <= delta_{|S1| + |S2|} ||v||` for disjoint supports.
pub fn cross_correlation(seed: u64) -> Result<usize, String> {
    let (phi, rip) = fixture(seed);
    let mut rng = rng_from_seed(100 + seed);
    let mut count = 0;
    for _ in 0..200 {
        let total = rng.gen_range(2..=MAX_ORDER);
        let all = random_support(&mut rng, phi.cols(), total);
        let (s1, s2) = all.split_at(rng.gen_range(1..total));
        let delta = rip.delta(total).unwrap();
        if delta >= 1.0 {
            continue;
        }
        let mut v = vec![0.0; phi.cols()];
        for &j in s2 {
            v[j] = gaussian_vec(&mut rng, 1)[0];
        }
        let w = phi.apply(&v);
        let lhs = s1.iter().map(|&j| dot(phi.col(j), &w).powi(2)).sum::<f64>().sqrt();
        ensure(lhs <= delta * norm(&v) + TOL, || {
            format!("seed {seed}: {lhs} > {}", delta * norm(&v))
        })?;
        count += 1;
    }
    Ok(count)
}

/// `||Phi_S^T u|| <= sqrt(1 + delta_|S|) ||u||`.
pub fn adjoint_norm(seed: u64) -> Result<usize, String> {
    let (phi, rip) = fixture(seed);
    let mut rng = rng_from_seed(200 + seed);
    for _ in 0..200 {
        let s = rng.gen_range(1..=MAX_ORDER);
        let support = random_support(&mut rng, phi.cols(), s);
        let delta = rip.delta(s).unwrap();
        let u = gaussian_vec(&mut rng, phi.rows());
        let lhs = support.iter().map(|&j| dot(phi.col(j), &u).powi(2)).sum::<f64>().sqrt();
        ensure(lhs <= (1.0 + delta).sqrt() * norm(&u) + TOL, || {
            format!("seed {seed}: {lhs} > sqrt(1 + {delta}) ||u||")
        })?;
    }
    Ok(200)
}

/// Extreme eigenvalues of `Phi_{S1}^T P_perp_{S2} Phi_{S1}` lie within those of
/// the Gram matrix on `S1 + S2`, for disjoint `S1`, `S2`.
pub fn projected_gram_interlacing(seed: u64) -> Result<usize, String> {
    let (phi, _) = fixture(seed);
    let mut rng = rng_from_seed(300 + seed);
    for _ in 0..50 {
        let all = random_support(&mut rng, phi.cols(), 5);
        let (s1, s2) = all.split_at(rng.gen_range(1..5));
        let p = complement_projector(&phi, s2);
        let a1 = block(&phi, s1);
        let projected = a1.transpose() * p * &a1;
        let projected = (&projected + projected.transpose()) * 0.5;
        let (lo, hi) = symmetric_eigen_extremes(&projected);
        let union = block(&phi, &all);
        let (ulo, uhi) = symmetric_eigen_extremes(&(union.transpose() * &union));
        ensure(lo >= ulo - TOL && hi <= uhi + TOL, || {
            format!("seed {seed}: [{lo}, {hi}] not inside [{ulo}, {uhi}]")
        })?;
    }
    Ok(100)
}

/// `||u|| / sqrt(1 + d) <= ||(Phi_S^+)^T u|| <= ||u|| / sqrt(1 - d)`, both
/// through the singular values and on random vectors.
pub fn pinv_transpose_bounds(seed: u64) -> Result<usize, String> {
    let (phi, _) = fixture(seed);
    let mut rng = rng_from_seed(400 + seed);
    let mut count = 0;
    for s in 1..=3 {
        for _ in 0..10 {
            let support = random_support(&mut rng, phi.cols(), s);
            let a = block(&phi, &support);
            let (lo, hi) = symmetric_eigen_extremes(&(a.transpose() * &a));
            let d = (hi - 1.0).max(1.0 - lo);
            if d >= 1.0 {
                continue;
            }
            let pt: DMatrix<f64> = pinv(&a).transpose();
            let sv = pt.singular_values();
            let (lower, upper) = (1.0 / (1.0 + d).sqrt(), 1.0 / (1.0 - d).sqrt());
            ensure(sv.min() >= lower - TOL && sv.max() <= upper + TOL, || {
                format!("seed {seed}: singular values [{}, {}] outside [{lower}, {upper}]", sv.min(), sv.max())
            })?;
            for _ in 0..200 {
                let u = DVector::from_vec(gaussian_vec(&mut rng, s));
                let (un, lhs) = (u.norm(), (&pt * &u).norm());
                ensure(lhs >= un * lower * (1.0 - TOL) && lhs <= un * upper * (1.0 + TOL), || {
                    format!("seed {seed}: ||(Phi_S^+)^T u|| = {lhs} outside bounds")
                })?;
            }
            count += 201;
        }
    }
    Ok(count)
}

/// Identity gives `delta = 0`; a duplicated column gives `delta_2 = 1`.
pub fn fixtures() -> Result<(), String> {
    let rip = rip_bruteforce(&SensingMatrix::identity(10), 5).unwrap();
    ensure(rip.delta.iter().all(|d| *d == 0.0), || format!("identity deltas {:?}", rip.delta))?;
    let mut a = generate_gaussian_matrix(8, 12, 5, true).entries().clone();
    let c = a.column(7).into_owned();
    a.set_column(3, &c);
    let rip = rip_bruteforce(&SensingMatrix::new(a).unwrap(), 3).unwrap();
    let d2 = rip.delta(2).unwrap();
    ensure((d2 - 1.0).abs() < 1e-12 && rip.witness_support[1] == vec![3, 7], || {
        format!("duplicate column: delta_2 = {d2}, witness {:?}", rip.witness_support[1])
    })
}
