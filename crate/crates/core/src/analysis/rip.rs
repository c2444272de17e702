use itertools::Itertools;
use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen_extremes;
use crate::problem::SensingMatrix;

/// Largest column count accepted by [`rip_bruteforce`].
pub const MAX_ENUM_N: usize = 32;
/// Largest total number of supports accepted by [`rip_bruteforce`].
pub const MAX_ENUM_SUPPORTS: u128 = 10_000_000;

/// Exact isometry constants `delta_s` for `s = 1..=max_order`.
#[derive(Debug, Clone, PartialEq)]
pub struct RipReport {
    pub orders: Vec<usize>,
    pub delta: Vec<f64>,
    /// Support attaining `delta_s`; ties go to the lexicographically smallest.
    pub witness_support: Vec<Vec<usize>>,
    /// `(lambda_min, lambda_max)` of the witness Gram matrix.
    pub eigen_extremes: Vec<(f64, f64)>,
}

impl RipReport {
    /// `delta_s`, with `delta_0 = 0`.
    pub fn delta(&self, s: usize) -> Result<f64> {
        if s == 0 {
            return Ok(0.0);
        }
        self.orders
            .iter()
            .position(|&o| o == s)
            .map(|p| self.delta[p])
            .ok_or(Error::MissingOrder(s))
    }

    pub fn max_order(&self) -> usize {
        self.orders.last().copied().unwrap_or(0)
    }

    /// CSV with header `order,delta,lambda_min,lambda_max,witness`; the witness
    /// is a space-separated list of 0-based column indices.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("order,delta,lambda_min,lambda_max,witness\n");
        for i in 0..self.orders.len() {
            let (lo, hi) = self.eigen_extremes[i];
            out.push_str(&format!(
                "{},{:.17e},{:.17e},{:.17e},{}\n",
                self.orders[i],
                self.delta[i],
                lo,
                hi,
                self.witness_support[i].iter().join(" ")
            ));
        }
        out
    }
}

/// `C(n, k)` without overflow for the sizes used here.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// `(max(lambda_max - 1, 1 - lambda_min), lambda_min, lambda_max)` of the
/// principal submatrix of `gram` on `support`.
pub fn support_deviation(gram: &DMatrix<f64>, support: &[usize]) -> (f64, f64, f64) {
    let s = support.len();
    let sub = DMatrix::from_fn(s, s, |a, b| gram[(support[a], support[b])]);
    let (lo, hi) = symmetric_eigen_extremes(&sub);
    ((hi - 1.0).max(1.0 - lo), lo, hi)
}

#[derive(Clone)]
struct Best {
    delta: f64,
    support: Vec<usize>,
    extremes: (f64, f64),
}

fn better(a: Best, b: Best) -> Best {
    if a.delta > b.delta || (a.delta == b.delta && a.support <= b.support) {
        a
    } else {
        b
    }
}

/// Computes `delta_s` for `s = 1..=max_order` by enumerating every support of
/// size `s`. Work is split by the smallest index of each support.
pub fn rip_bruteforce(matrix: &SensingMatrix, max_order: usize) -> Result<RipReport> {
    let n = matrix.cols();
    if max_order == 0 || max_order > n {
        return Err(Error::InvalidParameter(format!(
            "max_order = {max_order} must satisfy 1 <= max_order <= n = {n}"
        )));
    }
    let count: u128 = (1..=max_order).map(|s| binomial(n, s)).sum();
    if n > MAX_ENUM_N || count > MAX_ENUM_SUPPORTS {
        return Err(Error::EnumerationTooLarge {
            count,
            limit: MAX_ENUM_SUPPORTS,
            max_n: MAX_ENUM_N,
        });
    }
    let phi = matrix.entries();
    let gram = phi.transpose() * phi;

    let mut report = RipReport {
        orders: Vec::new(),
        delta: Vec::new(),
        witness_support: Vec::new(),
        eigen_extremes: Vec::new(),
    };
    for s in 1..=max_order {
        let best = (0..=n - s)
            .into_par_iter()
            .map(|first| {
                let mut local: Option<Best> = None;
                for rest in (first + 1..n).combinations(s - 1) {
                    let mut support = Vec::with_capacity(s);
                    support.push(first);
                    support.extend(rest);
                    let (delta, lo, hi) = support_deviation(&gram, &support);
                    let cand = Best { delta, support, extremes: (lo, hi) };
                    local = Some(match local {
                        None => cand,
                        Some(b) => better(b, cand),
                    });
                }
                local
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .reduce(better)
            .expect("at least one support");
        report.orders.push(s);
        report.delta.push(best.delta.max(0.0));
        report.witness_support.push(best.support);
        report.eigen_extremes.push(best.extremes);
    }
    Ok(report)
}
