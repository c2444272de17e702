//! Orthonormal basis of a growing column set, projections, and small dense helpers.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::problem::{axpy, dot, SensingMatrix};

/// A column is rank deficient when its component orthogonal to the current
/// basis has norm at most `RANK_TOL` times its original norm.
pub const RANK_TOL: f64 = 1e-10;

/// Candidates whose projected norm falls below `NORM_FLOOR` times their
/// original norm are treated as lying in the current span.
pub const NORM_FLOOR: f64 = 1e-12;

/// Orthonormal basis `Q` and upper-triangular `R` of `Phi_S = Q R`, built by
/// appending columns with classical Gram-Schmidt and one reorthogonalization.
#[derive(Debug, Clone)]
pub struct IncrementalBasis {
    m: usize,
    q: Vec<f64>,
    r: Vec<Vec<f64>>,
    support: Vec<usize>,
}

impl IncrementalBasis {
    pub fn new(m: usize) -> Self {
        Self { m, q: Vec::new(), r: Vec::new(), support: Vec::new() }
    }

    /// Basis spanning the given columns, appended in order.
    pub fn from_support(matrix: &SensingMatrix, support: &[usize]) -> Result<Self> {
        let mut b = Self::new(matrix.rows());
        for &j in support {
            b.append(matrix, j)?;
        }
        Ok(b)
    }

    pub fn dim(&self) -> usize {
        self.support.len()
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    /// Columns in insertion order.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// `k`-th orthonormal vector.
    #[inline]
    pub fn q(&self, k: usize) -> &[f64] {
        &self.q[k * self.m..(k + 1) * self.m]
    }

    /// Appends column `j`. On rank deficiency the basis is left unchanged.
    pub fn append(&mut self, matrix: &SensingMatrix, j: usize) -> Result<()> {
        let col = matrix.col(j);
        let (w, coeffs) = self.orthogonalize(col);
        let raw = dot(col, col).sqrt();
        let norm = dot(&w, &w).sqrt();
        if self.dim() >= self.m || raw == 0.0 || norm <= RANK_TOL * raw {
            return Err(Error::RankDeficient { index: j });
        }
        let mut rcol = coeffs;
        rcol.push(norm);
        self.q.extend(w.iter().map(|v| v / norm));
        self.r.push(rcol);
        self.support.push(j);
        Ok(())
    }

    /// Component of `v` orthogonal to the basis, and the accumulated coefficients.
    fn orthogonalize(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut w = v.to_vec();
        let mut coeffs = vec![0.0; self.dim()];
        for _ in 0..2 {
            let c: Vec<f64> = (0..self.dim()).map(|k| dot(self.q(k), &w)).collect();
            for (k, ck) in c.iter().enumerate() {
                axpy(-ck, self.q(k), &mut w);
                coeffs[k] += ck;
            }
        }
        (w, coeffs)
    }

    /// `P_perp v`, the residual of `v` after projecting onto the span.
    pub fn project_out(&self, v: &[f64]) -> Vec<f64> {
        self.orthogonalize(v).0
    }

    /// `Q^T v`.
    pub fn coordinates(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|k| dot(self.q(k), v)).collect()
    }

    /// Least-squares coefficients `R^{-1} Q^T y`, aligned with [`Self::support`].
    pub fn coefficients(&self, y: &[f64]) -> Vec<f64> {
        let mut c = self.coordinates(y);
        let d = self.dim();
        for i in (0..d).rev() {
            let mut acc = c[i];
            for j in i + 1..d {
                acc -= self.r[j][i] * c[j];
            }
            c[i] = acc / self.r[i][i];
        }
        c
    }
}

/// Least-squares fit of `y` on the given columns. Returns the coefficients
/// (aligned with `support`) and the residual `y - Phi_S c`.
pub fn ls_on_support(
    matrix: &SensingMatrix,
    y: &[f64],
    support: &[usize],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let basis = IncrementalBasis::from_support(matrix, support)?;
    let coef = basis.coefficients(y);
    let residual = basis.project_out(y);
    Ok((coef, residual))
}

/// Tracks `||P_perp phi_i||` for every column as the basis grows.
///
/// Squared norms are downdated after each appended basis vector and recomputed
/// directly when cancellation would make the downdate inaccurate.
#[derive(Debug, Clone)]
pub struct ProjectedNorms {
    raw_sq: Vec<f64>,
    sq: Vec<f64>,
    selected: Vec<bool>,
}

impl ProjectedNorms {
    pub fn new(matrix: &SensingMatrix) -> Self {
        let raw_sq: Vec<f64> = (0..matrix.cols()).map(|j| dot(matrix.col(j), matrix.col(j))).collect();
        Self { sq: raw_sq.clone(), raw_sq, selected: vec![false; matrix.cols()] }
    }

    /// Updates after the basis vectors from index `from` onward were appended.
    pub fn update(&mut self, matrix: &SensingMatrix, basis: &IncrementalBasis, from: usize) {
        for &j in &basis.support()[from..] {
            self.selected[j] = true;
        }
        for i in 0..self.sq.len() {
            if self.selected[i] {
                self.sq[i] = 0.0;
                continue;
            }
            let col = matrix.col(i);
            for k in from..basis.dim() {
                let c = dot(basis.q(k), col);
                self.sq[i] -= c * c;
            }
            if self.sq[i] < 1e-6 * self.raw_sq[i] {
                let p = basis.project_out(col);
                self.sq[i] = dot(&p, &p);
            }
        }
    }

    /// Projected norms; zero for selected columns and for columns at or below
    /// the numerical floor.
    pub fn norms(&self) -> Vec<f64> {
        self.sq
            .iter()
            .zip(&self.raw_sq)
            .zip(&self.selected)
            .map(|((&s, &raw), &sel)| {
                let v = s.max(0.0).sqrt();
                if sel || v <= NORM_FLOOR * raw.sqrt() {
                    0.0
                } else {
                    v
                }
            })
            .collect()
    }
}

/// Direct computation of `||P_perp phi_i||` for the listed candidates.
pub fn projected_column_norms(
    matrix: &SensingMatrix,
    basis: &IncrementalBasis,
    candidates: &[usize],
) -> Vec<f64> {
    candidates
        .iter()
        .map(|&i| {
            let p = basis.project_out(matrix.col(i));
            dot(&p, &p).sqrt()
        })
        .collect()
}

/// Smallest and largest eigenvalues of a symmetric matrix.
pub fn symmetric_eigen_extremes(a: &DMatrix<f64>) -> (f64, f64) {
    let eig = SymmetricEigen::new(a.clone());
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (min, max)
}

/// Gram matrix `Phi_S^T Phi_S`.
pub fn gram(matrix: &SensingMatrix, support: &[usize]) -> DMatrix<f64> {
    let s = support.len();
    let mut g = DMatrix::zeros(s, s);
    for a in 0..s {
        for b in a..s {
            let v = dot(matrix.col(support[a]), matrix.col(support[b]));
            g[(a, b)] = v;
            g[(b, a)] = v;
        }
    }
    g
}

pub fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
