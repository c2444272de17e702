//! Domain types and random generation of sensing matrices, sparse signals and noise.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Relative tolerance on unit column norms.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// A `K`-sparse vector of length `n` stored by support.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    n: usize,
    support: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSignal {
    /// Validates and builds a signal. `support` must be strictly increasing,
    /// inside `[0, n)`, nonempty, and every value nonzero.
    pub fn new(n: usize, support: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if support.is_empty() || support.len() > n {
            return Err(Error::InvalidSparsity { k: support.len(), n });
        }
        if support.len() != values.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} support indices but {} values",
                support.len(),
                values.len()
            )));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "support indices must be strictly increasing".into(),
            ));
        }
        if let Some(&last) = support.last() {
            if last >= n {
                return Err(Error::InvalidParameter(format!("support index {last} >= n = {n}")));
            }
        }
        if values.iter().any(|v| *v == 0.0 || !v.is_finite()) {
            return Err(Error::InvalidParameter("signal values must be finite and nonzero".into()));
        }
        Ok(Self { n, support, values })
    }

    /// Builds a signal from a dense vector, keeping its nonzero entries.
    pub fn from_dense(x: &[f64]) -> Result<Self> {
        let (support, values): (Vec<usize>, Vec<f64>) =
            x.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, v)| (i, *v)).unzip();
        Self::new(x.len(), support, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sparsity(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (&i, &v) in self.support.iter().zip(&self.values) {
            x[i] = v;
        }
        x
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Minimum-to-average magnitude ratio `min |x_j| / (||x|| / sqrt(K))`.
    pub fn mar(&self) -> f64 {
        let min = self.values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        min / (self.norm() / (self.sparsity() as f64).sqrt())
    }
}

/// Distribution of the nonzero entries of a generated signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignalKind {
    /// i.i.d. standard normal.
    Gaussian,
    /// Uniform on `{-1, +1}`.
    Pam2,
}

impl fmt::Display for SignalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalKind::Gaussian => f.write_str("gaussian"),
            SignalKind::Pam2 => f.write_str("pam2"),
        }
    }
}

impl FromStr for SignalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "gauss" => Ok(SignalKind::Gaussian),
            "pam2" | "2-pam" | "pam" => Ok(SignalKind::Pam2),
            other => Err(Error::InvalidParameter(format!("unknown signal kind `{other}`"))),
        }
    }
}

/// Dense `m x n` measurement matrix, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingMatrix {
    entries: DMatrix<f64>,
    normalized: bool,
}

impl SensingMatrix {
    /// Wraps a dense matrix. The `normalized` flag is set when every column has
    /// unit norm within [`UNIT_NORM_TOL`].
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::InvalidParameter("matrix must be at least 1 x 1".into()));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("matrix entries must be finite".into()));
        }
        let normalized = entries
            .column_iter()
            .all(|c| (c.norm() - 1.0).abs() <= UNIT_NORM_TOL);
        Ok(Self { entries, normalized })
    }

    /// Builds from column-major data.
    pub fn from_column_slice(m: usize, n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != m * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for {m} x {n}, got {}",
                m * n,
                data.len()
            )));
        }
        Self::new(DMatrix::from_column_slice(m, n, data))
    }

    pub fn identity(n: usize) -> Self {
        Self { entries: DMatrix::identity(n, n), normalized: true }
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Column `j` as a contiguous slice.
    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        let m = self.rows();
        &self.entries.as_slice()[j * m..(j + 1) * m]
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        dot(self.col(j), self.col(j)).sqrt()
    }

    /// `Phi x` for a dense `x` of length `n`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols());
        let mut y = vec![0.0; self.rows()];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                axpy(xj, self.col(j), &mut y);
            }
        }
        y
    }

    /// `Phi x` restricted to the signal's support.
    pub fn apply_sparse(&self, x: &SparseSignal) -> Vec<f64> {
        assert_eq!(x.n(), self.cols());
        let mut y = vec![0.0; self.rows()];
        for (&j, &v) in x.support().iter().zip(x.values()) {
            axpy(v, self.col(j), &mut y);
        }
        y
    }

    /// `Phi^T r`.
    pub fn correlate(&self, r: &[f64]) -> Vec<f64> {
        (0..self.cols()).map(|j| dot(self.col(j), r)).collect()
    }

    /// Copy with column `j` multiplied by `factor`.
    pub fn scale_column(&self, j: usize, factor: f64) -> Result<Self> {
        let mut entries = self.entries.clone();
        entries.column_mut(j).scale_mut(factor);
        Self::new(entries)
    }

    /// Copy with unit-norm columns.
    pub fn normalize_columns(&self) -> Result<Self> {
        let mut entries = self.entries.clone();
        for mut c in entries.column_iter_mut() {
            let norm = c.norm();
            if norm == 0.0 {
                return Err(Error::InvalidParameter("cannot normalize a zero column".into()));
            }
            c.unscale_mut(norm);
        }
        Ok(Self { entries, normalized: true })
    }

    /// Submatrix with the given columns.
    pub fn select_columns(&self, cols: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows(), cols.len(), |i, j| self.entries[(i, cols[j])])
    }
}

/// Entries i.i.d. `N(0, 1/m)`; with `normalize`, each column is rescaled to
/// unit norm afterwards.
pub fn generate_gaussian_matrix(m: usize, n: usize, seed: u64, normalize: bool) -> SensingMatrix {
    assert!(m >= 1 && n >= 1, "matrix dimensions must be positive");
    let mut rng = rng_from_seed(seed);
    let scale = 1.0 / (m as f64).sqrt();
    let data: Vec<f64> = (0..m * n)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let mut entries = DMatrix::from_vec(m, n, data);
    if normalize {
        for mut c in entries.column_iter_mut() {
            let norm = c.norm();
            c.unscale_mut(norm);
        }
    }
    let normalized = normalize
        || entries.column_iter().all(|c| (c.norm() - 1.0).abs() <= UNIT_NORM_TOL);
    SensingMatrix { entries, normalized }
}

/// A `K`-sparse signal with uniformly random support.
pub fn generate_sparse_signal(
    n: usize,
    k: usize,
    kind: SignalKind,
    seed: u64,
) -> Result<SparseSignal> {
    if k == 0 || k > n {
        return Err(Error::InvalidSparsity { k, n });
    }
    let mut rng = rng_from_seed(seed);
    let mut support = sample(&mut rng, n, k).into_vec();
    support.sort_unstable();
    let values = (0..k)
        .map(|_| match kind {
            SignalKind::Gaussian => loop {
                let v: f64 = rng.sample(StandardNormal);
                if v != 0.0 {
                    break v;
                }
            },
            SignalKind::Pam2 => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        })
        .collect();
    SparseSignal::new(n, support, values)
}

/// Signal-to-noise ratio in decibels. `Infinite` means a noiseless measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnrDb {
    Finite(f64),
    Infinite,
}

impl SnrDb {
    /// Per-entry noise variance `(K/m) 10^(-SNR/10)`.
    pub fn noise_variance(&self, k: usize, m: usize) -> f64 {
        match self {
            SnrDb::Finite(db) => (k as f64 / m as f64) * 10f64.powf(-db / 10.0),
            SnrDb::Infinite => 0.0,
        }
    }

    /// Expected noise norm `sqrt(K 10^(-SNR/10))`.
    pub fn expected_noise_norm(&self, k: usize) -> f64 {
        match self {
            SnrDb::Finite(db) => (k as f64 * 10f64.powf(-db / 10.0)).sqrt(),
            SnrDb::Infinite => 0.0,
        }
    }
}

impl fmt::Display for SnrDb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SnrDb::Finite(db) => write!(f, "{db}"),
            SnrDb::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for SnrDb {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "none" => Ok(SnrDb::Infinite),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(SnrDb::Finite)
                .ok_or_else(|| Error::InvalidParameter(format!("invalid SNR `{s}`"))),
        }
    }
}

/// Measurement model `y = Phi x + v`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub matrix: SensingMatrix,
    pub y: Vec<f64>,
    pub truth: Option<SparseSignal>,
    pub noise: Option<Vec<f64>>,
}

impl ProblemInstance {
    /// An instance with measurements only (no ground truth).
    pub fn new(matrix: SensingMatrix, y: Vec<f64>) -> Result<Self> {
        if y.len() != matrix.rows() {
            return Err(Error::DimensionMismatch(format!(
                "y has length {} but the matrix has {} rows",
                y.len(),
                matrix.rows()
            )));
        }
        Ok(Self { matrix, y, truth: None, noise: None })
    }

    /// `y = Phi x`.
    pub fn noiseless(matrix: SensingMatrix, truth: SparseSignal) -> Result<Self> {
        if truth.n() != matrix.cols() {
            return Err(Error::DimensionMismatch(format!(
                "signal has length {} but the matrix has {} columns",
                truth.n(),
                matrix.cols()
            )));
        }
        let y = matrix.apply_sparse(&truth);
        Ok(Self { matrix, y, truth: Some(truth), noise: None })
    }

    /// `y = Phi x + v` with an explicit noise vector.
    pub fn with_noise_vector(
        matrix: SensingMatrix,
        truth: SparseSignal,
        noise: Vec<f64>,
    ) -> Result<Self> {
        if noise.len() != matrix.rows() {
            return Err(Error::DimensionMismatch(format!(
                "noise has length {} but the matrix has {} rows",
                noise.len(),
                matrix.rows()
            )));
        }
        let mut inst = Self::noiseless(matrix, truth)?;
        for (yi, vi) in inst.y.iter_mut().zip(&noise) {
            *yi += vi;
        }
        inst.noise = Some(noise);
        Ok(inst)
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// Replaces the noise with i.i.d. `N(0, (K/m) 10^(-SNR/10))` entries.
    pub fn add_noise(&self, snr_db: SnrDb, seed: u64) -> Result<Self> {
        let truth = self.truth.clone().ok_or(Error::MissingGroundTruth)?;
        let m = self.rows();
        let sigma = snr_db.noise_variance(truth.sparsity(), m).sqrt();
        let noise = match snr_db {
            SnrDb::Infinite => vec![0.0; m],
            SnrDb::Finite(_) => {
                let mut rng = rng_from_seed(seed);
                (0..m).map(|_| sigma * rng.sample::<f64, _>(StandardNormal)).collect()
            }
        };
        Self::with_noise_vector(self.matrix.clone(), truth, noise)
    }

    /// `(snr, mar)` with `snr = ||Phi x||^2 / ||v||^2` (infinite for zero noise)
    /// and `mar = min |x_j| / (||x|| / sqrt(K))`.
    pub fn snr_and_mar(&self) -> Result<(f64, f64)> {
        let truth = self.truth.as_ref().ok_or(Error::MissingGroundTruth)?;
        let noise = self.noise.as_ref().ok_or(Error::MissingNoise)?;
        let signal_power = sq_norm(&self.matrix.apply_sparse(truth));
        let noise_power = sq_norm(noise);
        let snr = if noise_power == 0.0 { f64::INFINITY } else { signal_power / noise_power };
        Ok((snr, truth.mar()))
    }
}

/// Upper bound on the residual norm at which a solver stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResidualThreshold {
    Absolute(f64),
    /// Fraction of `||y||`.
    Relative(f64),
}

impl ResidualThreshold {
    pub fn resolve(&self, y_norm: f64) -> f64 {
        match *self {
            ResidualThreshold::Absolute(e) => e,
            ResidualThreshold::Relative(r) => r * y_norm,
        }
    }

    fn value(&self) -> f64 {
        match *self {
            ResidualThreshold::Absolute(e) | ResidualThreshold::Relative(e) => e,
        }
    }
}

impl Default for ResidualThreshold {
    fn default() -> Self {
        ResidualThreshold::Relative(1e-6)
    }
}

/// Solver parameters: sparsity `K`, selection size `L`, stopping threshold and
/// iteration cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgorithmParams {
    pub sparsity: usize,
    pub selection: usize,
    pub epsilon: ResidualThreshold,
    pub max_iterations: usize,
    /// Enforce `L <= floor(m / K)` at solver entry. When off, only the
    /// mandatory `ceil(K/L)` selections need to fit in `m`.
    pub strict_selection_bound: bool,
}

impl AlgorithmParams {
    pub fn new(sparsity: usize, selection: usize) -> Self {
        Self {
            sparsity,
            selection,
            epsilon: ResidualThreshold::default(),
            max_iterations: sparsity.max(1),
            strict_selection_bound: true,
        }
    }

    pub fn with_epsilon(mut self, epsilon: ResidualThreshold) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_strict_selection_bound(mut self, strict: bool) -> Self {
        self.strict_selection_bound = strict;
        self
    }

    /// Checks the parameters against an `m x n` instance.
    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        let (k, l) = (self.sparsity, self.selection);
        if k == 0 || k > n || k > m {
            return Err(Error::InvalidSparsity { k, n: n.min(m) });
        }
        if l == 0 || l > k {
            return Err(Error::InvalidParameter(format!("L = {l} must satisfy 1 <= L <= K = {k}")));
        }
        if self.strict_selection_bound && l > m / k {
            return Err(Error::InvalidParameter(format!(
                "L = {l} exceeds floor(m/K) = {}",
                m / k
            )));
        }
        if l * k.div_ceil(l) > m.min(n) {
            return Err(Error::InvalidParameter(format!(
                "L = {l}: the {} mandatory selections exceed min(m, n) = {}",
                l * k.div_ceil(l),
                m.min(n)
            )));
        }
        let eps = self.epsilon.value();
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter(format!("epsilon must be >= 0, got {eps}")));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub(crate) fn sq_norm(a: &[f64]) -> f64 {
    dot(a, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn experiment_sized_matrix_has_unit_columns() {
        let phi = generate_gaussian_matrix(128, 256, 1, true);
        assert_eq!((phi.rows(), phi.cols()), (128, 256));
        assert!(phi.is_normalized());
        for j in 0..256 {
            assert!((phi.column_norm(j) - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn unnormalized_columns_have_unit_expected_norm() {
        let phi = generate_gaussian_matrix(4, 4, 7, false);
        for j in 0..4 {
            let c = phi.column_norm(j);
            assert!(c > 0.0 && c.is_finite());
        }
        // E||phi_j||^2 = 1 over many columns.
        let big = generate_gaussian_matrix(4, 20_000, 7, false);
        let mean: f64 = (0..20_000).map(|j| big.column_norm(j).powi(2)).sum::<f64>() / 20_000.0;
        assert!((mean - 1.0).abs() < 0.03, "mean squared column norm {mean}");
    }

    #[test]
    fn golden_16x32_gram_diagonal_and_coherence() {
        let phi = generate_gaussian_matrix(16, 32, 42, true);
        let again = generate_gaussian_matrix(16, 32, 42, true);
        assert_eq!(phi, again);
        let g = phi.entries().transpose() * phi.entries();
        let mut off = 0.0;
        for i in 0..32 {
            assert!((g[(i, i)] - 1.0).abs() <= 1e-12);
            for j in 0..32 {
                if i != j {
                    off += g[(i, j)].abs();
                }
            }
        }
        let mean_off = off / (32.0 * 31.0);
        // Frozen from the first run of this generator.
        assert!((mean_off - GOLDEN_16X32_MEAN_OFF_DIAG).abs() < 1e-12, "{mean_off}");
        // Order 1/sqrt(m) as expected for Gaussian columns.
        assert!(mean_off > 0.1 && mean_off < 0.4);
    }

    const GOLDEN_16X32_MEAN_OFF_DIAG: f64 = 0.20458111422588926;

    #[test]
    fn signal_generation() {
        let x = generate_sparse_signal(256, 5, SignalKind::Gaussian, 3).unwrap();
        assert_eq!(x.sparsity(), 5);
        assert!(x.support().iter().all(|&i| i < 256));
        assert!(x.values().iter().all(|v| *v != 0.0));

        let full = generate_sparse_signal(8, 8, SignalKind::Pam2, 0).unwrap();
        assert_eq!(full.support(), &[0, 1, 2, 3, 4, 5, 6, 7]);
        assert!(full.values().iter().all(|v| *v == 1.0 || *v == -1.0));

        assert_eq!(
            generate_sparse_signal(4, 5, SignalKind::Gaussian, 0),
            Err(Error::InvalidSparsity { k: 5, n: 4 })
        );
    }

    #[test]
    fn golden_pam2_signal() {
        let x = generate_sparse_signal(10, 3, SignalKind::Pam2, 11).unwrap();
        assert_eq!(x, generate_sparse_signal(10, 3, SignalKind::Pam2, 11).unwrap());
        assert_eq!(x.support(), GOLDEN_PAM2_SUPPORT);
        assert_eq!(x.values(), GOLDEN_PAM2_VALUES);
    }

    const GOLDEN_PAM2_SUPPORT: &[usize] = &[3, 4, 5];
    const GOLDEN_PAM2_VALUES: &[f64] = &[1.0, -1.0, 1.0];

    #[test]
    fn noise_variance_arithmetic() {
        let v = SnrDb::Finite(20.0).noise_variance(20, 128);
        assert!((v - 1.5625e-3).abs() < 1e-15);
        assert_eq!(SnrDb::Infinite.noise_variance(20, 128), 0.0);
        assert!((SnrDb::Finite(20.0).expected_noise_norm(20) - 5f64.sqrt() / 5.0).abs() < 1e-15);
    }

    #[test]
    fn add_noise_infinite_snr_is_noiseless() {
        let phi = generate_gaussian_matrix(16, 32, 1, true);
        let x = generate_sparse_signal(32, 4, SignalKind::Gaussian, 2).unwrap();
        let inst = ProblemInstance::noiseless(phi.clone(), x.clone()).unwrap();
        let noisy = inst.add_noise(SnrDb::Infinite, 9).unwrap();
        assert_eq!(noisy.y, phi.apply_sparse(&x));
        assert!(noisy.noise.as_ref().unwrap().iter().all(|v| *v == 0.0));
        assert_eq!(noisy.snr_and_mar().unwrap().0, f64::INFINITY);
    }

    #[test]
    fn add_noise_requires_truth() {
        let phi = generate_gaussian_matrix(4, 8, 1, true);
        let inst = ProblemInstance::new(phi, vec![1.0; 4]).unwrap();
        assert_eq!(inst.add_noise(SnrDb::Finite(10.0), 0), Err(Error::MissingGroundTruth));
    }

    #[test]
    fn add_noise_preserves_matrix_and_signal() {
        let phi = generate_gaussian_matrix(32, 64, 5, true);
        let x = generate_sparse_signal(64, 6, SignalKind::Pam2, 6).unwrap();
        let inst = ProblemInstance::noiseless(phi.clone(), x.clone()).unwrap();
        let noisy = inst.add_noise(SnrDb::Finite(15.0), 7).unwrap();
        assert_eq!(noisy.matrix, phi);
        assert_eq!(noisy.truth.as_ref(), Some(&x));
        let clean = phi.apply_sparse(&x);
        let v = noisy.noise.as_ref().unwrap();
        for i in 0..32 {
            assert_eq!(noisy.y[i], clean[i] + v[i]);
        }
    }

    #[test]
    fn empirical_noise_statistics() {
        // 10^6 noise entries, K = 20, m = 128, SNR = 20 dB.
        let m = 128;
        let phi = generate_gaussian_matrix(m, 32, 1, true);
        let x = generate_sparse_signal(32, 20, SignalKind::Gaussian, 1).unwrap();
        let inst = ProblemInstance::noiseless(phi, x).unwrap();
        let reps = 7813; // 7813 * 128 >= 10^6 entries
        let mut sum_sq = 0.0;
        let mut sum_norm = 0.0;
        for s in 0..reps {
            let v = inst.add_noise(SnrDb::Finite(20.0), s).unwrap().noise.unwrap();
            let ss = sq_norm(&v);
            sum_sq += ss;
            sum_norm += ss.sqrt();
        }
        let var = sum_sq / (reps as f64 * m as f64);
        assert!((var / 1.5625e-3 - 1.0).abs() < 0.02, "variance {var}");
        let mean_norm = sum_norm / reps as f64;
        assert!((mean_norm / (5f64.sqrt() / 5.0) - 1.0).abs() < 0.01, "E||v|| {mean_norm}");
    }

    #[test]
    fn snr_and_mar_identity_example() {
        // Identity matrix, K ones, a single unit spike of noise: snr = K.
        let m = 10;
        let k = 4;
        let x = SparseSignal::new(m, (0..k).collect(), vec![1.0; k]).unwrap();
        let mut v = vec![0.0; m];
        v[m - 1] = 1.0;
        let inst = ProblemInstance::with_noise_vector(SensingMatrix::identity(m), x, v).unwrap();
        let (snr, mar) = inst.snr_and_mar().unwrap();
        assert_eq!(snr, k as f64);
        assert_eq!(mar, 1.0);
    }

    #[test]
    fn snr_matches_scalar_loop() {
        let phi = generate_gaussian_matrix(20, 40, 3, true);
        let x = generate_sparse_signal(40, 5, SignalKind::Gaussian, 4).unwrap();
        let inst = ProblemInstance::noiseless(phi.clone(), x.clone())
            .unwrap()
            .add_noise(SnrDb::Finite(10.0), 5)
            .unwrap();
        let (snr, mar) = inst.snr_and_mar().unwrap();
        let dense = x.to_dense();
        let mut num = 0.0;
        for i in 0..20 {
            let mut acc = 0.0;
            for j in 0..40 {
                acc += phi.entries()[(i, j)] * dense[j];
            }
            num += acc * acc;
        }
        let den: f64 = inst.noise.as_ref().unwrap().iter().map(|v| v * v).sum();
        assert!((snr - num / den).abs() <= 1e-12 * snr);
        let mut min = f64::INFINITY;
        let mut ss = 0.0;
        for &v in x.values() {
            min = min.min(v.abs());
            ss += v * v;
        }
        assert!((mar - min / (ss / 5.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn params_validation() {
        assert!(AlgorithmParams::new(4, 2).validate(12, 16).is_ok());
        assert!(AlgorithmParams::new(4, 5).validate(12, 16).is_err());
        // L = 5 > floor(128 / 43) = 2
        assert!(AlgorithmParams::new(43, 5).validate(128, 256).is_err());
        assert!(AlgorithmParams::new(43, 5)
            .with_strict_selection_bound(false)
            .validate(128, 256)
            .is_ok());
    }

    proptest! {
        #[test]
        fn generation_is_deterministic(seed in any::<u64>(), k in 1usize..16) {
            let a = generate_gaussian_matrix(8, 16, seed, true);
            let b = generate_gaussian_matrix(8, 16, seed, true);
            prop_assert_eq!(a, b);
            let x = generate_sparse_signal(16, k, SignalKind::Gaussian, seed).unwrap();
            let z = generate_sparse_signal(16, k, SignalKind::Gaussian, seed).unwrap();
            prop_assert_eq!(x, z);
        }

        #[test]
        fn normalized_gram_diagonal_is_one(seed in any::<u64>(), m in 1usize..20, n in 1usize..20) {
            let phi = generate_gaussian_matrix(m, n, seed, true);
            for j in 0..n {
                prop_assert!((dot(phi.col(j), phi.col(j)) - 1.0).abs() <= 1e-12);
            }
        }
    }
}
