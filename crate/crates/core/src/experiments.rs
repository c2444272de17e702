//! Seeded Monte-Carlo sweeps: exact-recovery frequency, MSE and iteration
//! counts as functions of the sparsity, the number of rows, or the SNR.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::baselines::{cosamp, irls, oracle_ls, COSAMP_MAX_ITERATIONS, IRLS_MAX_ITERATIONS};
use crate::error::{Error, Result};
use crate::greedy::{mols, ols, omp, RecoveryResult};
use crate::problem::{
    generate_gaussian_matrix, generate_sparse_signal, AlgorithmParams, ProblemInstance,
    ResidualThreshold, SignalKind, SnrDb,
};
use crate::io::{provenance_line, short_hash};
use crate::rng::{child_seed, stream};

/// Quantity varied across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    K,
    M,
    SnrDb,
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVariable::K => "K",
            SweepVariable::M => "m",
            SweepVariable::SnrDb => "snr_db",
        })
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "K" | "k" => Ok(SweepVariable::K),
            "m" | "M" => Ok(SweepVariable::M),
            "snr" | "snr_db" | "SNR" => Ok(SweepVariable::SnrDb),
            other => Err(Error::InvalidParameter(format!("unknown sweep variable `{other}`"))),
        }
    }
}

/// Which solver a sweep column runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgorithmKind {
    Mols { l: usize },
    Ols,
    Omp,
    Cosamp,
    Irls,
    Oracle,
}

/// How the residual threshold is chosen for each trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonPolicy {
    Fixed(ResidualThreshold),
    /// The expected noise norm `sqrt(K 10^(-SNR/10))` (relative `1e-6` when noiseless).
    Noise,
}

/// A solver together with its options, parsed from strings such as
/// `mols:L=5`, `mols:L=5,strict`, `ols`, `omp`, `cosamp:iters=50`, `irls`,
/// `oracle`. Options: `L=<int>`, `strict`, `iters=<int>`,
/// `eps=rel:<x>|abs:<x>|noise`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSpec {
    pub kind: AlgorithmKind,
    pub epsilon: EpsilonPolicy,
    /// Enforce `L <= floor(m/K)`; otherwise only `L ceil(K/L) <= min(m, n)`.
    pub strict: bool,
    pub max_iterations: Option<usize>,
}

impl AlgorithmSpec {
    pub fn new(kind: AlgorithmKind) -> Self {
        Self {
            kind,
            epsilon: EpsilonPolicy::Fixed(ResidualThreshold::default()),
            strict: false,
            max_iterations: None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            AlgorithmKind::Mols { .. } => "mols",
            AlgorithmKind::Ols => "ols",
            AlgorithmKind::Omp => "omp",
            AlgorithmKind::Cosamp => "cosamp",
            AlgorithmKind::Irls => "irls",
            AlgorithmKind::Oracle => "oracle",
        }
    }

    /// Solver parameters for one instance, or an error when the combination is
    /// inadmissible at these dimensions.
    pub fn params(&self, k: usize, m: usize, n: usize, snr: SnrDb) -> Result<AlgorithmParams> {
        let l = match self.kind {
            AlgorithmKind::Mols { l } => l,
            _ => 1,
        };
        let epsilon = match self.epsilon {
            EpsilonPolicy::Fixed(t) => t,
            EpsilonPolicy::Noise => match snr {
                SnrDb::Infinite => ResidualThreshold::default(),
                s => ResidualThreshold::Absolute(s.expected_noise_norm(k)),
            },
        };
        let default_iters = match self.kind {
            AlgorithmKind::Cosamp => COSAMP_MAX_ITERATIONS,
            AlgorithmKind::Irls => IRLS_MAX_ITERATIONS,
            _ => k.max(1),
        };
        let params = AlgorithmParams::new(k, l)
            .with_epsilon(epsilon)
            .with_max_iterations(self.max_iterations.unwrap_or(default_iters))
            .with_strict_selection_bound(self.strict);
        match self.kind {
            AlgorithmKind::Mols { .. } | AlgorithmKind::Ols | AlgorithmKind::Omp => {
                params.validate(m, n)?
            }
            AlgorithmKind::Irls if m >= n => {
                return Err(Error::InvalidParameter("IRLS needs m < n".into()))
            }
            _ => {
                if k == 0 || k > m || k > n {
                    return Err(Error::InvalidSparsity { k, n: n.min(m) });
                }
            }
        }
        Ok(params)
    }

    pub fn run(&self, instance: &ProblemInstance, params: &AlgorithmParams) -> Result<RecoveryResult> {
        match self.kind {
            AlgorithmKind::Mols { .. } => mols(instance, params),
            AlgorithmKind::Ols => ols(instance, params),
            AlgorithmKind::Omp => omp(instance, params),
            AlgorithmKind::Cosamp => cosamp(instance, params),
            AlgorithmKind::Irls => irls(instance, params),
            AlgorithmKind::Oracle => oracle_ls(instance),
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut opts = Vec::new();
        if let AlgorithmKind::Mols { l } = self.kind {
            opts.push(format!("L={l}"));
        }
        if self.strict {
            opts.push("strict".to_string());
        }
        if let Some(it) = self.max_iterations {
            opts.push(format!("iters={it}"));
        }
        match self.epsilon {
            EpsilonPolicy::Fixed(t) if t == ResidualThreshold::default() => {}
            EpsilonPolicy::Fixed(ResidualThreshold::Relative(x)) => opts.push(format!("eps=rel:{x}")),
            EpsilonPolicy::Fixed(ResidualThreshold::Absolute(x)) => opts.push(format!("eps=abs:{x}")),
            EpsilonPolicy::Noise => opts.push("eps=noise".to_string()),
        }
        if opts.is_empty() {
            f.write_str(self.name())
        } else {
            write!(f, "{}:{}", self.name(), opts.join(","))
        }
    }
}

impl FromStr for AlgorithmSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, opts) = s.split_once(':').unwrap_or((s, ""));
        let bad = |msg: String| Error::InvalidParameter(format!("`{s}`: {msg}"));
        let mut l = None;
        let mut spec = AlgorithmSpec::new(AlgorithmKind::Ols);
        for opt in opts.split(',').map(str::trim).filter(|o| !o.is_empty()) {
            let (key, value) = opt.split_once('=').unwrap_or((opt, ""));
            match key {
                "L" | "l" => {
                    l = Some(value.parse::<usize>().map_err(|_| bad(format!("invalid L `{value}`")))?)
                }
                "strict" => spec.strict = true,
                "iters" => {
                    spec.max_iterations = Some(
                        value.parse().map_err(|_| bad(format!("invalid iteration cap `{value}`")))?,
                    )
                }
                "eps" => {
                    spec.epsilon = match value.split_once(':') {
                        _ if value == "noise" => EpsilonPolicy::Noise,
                        Some(("rel", x)) => EpsilonPolicy::Fixed(ResidualThreshold::Relative(
                            x.parse().map_err(|_| bad(format!("invalid epsilon `{x}`")))?,
                        )),
                        Some(("abs", x)) => EpsilonPolicy::Fixed(ResidualThreshold::Absolute(
                            x.parse().map_err(|_| bad(format!("invalid epsilon `{x}`")))?,
                        )),
                        _ => return Err(bad(format!("invalid epsilon `{value}`"))),
                    }
                }
                other => return Err(bad(format!("unknown option `{other}`"))),
            }
        }
        spec.kind = match name.to_ascii_lowercase().as_str() {
            "mols" => AlgorithmKind::Mols { l: l.unwrap_or(1) },
            "ols" => AlgorithmKind::Ols,
            "omp" => AlgorithmKind::Omp,
            "cosamp" => AlgorithmKind::Cosamp,
            "irls" => AlgorithmKind::Irls,
            "oracle" | "oracle_ls" => AlgorithmKind::Oracle,
            _ => return Err(Error::UnknownAlgorithm(name.to_string())),
        };
        if l.is_some() && !matches!(spec.kind, AlgorithmKind::Mols { .. }) {
            return Err(bad("L applies to mols only".into()));
        }
        Ok(spec)
    }
}

/// Definition of a sweep. Dimensions not being swept take the fixed values
/// `m`, `sparsity` and `snr_db`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub m: usize,
    pub n: usize,
    pub sparsity: usize,
    pub snr_db: SnrDb,
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub trials: usize,
    pub signal_kind: SignalKind,
    pub algorithms: Vec<AlgorithmSpec>,
    pub master_seed: u64,
    /// Relative error below which a recovery counts as exact.
    pub exact_tol: f64,
    pub normalize: bool,
    /// Keep one [`TrialLog`] entry per trial.
    pub log_trials: bool,
}

impl SweepSpec {
    /// A sweep with the standard experimental settings (`exact_tol = 1e-6`,
    /// normalized columns, noiseless).
    pub fn new(m: usize, n: usize, variable: SweepVariable, values: Vec<f64>) -> Self {
        Self {
            m,
            n,
            sparsity: 1,
            snr_db: SnrDb::Infinite,
            variable,
            values,
            trials: 1,
            signal_kind: SignalKind::Gaussian,
            algorithms: Vec::new(),
            master_seed: 0,
            exact_tol: 1e-6,
            normalize: true,
            log_trials: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if self.values.is_empty() {
            return Err(Error::InvalidParameter("sweep values must be nonempty".into()));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("sweep values must be strictly increasing".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidParameter("at least one algorithm is required".into()));
        }
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidParameter("m and n must be positive".into()));
        }
        if !(self.exact_tol >= 0.0) {
            return Err(Error::InvalidParameter("exact_tol must be >= 0".into()));
        }
        if matches!(self.variable, SweepVariable::K | SweepVariable::M)
            && self.values.iter().any(|v| v.fract() != 0.0 || *v < 1.0)
        {
            return Err(Error::InvalidParameter(format!(
                "values of {} must be positive integers",
                self.variable
            )));
        }
        Ok(())
    }

    /// `(m, K, snr)` at one sweep value.
    pub fn point(&self, value: f64) -> (usize, usize, SnrDb) {
        match self.variable {
            SweepVariable::K => (self.m, value as usize, self.snr_db),
            SweepVariable::M => (value as usize, self.sparsity, self.snr_db),
            SweepVariable::SnrDb => (self.m, self.sparsity, SnrDb::Finite(value)),
        }
    }

    /// Canonical one-line description, hashed into the CSV provenance line.
    pub fn canonical(&self) -> String {
        let values: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        let algs: Vec<String> = self.algorithms.iter().map(|a| a.to_string()).collect();
        format!(
            "m={};n={};K={};snr_db={};var={};values={};trials={};signal={};algs={};seed={};exact_tol={};normalize={}",
            self.m,
            self.n,
            self.sparsity,
            self.snr_db,
            self.variable,
            values.join(" "),
            self.trials,
            self.signal_kind,
            algs.join(" "),
            self.master_seed,
            self.exact_tol,
            self.normalize
        )
    }

    /// First 16 hex digits of the SHA-256 of [`Self::canonical`].
    pub fn hash(&self) -> String {
        short_hash(self.canonical().as_bytes())
    }

    /// Seed of trial `t` at sweep value index `v`.
    pub fn trial_seed(&self, v: usize, t: usize) -> u64 {
        child_seed(child_seed(self.master_seed, v as u64), t as u64)
    }

    /// The instance used by trial `t` at sweep value index `v`.
    pub fn instance(&self, v: usize, t: usize) -> Result<ProblemInstance> {
        let (m, k, snr) = self.point(self.values[v]);
        let seed = self.trial_seed(v, t);
        let matrix = generate_gaussian_matrix(m, self.n, child_seed(seed, stream::MATRIX), self.normalize);
        let x = generate_sparse_signal(self.n, k, self.signal_kind, child_seed(seed, stream::SIGNAL))?;
        let inst = ProblemInstance::noiseless(matrix, x)?;
        match snr {
            SnrDb::Infinite => Ok(inst),
            s => inst.add_noise(s, child_seed(seed, stream::NOISE)),
        }
    }
}

/// SHA-256 (first 16 hex digits) of the matrix entries and measurements.
pub fn instance_hash(instance: &ProblemInstance) -> String {
    let mut h = Sha256::new();
    for v in instance.matrix.entries().iter().chain(&instance.y) {
        h.update(v.to_le_bytes());
    }
    hex::encode(&h.finalize()[..8])
}

/// Outcome of one algorithm on one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub exact: bool,
    pub mse: f64,
    pub iterations: usize,
    pub failed: bool,
}

/// Per-trial record kept when [`SweepSpec::log_trials`] is set.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialLog {
    pub value: f64,
    pub trial: usize,
    pub seed: u64,
    /// Hash of the instance each algorithm received, in algorithm order.
    pub instance_hashes: Vec<String>,
    /// `None` for cells skipped as inadmissible.
    pub outcomes: Vec<Option<TrialOutcome>>,
}

/// One aggregated cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub algorithm: String,
    pub variable: SweepVariable,
    pub value: f64,
    /// Zero for skipped cells.
    pub trials: usize,
    pub exact_count: usize,
    pub frequency_exact: f64,
    pub mean_mse: f64,
    pub mean_iterations: f64,
    /// Trials where the solver errored or stopped on a rank or candidate failure.
    pub failures: usize,
    /// Seed from which this cell's trial seeds are derived.
    pub point_seed: u64,
}

/// Result of a sweep, one row per `(algorithm, value)` in algorithm-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub master_seed: u64,
    pub spec_hash: String,
    pub trial_log: Vec<TrialLog>,
}

pub const CSV_HEADER: &str =
    "algorithm,sweep_variable,sweep_value,trials,frequency_exact,mean_mse,mean_iterations,failures";

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = provenance_line(self.master_seed, &self.spec_hash);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{:e},{},{}\n",
                r.algorithm,
                r.variable,
                r.value,
                r.trials,
                r.frequency_exact,
                r.mean_mse,
                r.mean_iterations,
                r.failures
            ));
        }
        out
    }

    /// Parses a CSV in the layout of [`Self::to_csv`]. Comment lines are skipped.
    /// Algorithm names are kept verbatim, so results of external solvers can be
    /// merged with [`Self::merge`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut master_seed = 0;
        let mut spec_hash = String::new();
        let mut header_seen = false;
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
                if parts.len() == 3 {
                    master_seed = parts[1].parse().unwrap_or(0);
                    spec_hash = parts[2].to_string();
                }
                continue;
            }
            if !header_seen {
                if line != CSV_HEADER {
                    return Err(Error::Parse { line: lineno, message: "unexpected header".into() });
                }
                header_seen = true;
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 8 {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected 8 fields, found {}", f.len()),
                });
            }
            let num = |s: &str| -> Result<f64> {
                s.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("invalid number `{s}`"),
                })
            };
            let int = |s: &str| -> Result<usize> {
                s.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("invalid count `{s}`"),
                })
            };
            let trials = int(f[3])?;
            let frequency_exact = num(f[4])?;
            rows.push(SweepRow {
                algorithm: f[0].to_string(),
                variable: f[1].parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("invalid sweep variable `{}`", f[1]),
                })?,
                value: num(f[2])?,
                trials,
                exact_count: (frequency_exact * trials as f64).round() as usize,
                frequency_exact,
                mean_mse: num(f[5])?,
                mean_iterations: num(f[6])?,
                failures: int(f[7])?,
                point_seed: 0,
            });
        }
        if !header_seen {
            return Err(Error::Parse { line: 1, message: "missing header".into() });
        }
        Ok(Self { rows, master_seed, spec_hash, trial_log: Vec::new() })
    }

    /// Appends the rows of `other` (for example externally computed baselines).
    pub fn merge(&mut self, other: &SweepTable) {
        self.rows.extend(other.rows.iter().cloned());
    }

    pub fn rows_for<'a>(&'a self, algorithm: &'a str) -> impl Iterator<Item = &'a SweepRow> + 'a {
        self.rows.iter().filter(move |r| r.algorithm == algorithm)
    }

    pub fn algorithms(&self) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        for r in &self.rows {
            if !names.contains(&r.algorithm) {
                names.push(r.algorithm.clone());
            }
        }
        names
    }

    pub fn row(&self, algorithm: &str, value: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.algorithm == algorithm && r.value == value)
    }
}

fn run_trial(spec: &SweepSpec, v: usize, t: usize) -> Result<(Vec<Option<TrialOutcome>>, Vec<String>)> {
    let instance = spec.instance(v, t)?;
    let (m, k, snr) = spec.point(spec.values[v]);
    let truth = instance.truth.as_ref().expect("generated instances carry the truth");
    let x_norm = truth.norm();
    let mut outcomes = Vec::with_capacity(spec.algorithms.len());
    let mut hashes = Vec::new();
    for alg in &spec.algorithms {
        if spec.log_trials {
            hashes.push(instance_hash(&instance));
        }
        let Ok(params) = alg.params(k, m, spec.n, snr) else {
            outcomes.push(None);
            continue;
        };
        let outcome = match alg.run(&instance, &params) {
            Ok(res) => {
                let err = res.error_norm(truth);
                TrialOutcome {
                    exact: err <= spec.exact_tol * x_norm,
                    mse: err * err / spec.n as f64,
                    iterations: res.iterations,
                    failed: res.termination.is_failure(),
                }
            }
            Err(_) => TrialOutcome {
                exact: false,
                mse: x_norm * x_norm / spec.n as f64,
                iterations: 0,
                failed: true,
            },
        };
        outcomes.push(Some(outcome));
    }
    Ok((outcomes, hashes))
}

/// Runs every trial of `spec` on the current rayon pool.
///
/// Trial seeds depend only on `(master_seed, value index, trial index)` and
/// results are summed in trial order, so the table does not depend on the
/// number of worker threads.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    spec.validate()?;
    let work: Vec<(usize, usize)> = (0..spec.values.len())
        .flat_map(|v| (0..spec.trials).map(move |t| (v, t)))
        .collect();
    let results: Vec<(Vec<Option<TrialOutcome>>, Vec<String>)> = work
        .par_iter()
        .map(|&(v, t)| run_trial(spec, v, t))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (a, alg) in spec.algorithms.iter().enumerate() {
        for (v, &value) in spec.values.iter().enumerate() {
            let cell = &results[v * spec.trials..(v + 1) * spec.trials];
            let mut trials = 0;
            let mut exact = 0;
            let mut mse = 0.0;
            let mut iters = 0usize;
            let mut failures = 0;
            for (outcomes, _) in cell {
                if let Some(o) = outcomes[a] {
                    trials += 1;
                    exact += o.exact as usize;
                    mse += o.mse;
                    iters += o.iterations;
                    failures += o.failed as usize;
                }
            }
            let (freq, mean_mse, mean_iter) = if trials == 0 {
                (f64::NAN, f64::NAN, f64::NAN)
            } else {
                let t = trials as f64;
                (exact as f64 / t, mse / t, iters as f64 / t)
            };
            rows.push(SweepRow {
                algorithm: alg.to_string(),
                variable: spec.variable,
                value,
                trials,
                exact_count: exact,
                frequency_exact: freq,
                mean_mse,
                mean_iterations: mean_iter,
                failures,
                point_seed: child_seed(spec.master_seed, v as u64),
            });
        }
    }
    let trial_log = if spec.log_trials {
        work.iter()
            .zip(results)
            .map(|(&(v, t), (outcomes, instance_hashes))| TrialLog {
                value: spec.values[v],
                trial: t,
                seed: spec.trial_seed(v, t),
                instance_hashes,
                outcomes,
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(SweepTable { rows, master_seed: spec.master_seed, spec_hash: spec.hash(), trial_log })
}

/// [`run_sweep`] on a dedicated pool of `threads` workers (0 = rayon default).
pub fn run_sweep_with_threads(spec: &SweepSpec, threads: usize) -> Result<SweepTable> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| run_sweep(spec))
}

/// Largest swept `K` at which every trial of `algorithm` was exact; 0 if none.
pub fn critical_sparsity(table: &SweepTable, algorithm: &str) -> Result<usize> {
    let rows: Vec<&SweepRow> = table.rows_for(algorithm).collect();
    if rows.is_empty() {
        return Err(Error::UnknownAlgorithm(algorithm.to_string()));
    }
    Ok(rows
        .iter()
        .filter(|r| r.variable == SweepVariable::K && r.trials > 0 && r.frequency_exact == 1.0)
        .map(|r| r.value as usize)
        .max()
        .unwrap_or(0))
}

/// MSE of one algorithm relative to the oracle at one sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct MseRatio {
    pub algorithm: String,
    pub value: f64,
    pub mse: f64,
    pub oracle_mse: f64,
    pub ratio: f64,
}

/// Name of the oracle rows in a table.
pub const ORACLE_NAME: &str = "oracle";

/// `MSE_alg / MSE_oracle` for every row of every algorithm.
pub fn mse_sweep_summary(table: &SweepTable) -> Result<Vec<MseRatio>> {
    let mut out = Vec::new();
    for r in table.rows.iter().filter(|r| r.trials > 0) {
        let oracle = table
            .rows
            .iter()
            .find(|o| o.algorithm == ORACLE_NAME && o.value == r.value && o.trials > 0)
            .ok_or_else(|| Error::MissingOracleRows(r.value.to_string()))?;
        out.push(MseRatio {
            algorithm: r.algorithm.clone(),
            value: r.value,
            mse: r.mean_mse,
            oracle_mse: oracle.mean_mse,
            ratio: r.mean_mse / oracle.mean_mse,
        });
    }
    Ok(out)
}

/// A gnuplot script plotting every algorithm of `table` from `csv_path`.
/// Frequency is plotted for `K` and `m` sweeps, MSE (log scale) for SNR sweeps.
pub fn plot_script(table: &SweepTable, csv_path: &str) -> String {
    let variable = table.rows.first().map(|r| r.variable).unwrap_or(SweepVariable::K);
    let (ylabel, column, logscale) = match variable {
        SweepVariable::SnrDb => ("MSE", 6, "set logscale y\n"),
        _ => ("frequency of exact recovery", 5, ""),
    };
    let mut s = format!(
        "set datafile separator ','\nset key outside right\nset xlabel '{variable}'\nset ylabel '{ylabel}'\n{logscale}set grid\n"
    );
    let plots: Vec<String> = table
        .algorithms()
        .iter()
        .map(|a| {
            format!(
                "'{csv_path}' using (strcol(1) eq '{a}' ? $3 : 1/0):{column} with linespoints title '{a}'"
            )
        })
        .collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}
