use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use mols::analysis::{
    checks_to_csv, noisy_guarantee_check, probe_trace_checks, recovery_condition_from,
    residual_decay_check, rip_bruteforce,
};
use mols::experiments::{plot_script, run_sweep, AlgorithmKind};
use mols::io::{
    format_matrix, format_signal, format_vector, parse_matrix, parse_signal, parse_vector,
    provenance_line, read_to_string, short_hash, write_string,
};
use mols::problem::{generate_gaussian_matrix, generate_sparse_signal};
use mols::rng::{child_seed, stream};
use mols::{AlgorithmParams, BoundCheck, ProblemInstance, SnrDb, SweepSpec};

use crate::{Cli, Command, GenArgs, RecoverArgs, RipArgs, SweepArgs, VerifyArgs, EXIT_SOLVER_FAILURE};

pub fn run(cli: Cli) -> Result<u8> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .context("configuring the worker pool")?;
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Recover(a) => recover(a),
        Command::Sweep(a) => sweep(a),
        Command::Rip(a) => rip(a),
        Command::Verify(a) => verify(a),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_string(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    Ok(read_to_string(path)?)
}

/// Parses `start:stop:step` (inclusive) or `a,b,c`.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let num = |s: &str| s.trim().parse::<f64>().with_context(|| format!("invalid number `{s}` in --values"));
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(step > 0.0) || stop < start {
                bail!("--values `{text}`: need start <= stop and step > 0");
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + i as f64 * step).collect())
        }
        [_] => text.split(',').map(num).collect(),
        _ => bail!("--values `{text}`: expected start:stop:step or a comma-separated list"),
    }
}

fn gen(a: GenArgs) -> Result<u8> {
    let matrix = generate_gaussian_matrix(a.m, a.n, child_seed(a.seed, stream::MATRIX), a.normalize);
    let x = generate_sparse_signal(a.n, a.k, a.signal, child_seed(a.seed, stream::SIGNAL))?;
    let mut inst = ProblemInstance::noiseless(matrix, x)?;
    if let SnrDb::Finite(_) = a.snr {
        inst = inst.add_noise(a.snr, child_seed(a.seed, stream::NOISE))?;
    }
    let canonical = format!(
        "gen;m={};n={};K={};signal={};snr_db={};normalize={};seed={}",
        a.m, a.n, a.k, a.signal, a.snr, a.normalize, a.seed
    );
    let head = provenance_line(a.seed, &short_hash(canonical.as_bytes()));
    std::fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    let file = |name: &str, body: String| write_string(&a.out_dir.join(name), &(head.clone() + &body));
    file("matrix.txt", format_matrix(&inst.matrix))?;
    file("signal.txt", format_signal(inst.truth.as_ref().expect("generated")))?;
    file("y.txt", format_vector(&inst.y))?;
    if let Some(v) = &inst.noise {
        file("noise.txt", format_vector(v))?;
    }
    Ok(0)
}

fn recover(a: RecoverArgs) -> Result<u8> {
    let matrix_text = read(&a.matrix)?;
    let y_text = read(&a.y)?;
    let matrix = parse_matrix(&matrix_text).with_context(|| a.matrix.display().to_string())?;
    let y = parse_vector(&y_text).with_context(|| a.y.display().to_string())?;
    let truth = match &a.truth {
        Some(p) => Some(parse_signal(&read(p)?).with_context(|| p.display().to_string())?),
        None => None,
    };
    let (m, n) = (matrix.rows(), matrix.cols());
    let inst = ProblemInstance::new(matrix, y)?;
    if let Some(x) = &truth {
        if x.n() != n {
            bail!("dimension mismatch: signal length {} but the matrix has {n} columns", x.n());
        }
    }
    let params = a.alg.params(a.k, m, n, SnrDb::Infinite)?;
    let result = a.alg.run(&inst, &params)?;

    let canonical = format!(
        "recover;alg={};K={};matrix={};y={}",
        a.alg,
        a.k,
        short_hash(matrix_text.as_bytes()),
        short_hash(y_text.as_bytes())
    );
    let mut csv = provenance_line(a.seed, &short_hash(canonical.as_bytes()));
    csv.push_str("record,index,value\n");
    let _ = writeln!(csv, "termination,,{}", result.termination.as_str());
    let _ = writeln!(csv, "iterations,,{}", result.iterations);
    for (i, v) in result.support.iter().zip(&result.coefficients) {
        let _ = writeln!(csv, "coefficient,{i},{v:.16e}");
    }
    for (k, r) in result.residual_norms().iter().enumerate() {
        let _ = writeln!(csv, "residual_norm,{k},{r:.16e}");
    }
    for (k, rec) in result.trace.iter().enumerate() {
        let sel: Vec<String> = rec.selected.iter().map(|j| j.to_string()).collect();
        let _ = writeln!(csv, "selected,{},{}", k + 1, sel.join(" "));
    }
    if let Some(x) = &truth {
        let _ = writeln!(csv, "error_norm,,{:.16e}", result.error_norm(x));
    }
    emit(a.out.as_deref(), &csv)?;
    if result.termination.is_failure() {
        eprintln!("solver stopped early: {}", result.termination.as_str());
        return Ok(EXIT_SOLVER_FAILURE);
    }
    Ok(0)
}

fn sweep(a: SweepArgs) -> Result<u8> {
    let mut spec = SweepSpec::new(a.m, a.n, a.var, parse_values(&a.values)?);
    spec.sparsity = a.k;
    spec.snr_db = a.snr;
    spec.trials = a.trials;
    spec.algorithms = a.alg;
    spec.signal_kind = a.signal;
    spec.master_seed = a.seed;
    spec.exact_tol = a.exact_tol;
    spec.normalize = a.normalize;
    spec.validate()?;
    let table = run_sweep(&spec)?;
    for r in table.rows.iter().filter(|r| r.trials == 0) {
        eprintln!("{} at {} = {}: inadmissible, skipped", r.algorithm, r.variable, r.value);
    }
    let csv = table.to_csv();
    emit(a.out.as_deref(), &csv)?;
    if let (Some(plot), Some(out)) = (&a.plot, &a.out) {
        write_string(plot, &plot_script(&table, &out.display().to_string()))?;
    }
    Ok(0)
}

fn rip(a: RipArgs) -> Result<u8> {
    let text = read(&a.matrix)?;
    let matrix = parse_matrix(&text).with_context(|| a.matrix.display().to_string())?;
    let report = rip_bruteforce(&matrix, a.max_order)?;
    let canonical = format!("rip;max_order={};matrix={}", a.max_order, short_hash(text.as_bytes()));
    let csv = provenance_line(0, &short_hash(canonical.as_bytes())) + &report.to_csv();
    emit(a.out.as_deref(), &csv)?;
    Ok(0)
}

fn verify(a: VerifyArgs) -> Result<u8> {
    let l = match a.alg.kind {
        AlgorithmKind::Mols { l } => l,
        AlgorithmKind::Ols => 1,
        _ => bail!("verify supports mols and ols only, got `{}`", a.alg),
    };
    let matrix_text = read(&a.matrix)?;
    let truth_text = read(&a.truth)?;
    let matrix = parse_matrix(&matrix_text).with_context(|| a.matrix.display().to_string())?;
    let truth = parse_signal(&truth_text).with_context(|| a.truth.display().to_string())?;
    let (m, n, big_k) = (matrix.rows(), matrix.cols(), truth.sparsity());
    let (inst, noise_hash) = match &a.noise {
        Some(p) => {
            let text = read(p)?;
            let v = parse_vector(&text).with_context(|| p.display().to_string())?;
            (ProblemInstance::with_noise_vector(matrix, truth, v)?, short_hash(text.as_bytes()))
        }
        None => (ProblemInstance::noiseless(matrix, truth)?, String::from("none")),
    };
    let noisy = inst.noise.is_some();
    let params: AlgorithmParams = a.alg.params(big_k, m, n, SnrDb::Infinite)?;
    let result = a.alg.run(&inst, &params)?;
    let order = a.max_order.unwrap_or(((l + 1) * big_k).min(n));
    let rip = rip_bruteforce(&inst.matrix, order)?;

    let mut checks: Vec<BoundCheck> = vec![recovery_condition_from(&rip, big_k, l)
        .context("--max-order too small for the recovery condition")?];
    if !noisy {
        checks.extend(residual_decay_check(&result, &rip, big_k, l).context("--max-order too small")?);
    }
    if inst.matrix.is_normalized() {
        checks.extend(probe_trace_checks(&inst, &result, &rip, big_k, l, noisy).context("--max-order too small")?);
    } else {
        eprintln!("columns are not unit norm: probe checks skipped");
    }
    if noisy {
        let y_norm = inst.y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let eps = params.epsilon.resolve(y_norm);
        checks.extend(noisy_guarantee_check(&result, &inst, &rip, big_k, l, eps).context("--max-order too small")?);
    }

    let canonical = format!(
        "verify;alg={};max_order={order};matrix={};truth={};noise={noise_hash}",
        a.alg,
        short_hash(matrix_text.as_bytes()),
        short_hash(truth_text.as_bytes())
    );
    let csv = provenance_line(0, &short_hash(canonical.as_bytes())) + &checks_to_csv(&checks);
    emit(a.out.as_deref(), &csv)?;
    // The recovery and SNR conditions are preconditions; failing them is not a violation.
    let (pre, bounds): (Vec<&BoundCheck>, Vec<&BoundCheck>) = checks
        .iter()
        .partition(|c| c.name.starts_with("recovery_condition") || c.name == "snr_condition");
    let applicable = bounds.iter().filter(|c| c.applicable).count();
    let violated = bounds.iter().filter(|c| c.is_violation()).count();
    let held: Vec<String> = pre.iter().map(|c| format!("{} {}", c.name, if c.satisfied { "holds" } else { "fails" })).collect();
    eprintln!("{}; {} bound checks, {applicable} applicable, {violated} violated", held.join(", "), bounds.len());
    Ok(0)
}
