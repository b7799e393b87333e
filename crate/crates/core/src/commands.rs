//! Command-line surface: argument types, subcommand drivers and exit codes.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::traits::Zero;
use serde::Serialize;
use serde_json::json;

use crate::convergence::{
    bound_report, empirical_tv, mixing_time, pk_sequence, tv_distance, Method, MixingReport, MixingSource,
};
use crate::error::{Error, Result};
use crate::exact_chain::{
    aux_matrix, aux_matrix_via_operator, check_reversibility, hanlon_ell_matrix, hanlon_matrix, metropolis_matrix,
    stationarity_residual, TransitionMatrix,
};
use crate::measures::{pi_ewens, pi_inf_t_float, pi_qt_float, pi_qt_on, pi_qt_table, Measure};
use crate::partition::{partition_counts, Partition, PartitionIndex};
use crate::rng::RngStream;
use crate::samplers::{run_chain, Stepper};
use crate::scalar::{abs, int, max_abs, parse_rational, parse_rational_or_decimal, Field, Rational};
use crate::spectral::{beta, eigen_table, gram_check, kostka_qt};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

/// Largest `k` per exact/float construction.
const TABLE_EXACT_MAX: usize = 30;
const TABLE_FLOAT_MAX: usize = 60;
const AUX_EXACT_MAX: usize = 12;
const AUX_FLOAT_MAX: usize = 25;
const SPARSE_EXACT_MAX: usize = 20;
const SPARSE_FLOAT_MAX: usize = 40;
const SPECTRUM_MAX: usize = 10;

#[derive(Parser, Debug)]
#[command(name = "macchain", version, about = "Macdonald-measure Markov chain on partitions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    Aux,
    Metropolis,
    Hanlon,
}

#[derive(Args, Debug, Clone)]
pub struct Params {
    #[arg(long)]
    pub k: usize,
    /// Rational `p/q` or integer; decimals only with `--backend float`.
    #[arg(long, default_value = "4")]
    pub q: String,
    #[arg(long, default_value = "2")]
    pub t: String,
    #[arg(long, value_enum, default_value = "exact")]
    pub backend: BackendArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Args, Debug, Clone)]
pub struct ChainArgs {
    #[arg(long, value_enum, default_value = "aux")]
    pub chain: ChainKind,
    #[arg(long, default_value = "2")]
    pub alpha: String,
    /// Starting partition, e.g. `5,3,1,1`; defaults to the single part `(k)`.
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Stationary probabilities `pi_{q,t}` for all partitions of k.
    Table(Params),
    /// Runs one chain and writes its trace plus a summary.
    Sample {
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Materializes a transition matrix.
    Exact {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value = "aux")]
        chain: ChainKind,
        #[arg(long, default_value = "2")]
        alpha: String,
    },
    /// Eigenvalues, eigenvectors and the X table in exact arithmetic.
    Spectrum(Params),
    /// Smallest step count with total variation below `--eps`.
    Mix {
        #[command(flatten)]
        params: Params,
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Search cap on the step count.
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Independent chains for the empirical estimate.
        #[arg(long, default_value_t = 10_000)]
        chains: usize,
    },
    /// Explicit upper and lower convergence bounds.
    Bound {
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 2)]
        steps: usize,
        #[arg(long, default_value = "-1")]
        theta: String,
    },
    /// Transposition walk with Ewens stationary law.
    Hanlon {
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value = "2")]
        alpha: String,
    },
    /// Runs the invariant checks for every size up to `--k`.
    Verify(Params),
}

/// What a successful run produced; checks may still have failed.
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Done,
    ChecksFailed,
}

pub fn exit_code(result: &Result<Outcome>) -> i32 {
    match result {
        Ok(Outcome::Done) => EXIT_OK,
        Ok(Outcome::ChecksFailed) => EXIT_VALIDATION,
        Err(Error::Infeasible(_)) | Err(Error::IterationCap(_)) | Err(Error::RetryCap(_)) => EXIT_INFEASIBLE,
        Err(Error::Io(_)) | Err(Error::Csv(_)) | Err(Error::Json(_)) => EXIT_FAILED,
        Err(_) => EXIT_VALIDATION,
    }
}

fn open_out(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(out: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    let mut w = open_out(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    out.with_file_name(name)
}

fn exact_qt(p: &Params) -> Result<(Rational, Rational)> {
    let q = parse_rational(&p.q)?;
    let t = parse_rational(&p.t)?;
    check_gt_one(&q, &t)?;
    Ok((q, t))
}

fn float_qt(p: &Params) -> Result<(f64, f64)> {
    let q = parse_rational_or_decimal(&p.q)?.to_f64_lossy();
    let t = parse_rational_or_decimal(&p.t)?.to_f64_lossy();
    if !(q > 1.0 && t > 1.0) {
        return Err(Error::Domain(format!("need q, t > 1, got q={q}, t={t}")));
    }
    Ok((q, t))
}

fn check_gt_one(q: &Rational, t: &Rational) -> Result<()> {
    if *q <= int(1) || *t <= int(1) {
        return Err(Error::Domain(format!("need q, t > 1, got q={q}, t={t}")));
    }
    Ok(())
}

fn alpha_value(text: &str, backend: BackendArg) -> Result<Rational> {
    let a = match backend {
        BackendArg::Exact => parse_rational(text)?,
        BackendArg::Float => parse_rational_or_decimal(text)?,
    };
    if a < int(1) {
        return Err(Error::Domain(format!("alpha must be at least 1, got {a}")));
    }
    Ok(a)
}

fn cap(what: &str, k: usize, max: usize) -> Result<()> {
    if k > max {
        return Err(Error::Infeasible(format!("{what} is limited to k <= {max}, got k={k}")));
    }
    Ok(())
}

fn start_of(chain: &ChainArgs, k: usize) -> Result<Partition> {
    match &chain.start {
        None => Ok(Partition::row(k)),
        Some(s) => {
            let p: Partition = s.parse()?;
            if p.size() != k {
                return Err(Error::SizeMismatch(p.clone(), p.size(), k));
            }
            Ok(p)
        }
    }
}

fn stepper_of(kind: ChainKind, params: &Params, alpha: &str) -> Result<Stepper> {
    let s = match kind {
        ChainKind::Aux => {
            let (q, t) = float_qt(params)?;
            Stepper::Aux { q, t }
        }
        ChainKind::Metropolis => {
            let (q, t) = float_qt(params)?;
            Stepper::Metropolis { q, t }
        }
        ChainKind::Hanlon => Stepper::Hanlon { alpha: alpha_value(alpha, BackendArg::Float)?.to_f64_lossy() },
    };
    s.validate()?;
    Ok(s)
}

/// Float stationary law of the given chain, when `p(k)` allows enumerating it.
fn float_target(kind: ChainKind, params: &Params, alpha: &str) -> Result<Measure<f64>> {
    let index = PartitionIndex::shared(params.k);
    match kind {
        ChainKind::Hanlon => {
            let a = alpha_value(alpha, BackendArg::Float)?.to_f64_lossy();
            Ok(pi_ewens(params.k, &a)?)
        }
        _ => {
            let (q, t) = float_qt(params)?;
            pi_qt_float(index, q, t)
        }
    }
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Table(p) => cmd_table(&p),
        Command::Sample { params, chain, steps } => cmd_sample(&params, &chain, steps),
        Command::Exact { params, chain, alpha } => cmd_exact(&params, chain, &alpha),
        Command::Spectrum(p) => cmd_spectrum(&p),
        Command::Mix { params, chain, eps, steps, chains } => cmd_mix(&params, &chain, eps, steps, chains),
        Command::Bound { params, steps, theta } => cmd_bound(&params, steps, &theta),
        Command::Hanlon { params, alpha } => cmd_hanlon(&params, &alpha),
        Command::Verify(p) => cmd_verify(&p),
    }
}

fn emit_measure<T: Field>(m: &Measure<T>, p: &Params, extra: serde_json::Value) -> Result<()> {
    match p.format {
        Format::Csv => {
            let mut w = open_out(p.out.as_deref())?;
            m.write_csv(&mut w)?;
            w.flush()?;
            Ok(())
        }
        Format::Json => {
            let mut v = m.to_json();
            if let (Some(obj), serde_json::Value::Object(e)) = (v.as_object_mut(), extra) {
                obj.extend(e);
            }
            write_json(p.out.as_deref(), &v)
        }
    }
}

pub fn cmd_table(p: &Params) -> Result<Outcome> {
    let echo = json!({ "q": p.q, "t": p.t });
    match p.backend {
        BackendArg::Exact => {
            cap("exact table", p.k, TABLE_EXACT_MAX)?;
            let (q, t) = exact_qt(p)?;
            emit_measure(&pi_qt_table(p.k, &q, &t)?, p, echo)?;
        }
        BackendArg::Float => {
            cap("float table", p.k, TABLE_FLOAT_MAX)?;
            let (q, t) = float_qt(p)?;
            emit_measure(&pi_qt_float(PartitionIndex::shared(p.k), q, t)?, p, echo)?;
        }
    }
    Ok(Outcome::Done)
}

#[derive(Debug, Serialize)]
pub struct SampleSummary {
    pub k: usize,
    pub stepper: Stepper,
    pub seed: u64,
    pub stream: u64,
    pub steps: usize,
    pub start: Partition,
    pub last: Partition,
    /// Visits per state over the whole trace, when `p(k) <= 10^4`.
    pub occupancy: Option<BTreeMap<String, usize>>,
    /// TV between the trace occupancy and the exact stationary law, when `p(k) <= 10^4`.
    pub empirical_tv: Option<f64>,
    /// `largest_part[i]` counts visits to states whose largest part is `i`.
    pub largest_part: Vec<usize>,
    pub w_rejections: u64,
    pub inf_rejections: u64,
}

pub fn sample_summary(kind: ChainKind, params: &Params, chain: &ChainArgs, steps: usize) -> Result<(SampleSummary, crate::samplers::ChainTrace)> {
    let k = params.k;
    let start = start_of(chain, k)?;
    let stepper = stepper_of(kind, params, &chain.alpha)?;
    let mut rng = RngStream::new(chain.seed, 0);
    let trace = run_chain(&start, steps, stepper, &mut rng)?;
    let mut largest = vec![0usize; k + 1];
    for s in &trace.states {
        largest[s.largest()] += 1;
    }
    let small = partition_counts(k)[k] <= 10_000;
    let (occupancy, tv) = if small {
        let mut occ = BTreeMap::new();
        for s in &trace.states {
            *occ.entry(s.to_string()).or_insert(0) += 1;
        }
        let pi = float_target(kind, params, &chain.alpha)?;
        (Some(occ), Some(empirical_tv(&trace.states, &pi)?.tv))
    } else {
        (None, None)
    };
    let summary = SampleSummary {
        k,
        stepper,
        seed: chain.seed,
        stream: 0,
        steps,
        start,
        last: trace.states.last().cloned().unwrap_or_else(Partition::empty),
        occupancy,
        empirical_tv: tv,
        largest_part: largest,
        w_rejections: trace.w_rejections.iter().sum(),
        inf_rejections: trace.inf_rejections.iter().sum(),
    };
    Ok((summary, trace))
}

fn write_largest_csv(path: &Path, summary: &SampleSummary) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["largest_part", "count", "frequency"])?;
    let total = summary.largest_part.iter().sum::<usize>().max(1) as f64;
    for (i, c) in summary.largest_part.iter().enumerate().skip(1) {
        w.write_record([i.to_string(), c.to_string(), format!("{:.6}", *c as f64 / total)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn cmd_sample(params: &Params, chain: &ChainArgs, steps: usize) -> Result<Outcome> {
    let (summary, trace) = sample_summary(chain.chain, params, chain, steps)?;
    match &params.out {
        Some(out) => {
            match params.format {
                Format::Csv => {
                    let mut w = open_out(Some(out))?;
                    trace.write_csv(&mut w)?;
                    w.flush()?;
                }
                Format::Json => write_json(Some(out), &serde_json::to_value(&trace)?)?,
            }
            write_json(Some(&sibling(out, ".summary.json")), &serde_json::to_value(&summary)?)?;
            write_largest_csv(&sibling(out, ".largest.csv"), &summary)?;
        }
        None => write_json(None, &serde_json::to_value(&summary)?)?,
    }
    Ok(Outcome::Done)
}

fn emit_matrix<T: Field>(m: &TransitionMatrix<T>, p: &Params, extra: serde_json::Value) -> Result<()> {
    match p.format {
        Format::Csv => {
            let mut w = open_out(p.out.as_deref())?;
            m.write_csv(&mut w)?;
            w.flush()?;
            Ok(())
        }
        Format::Json => {
            let mut v = m.to_json();
            if let (Some(obj), serde_json::Value::Object(e)) = (v.as_object_mut(), extra) {
                obj.extend(e);
            }
            write_json(p.out.as_deref(), &v)
        }
    }
}

pub fn cmd_exact(p: &Params, chain: ChainKind, alpha: &str) -> Result<Outcome> {
    let echo = json!({ "chain": chain, "q": p.q, "t": p.t, "alpha": alpha });
    match (chain, p.backend) {
        (ChainKind::Aux, BackendArg::Exact) => {
            cap("exact auxiliary matrix", p.k, AUX_EXACT_MAX)?;
            let (q, t) = exact_qt(p)?;
            emit_matrix(&aux_matrix(p.k, &q, &t)?, p, echo)?;
        }
        (ChainKind::Aux, BackendArg::Float) => {
            cap("float auxiliary matrix", p.k, AUX_FLOAT_MAX)?;
            let (q, t) = float_qt(p)?;
            emit_matrix(&aux_matrix(p.k, &q, &t)?, p, echo)?;
        }
        (ChainKind::Metropolis, BackendArg::Exact) => {
            cap("exact Metropolis matrix", p.k, SPARSE_EXACT_MAX)?;
            let (q, t) = exact_qt(p)?;
            emit_matrix(&metropolis_matrix(p.k, &q, &t)?, p, echo)?;
        }
        (ChainKind::Metropolis, BackendArg::Float) => {
            cap("float Metropolis matrix", p.k, SPARSE_FLOAT_MAX)?;
            let (q, t) = float_qt(p)?;
            emit_matrix(&metropolis_matrix(p.k, &q, &t)?, p, echo)?;
        }
        (ChainKind::Hanlon, _) => return cmd_hanlon(p, alpha),
    }
    Ok(Outcome::Done)
}

pub fn cmd_spectrum(p: &Params) -> Result<Outcome> {
    cap("exact spectrum", p.k, SPECTRUM_MAX)?;
    if p.backend == BackendArg::Float {
        return Err(Error::Infeasible("the spectrum is computed in exact arithmetic only".into()));
    }
    let (q, t) = exact_qt(p)?;
    let table = eigen_table(p.k, &q, &t)?;
    let mut v = table.to_json();
    if let Some(obj) = v.as_object_mut() {
        let kostka: Vec<Vec<String>> = kostka_qt(&table)
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect();
        obj.insert("kostka".into(), json!(kostka));
        obj.insert("eigen_residual".into(), json!(table.eigen_residual().to_string()));
    }
    write_json(p.out.as_deref(), &v)?;
    Ok(Outcome::Done)
}

#[derive(Debug, Serialize)]
pub struct MixOutput {
    pub k: usize,
    pub chain: ChainKind,
    pub q: String,
    pub t: String,
    pub alpha: String,
    pub start: Partition,
    pub eps: f64,
    pub seed: u64,
    pub chains: usize,
    pub report: MixingReport,
}

pub fn mix_report(params: &Params, chain: &ChainArgs, eps: f64, steps: usize, chains: usize) -> Result<MixOutput> {
    let k = params.k;
    let start = start_of(chain, k)?;
    let stepper = stepper_of(chain.chain, params, &chain.alpha)?;
    let count = partition_counts(k)[k];
    if count > 300_000 {
        return Err(Error::Infeasible(format!("p({k}) = {count} states is too many to compare against")));
    }
    let pi = float_target(chain.chain, params, &chain.alpha)?;
    let wrap = |report| MixOutput {
        k,
        chain: chain.chain,
        q: params.q.clone(),
        t: params.t.clone(),
        alpha: chain.alpha.clone(),
        start: start.clone(),
        eps,
        seed: chain.seed,
        chains,
        report,
    };
    if let (Stepper::Aux { q, t }, true) = (stepper, start == Partition::row(k)) {
        let at0 = 1.0 - pi.get(&start).copied().unwrap_or(0.0);
        if at0 < eps {
            return Ok(wrap(MixingReport { steps: 0, tv: at0, method: Method::RowCollapse, mc_error: None, binned: false }));
        }
        let one = tv_distance(&pi_inf_t_float(pi.index().clone(), t)?, &pi_qt_float(pi.index().clone(), q, t)?)?;
        if one < eps {
            return Ok(wrap(MixingReport { steps: 1, tv: one, method: Method::RowCollapse, mc_error: None, binned: false }));
        }
    }
    let matrix = match stepper {
        Stepper::Aux { q, t } if k <= AUX_FLOAT_MAX => Some(aux_matrix(k, &q, &t)?),
        Stepper::Metropolis { q, t } if k <= SPARSE_FLOAT_MAX => Some(metropolis_matrix(k, &q, &t)?),
        Stepper::Hanlon { alpha } if k <= SPARSE_FLOAT_MAX => Some(hanlon_matrix(k, &alpha)?),
        _ => None,
    };
    let report = match &matrix {
        Some(m) => mixing_time(MixingSource::Matrix(m), &start, eps, &pi, steps)?,
        None => mixing_time(MixingSource::Sampler { stepper, chains, seed: chain.seed }, &start, eps, &pi, steps)?,
    };
    Ok(wrap(report))
}

pub fn cmd_mix(params: &Params, chain: &ChainArgs, eps: f64, steps: usize, chains: usize) -> Result<Outcome> {
    let out = mix_report(params, chain, eps, steps, chains)?;
    write_json(params.out.as_deref(), &serde_json::to_value(&out)?)?;
    Ok(Outcome::Done)
}

pub fn cmd_bound(p: &Params, steps: usize, theta: &str) -> Result<Outcome> {
    let (q, t) = float_qt(p)?;
    let theta = parse_rational_or_decimal(theta)?.to_f64_lossy();
    let report = bound_report(p.k, q, t, steps, theta);
    let mut v = serde_json::to_value(&report)?;
    if let Some(obj) = v.as_object_mut() {
        let pk: Vec<f64> = pk_sequence(p.k, &q, &t);
        obj.insert("p_sequence".into(), json!(pk));
        obj.insert("q_text".into(), json!(p.q));
        obj.insert("t_text".into(), json!(p.t));
    }
    write_json(p.out.as_deref(), &v)?;
    Ok(Outcome::Done)
}

pub fn cmd_hanlon(p: &Params, alpha: &str) -> Result<Outcome> {
    let echo = json!({ "chain": "hanlon", "alpha": alpha });
    match p.backend {
        BackendArg::Exact => {
            cap("exact Hanlon matrix", p.k, SPARSE_EXACT_MAX)?;
            let a = alpha_value(alpha, BackendArg::Exact)?;
            emit_matrix(&hanlon_matrix(p.k, &a)?, p, echo)?;
        }
        BackendArg::Float => {
            cap("float Hanlon matrix", p.k, SPARSE_FLOAT_MAX)?;
            let a = alpha_value(alpha, BackendArg::Float)?.to_f64_lossy();
            emit_matrix(&hanlon_matrix(p.k, &a)?, p, echo)?;
        }
    }
    Ok(Outcome::Done)
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub k: usize,
    pub passed: bool,
    /// Exact residual as a fraction string.
    pub residual: String,
}

impl CheckResult {
    fn exact(name: &str, k: usize, residual: Rational) -> Self {
        CheckResult { name: name.into(), k, passed: residual.is_zero(), residual: residual.to_string() }
    }

    fn flag(name: &str, k: usize, ok: bool) -> Self {
        CheckResult { name: name.into(), k, passed: ok, residual: if ok { "0".into() } else { "1".into() } }
    }
}

/// Row sums, stationarity and detailed balance of `m` against `pi`.
pub fn matrix_checks(name: &str, m: &TransitionMatrix<Rational>, pi: &Measure<Rational>) -> Result<Vec<CheckResult>> {
    let k = pi.k();
    let rows = max_abs(m.row_sums().into_iter().map(|s| s - int(1)));
    Ok(vec![
        CheckResult::exact(&format!("{name}/row-sums"), k, rows),
        CheckResult::exact(&format!("{name}/stationarity"), k, stationarity_residual(m, pi)?),
        CheckResult::exact(&format!("{name}/detailed-balance"), k, check_reversibility(m, pi)?),
    ])
}

/// Every exact invariant for sizes `2..=k_max` at one `(q, t)`.
pub fn verify_suite(k_max: usize, q: &Rational, t: &Rational) -> Result<Vec<CheckResult>> {
    check_gt_one(q, t)?;
    cap("verify", k_max, AUX_EXACT_MAX)?;
    let mut out = Vec::new();
    if k_max >= 2 {
        // closed forms at k = 2
        let m = aux_matrix(2, q, t)?;
        let (one, two) = (int(1), int(2));
        let stay = (t.clone() + one.clone()) / (two.clone() * t.clone());
        let up = (t.clone() + one.clone()) * (q.clone() - one.clone())
            / (two * t.clone() * (q.clone() + one.clone()));
        let r = abs(&(m.entry(0, 0) - stay)) + abs(&(m.entry(1, 0) - up));
        out.push(CheckResult::exact("k2/closed-form", 2, r));
        let b = beta(&Partition::column(2), q, t);
        let trace = abs(&(m.entry(0, 0) + m.entry(1, 1) - one - b));
        out.push(CheckResult::exact("k2/eigenvalue-trace", 2, trace));
        let pi2 = pi_qt_table(2, q, t)?;
        out.extend(matrix_checks("k2/aux", &m, &pi2)?);
    }
    for k in 2..=k_max {
        let pi = pi_qt_on(PartitionIndex::shared(k), q, t)?;
        out.push(CheckResult::exact("measure/normalized", k, abs(&(pi.total() - int(1)))));
        let m = aux_matrix(k, q, t)?;
        out.extend(matrix_checks("aux", &m, &pi)?);
        if k <= 6 {
            let op = aux_matrix_via_operator(k, q, t, k + 2)?;
            out.push(CheckResult::flag("aux/operator-form", k, op.dense() == m.dense()));
        }
        if k <= 8 {
            let table = eigen_table(k, q, t)?;
            out.push(CheckResult::exact("spectral/eigen-equation", k, table.eigen_residual()));
            out.push(CheckResult::exact("spectral/gram", k, gram_check(&table)));
        }
        for alpha in [int(1), int(2)] {
            let h = hanlon_matrix(k, &alpha)?;
            out.extend(matrix_checks("hanlon", &h, &pi_ewens(k, &alpha)?)?);
            let ell = hanlon_ell_matrix(k, &alpha, k + 3)?;
            out.push(CheckResult::flag("hanlon/operator-form", k, ell.dense() == h.dense()));
        }
    }
    Ok(out)
}

pub fn cmd_verify(p: &Params) -> Result<Outcome> {
    let (q, t) = exact_qt(p)?;
    let checks = verify_suite(p.k, &q, &t)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    write_json(
        p.out.as_deref(),
        &json!({ "k_max": p.k, "q": p.q, "t": p.t, "failed": failed, "checks": checks }),
    )?;
    Ok(if failed == 0 { Outcome::Done } else { Outcome::ChecksFailed })
}
