//! Random generation: the auxiliary-variables step, its two sub-samplers, and baselines.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::ln_eta_qt;
use crate::partition::Partition;
use crate::rng::RngStream;

/// Rejection loops give up after this many attempts.
pub const DEFAULT_RETRY_CAP: u64 = 1_000_000_000;

/// Cycle type of a uniform random permutation of `k`.
///
/// Draws `U_1` uniform on `1..=k`, then `U_2` uniform on `1..=k-U_1`, and so on,
/// stopping the first time a draw uses up everything that is left.
pub fn stick_breaking(k: usize, rng: &mut RngStream) -> Partition {
    let mut parts = Vec::new();
    let mut rest = k;
    while rest > 0 {
        let u = rng.uniform_int(1, rest);
        parts.push(u);
        rest -= u;
    }
    Partition::new(parts)
}

/// Table sizes after `k` customers of the Chinese restaurant process.
///
/// Customer `j + 1` opens a new table with probability `theta / (j + theta)`,
/// otherwise sits next to a uniformly chosen earlier customer.
pub fn chinese_restaurant(k: usize, theta: f64, rng: &mut RngStream) -> Partition {
    let mut table_of = Vec::with_capacity(k);
    let mut sizes: Vec<usize> = Vec::new();
    for j in 0..k {
        let jf = j as f64;
        if rng.bernoulli(theta / (jf + theta)) {
            table_of.push(sizes.len());
            sizes.push(1);
        } else {
            let table = table_of[rng.uniform_int(0, j - 1)];
            table_of.push(table);
            sizes[table] += 1;
        }
    }
    Partition::new(sizes)
}

/// Outcome of the part-deletion step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deletion {
    pub removed: Partition,
    pub kept: Partition,
    /// Number of coin-flip rounds, including the accepted one.
    pub attempts: u64,
}

/// Removes each part `lambda_i` independently with probability `1 - q^{-lambda_i}`,
/// redrawing until at least one part is removed.
pub fn sample_w(lambda: &Partition, q: f64, rng: &mut RngStream) -> Result<Deletion> {
    if lambda.is_empty() {
        return Err(Error::Domain("cannot delete from the empty partition".into()));
    }
    let keep_prob: Vec<f64> = lambda.parts().iter().map(|&p| q.powf(-(p as f64))).collect();
    for attempt in 1..=DEFAULT_RETRY_CAP {
        let mut removed = Vec::new();
        let mut kept = Vec::new();
        for (&p, &keep) in lambda.parts().iter().zip(&keep_prob) {
            if rng.bernoulli(keep) {
                kept.push(p);
            } else {
                removed.push(p);
            }
        }
        if !removed.is_empty() {
            return Ok(Deletion {
                removed: Partition::from_sorted(removed),
                kept: Partition::from_sorted(kept),
                attempts: attempt,
            });
        }
    }
    Err(Error::RetryCap(DEFAULT_RETRY_CAP))
}

/// A draw from the replacement law with the number of proposals it took.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replacement {
    pub mu: Partition,
    pub attempts: u64,
}

/// Draws from `pi_{inf,t}` on partitions of `r`.
///
/// Proposes a uniform-permutation cycle type and rejects it if any part of
/// size `m` sees `m` heads in a row from a `1/t` coin.
pub fn sample_pi_inf_t(r: usize, t: f64, rng: &mut RngStream) -> Result<Replacement> {
    if r == 0 || t <= 1.0 {
        return Err(Error::Domain(format!("need r >= 1 and t > 1, got r={r}, t={t}")));
    }
    for attempt in 1..=DEFAULT_RETRY_CAP {
        let mu = stick_breaking(r, rng);
        let all_heads = mu
            .parts()
            .iter()
            .any(|&m| rng.bernoulli(t.powf(-(m as f64))));
        if !all_heads {
            return Ok(Replacement { mu, attempts: attempt });
        }
    }
    Err(Error::RetryCap(DEFAULT_RETRY_CAP))
}

/// Draws from the multiplicative measure with weights `eta[i-1] = eta_i` by
/// thinning uniform-permutation cycle types part by part.
///
/// A part of size `i` survives with probability `eta_i / c^i`,
/// `c = max(1, max_i eta_i^{1/i})`.
pub fn sample_multiplicative_rejection(
    k: usize,
    eta: &[f64],
    rng: &mut RngStream,
    cap: u64,
) -> Result<Replacement> {
    if eta.len() < k || eta[..k].iter().any(|&e| e <= 0.0 || !e.is_finite()) {
        return Err(Error::Domain("need k positive finite weights".into()));
    }
    let ln_c = eta[..k]
        .iter()
        .enumerate()
        .map(|(i, e)| e.ln() / (i + 1) as f64)
        .fold(0.0f64, f64::max);
    let accept: Vec<f64> = eta[..k]
        .iter()
        .enumerate()
        .map(|(i, e)| (e.ln() - (i + 1) as f64 * ln_c).exp())
        .collect();
    for attempt in 1..=cap {
        let mu = stick_breaking(k, rng);
        if mu.parts().iter().all(|&m| rng.bernoulli(accept[m - 1])) {
            return Ok(Replacement { mu, attempts: attempt });
        }
    }
    Err(Error::RetryCap(cap))
}

/// One move of the auxiliary-variables chain with its rejection counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxMove {
    pub next: Partition,
    pub w_attempts: u64,
    pub inf_attempts: u64,
}

/// Deletes parts by `w_lambda`, then refills the removed mass from `pi_{inf,t}`.
pub fn aux_step(lambda: &Partition, q: f64, t: f64, rng: &mut RngStream) -> Result<AuxMove> {
    check_qt(q, t)?;
    let del = sample_w(lambda, q, rng)?;
    let rep = sample_pi_inf_t(del.removed.size(), t, rng)?;
    Ok(AuxMove {
        next: del.kept.union(&rep.mu),
        w_attempts: del.attempts,
        inf_attempts: rep.attempts,
    })
}

fn check_qt(q: f64, t: f64) -> Result<()> {
    if q > 1.0 && t > 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("need q, t > 1, got q={q}, t={t}")))
    }
}

/// A random transposition applied to a permutation of the given cycle type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transposition {
    /// Joins the cycles at part positions `i < j`.
    Merge(usize, usize),
    /// Cuts the cycle at position `i` into pieces of sizes `m` and `parts[i] - m`.
    Split(usize, usize),
}

/// Picks two distinct points of `1..=k` uniformly and reports what the
/// transposition does to the cycle type.
pub fn propose_transposition(lambda: &Partition, rng: &mut RngStream) -> Transposition {
    let k = lambda.size();
    let x = rng.uniform_int(0, k - 1);
    let mut y = rng.uniform_int(0, k - 2);
    if y >= x {
        y += 1;
    }
    let (px, py) = (owner(lambda, x), owner(lambda, y));
    if px == py {
        // the cyclic distance from x to y is uniform on 1..a-1
        let a = lambda.parts()[px];
        Transposition::Split(px, rng.uniform_int(1, a - 1))
    } else {
        Transposition::Merge(px.min(py), px.max(py))
    }
}

fn owner(lambda: &Partition, point: usize) -> usize {
    let mut acc = 0;
    for (i, &p) in lambda.parts().iter().enumerate() {
        acc += p;
        if point < acc {
            return i;
        }
    }
    unreachable!("point lies beyond the partition")
}

fn apply(lambda: &Partition, tr: Transposition) -> Partition {
    match tr {
        Transposition::Merge(i, j) => lambda.merge_positions(i, j),
        Transposition::Split(i, m) => lambda.split_position(i, m),
    }
}

/// Class-level Metropolis step for `pi_{q,t}` driven by random transpositions.
pub fn metropolis_step(lambda: &Partition, q: f64, t: f64, rng: &mut RngStream) -> Result<Partition> {
    check_qt(q, t)?;
    if lambda.size() < 2 {
        return Err(Error::Domain("need k >= 2".into()));
    }
    let (lq, lt) = (q.ln(), t.ln());
    let eta = |i: usize| ln_eta_qt(i, lq, lt);
    let tr = propose_transposition(lambda, rng);
    let ln_ratio = match tr {
        Transposition::Merge(i, j) => {
            let (a, b) = (lambda.parts()[i], lambda.parts()[j]);
            eta(a + b) - eta(a) - eta(b)
        }
        Transposition::Split(i, m) => {
            let a = lambda.parts()[i];
            eta(m) + eta(a - m) - eta(a)
        }
    };
    if ln_ratio >= 0.0 || rng.uniform().ln() < ln_ratio {
        Ok(apply(lambda, tr))
    } else {
        Ok(lambda.clone())
    }
}

/// Random-transposition walk filtered so that merges are always accepted and
/// splits are accepted with probability `1/alpha`.
pub fn hanlon_step(lambda: &Partition, alpha: f64, rng: &mut RngStream) -> Result<Partition> {
    if alpha < 1.0 {
        return Err(Error::Domain(format!("alpha must be at least 1, got {alpha}")));
    }
    if lambda.size() < 2 {
        return Err(Error::Domain("need r >= 2".into()));
    }
    let tr = propose_transposition(lambda, rng);
    match tr {
        Transposition::Merge(..) => Ok(apply(lambda, tr)),
        Transposition::Split(..) if rng.bernoulli(1.0 / alpha) => Ok(apply(lambda, tr)),
        Transposition::Split(..) => Ok(lambda.clone()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "chain", rename_all = "lowercase")]
pub enum Stepper {
    Aux { q: f64, t: f64 },
    Metropolis { q: f64, t: f64 },
    Hanlon { alpha: f64 },
}

impl Stepper {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Stepper::Aux { q, t } | Stepper::Metropolis { q, t } => check_qt(q, t),
            Stepper::Hanlon { alpha } if alpha >= 1.0 => Ok(()),
            Stepper::Hanlon { alpha } => Err(Error::Domain(format!(
                "alpha must be at least 1, got {alpha}"
            ))),
        }
    }

    /// One step, returning the new state and the two rejection counts (zero for the baselines).
    pub fn step(&self, lambda: &Partition, rng: &mut RngStream) -> Result<(Partition, u64, u64)> {
        match *self {
            Stepper::Aux { q, t } => {
                let m = aux_step(lambda, q, t, rng)?;
                Ok((m.next, m.w_attempts - 1, m.inf_attempts - 1))
            }
            Stepper::Metropolis { q, t } => Ok((metropolis_step(lambda, q, t, rng)?, 0, 0)),
            Stepper::Hanlon { alpha } => Ok((hanlon_step(lambda, alpha, rng)?, 0, 0)),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainTrace {
    pub start: Partition,
    pub stepper: Stepper,
    pub seed: u64,
    pub stream: u64,
    pub states: Vec<Partition>,
    /// Rejected coin-flip rounds of the deletion step, per step.
    pub w_rejections: Vec<u64>,
    /// Rejected proposals of the replacement step, per step.
    pub inf_rejections: Vec<u64>,
}

impl ChainTrace {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "partition"])?;
        for (i, s) in self.states.iter().enumerate() {
            w.write_record([i.to_string(), s.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn run_chain(
    start: &Partition,
    steps: usize,
    stepper: Stepper,
    rng: &mut RngStream,
) -> Result<ChainTrace> {
    stepper.validate()?;
    let mut states = Vec::with_capacity(steps + 1);
    let mut w_rejections = Vec::with_capacity(steps);
    let mut inf_rejections = Vec::with_capacity(steps);
    states.push(start.clone());
    let mut cur = start.clone();
    for _ in 0..steps {
        let (next, rw, ri) = stepper.step(&cur, rng)?;
        w_rejections.push(rw);
        inf_rejections.push(ri);
        states.push(next.clone());
        cur = next;
    }
    Ok(ChainTrace {
        start: start.clone(),
        stepper,
        seed: rng.seed(),
        stream: rng.stream(),
        states,
        w_rejections,
        inf_rejections,
    })
}
