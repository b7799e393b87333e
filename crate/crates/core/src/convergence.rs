//! Distances to stationarity, spectral chi-square, explicit bounds and mixing times.

use num::traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_chain::TransitionMatrix;
use crate::measures::{Backend, Measure};
use crate::partition::{partition_counts, Partition};
use crate::rng::RngStream;
use crate::samplers::Stepper;
use crate::scalar::{abs, Field, Rational};
use crate::spectral::{beta, SpectralTable};

fn same_support<T: Field>(p: &Measure<T>, pi: &Measure<T>) -> Result<()> {
    if p.k() == pi.k() && p.probs().len() == pi.probs().len() {
        Ok(())
    } else {
        Err(Error::IndexMismatch(p.k(), pi.k()))
    }
}

/// `(1/2) sum |p - pi|`.
pub fn tv_distance<T: Field>(p: &Measure<T>, pi: &Measure<T>) -> Result<T> {
    same_support(p, pi)?;
    let s = p
        .probs()
        .iter()
        .zip(pi.probs())
        .fold(T::zero(), |acc, (a, b)| acc + abs(&(a.clone() - b.clone())));
    Ok(s / T::of(2))
}

/// `sum (p - pi)^2 / pi`.
pub fn chi2_distance<T: Field>(p: &Measure<T>, pi: &Measure<T>) -> Result<T> {
    same_support(p, pi)?;
    p.probs()
        .iter()
        .zip(pi.probs())
        .zip(pi.index().iter())
        .try_fold(T::zero(), |acc, ((a, b), lam)| {
            if b.is_zero() {
                return Err(Error::DivisionByZero(format!("stationary mass of {lam} is zero")));
            }
            let d = a.clone() - b.clone();
            Ok(acc + d.clone() * d / b.clone())
        })
}

/// `sum_{lambda != (k)} fbar_lambda(start)^2 beta_lambda^{2 steps}`.
pub fn chi2_spectral(table: &SpectralTable, start: &Partition, steps: usize) -> Result<Rational> {
    let rho = table.index.require(start)?;
    Ok(table
        .rows
        .iter()
        .enumerate()
        .skip(1)
        .fold(Rational::zero(), |acc, (l, row)| {
            acc + table.fbar_sq(l, rho) * row.beta.powi(2 * steps)
        }))
}

#[derive(Clone, Debug, Serialize)]
pub struct ChiSquareUpperBound {
    pub coefficient: f64,
    pub base: f64,
    pub first: f64,
    pub second: f64,
    pub total: f64,
}

/// Upper bound on the chi-square distance after `steps` moves from `(k)`:
/// `(1-1/q)^{-3/2} (1-q^{-2})^{-2} (1/q + 1/(t q^{k/2}))^{2l} + k t/(t-1) (2/q^{k/4})^{2l}`.
pub fn chi2_upper_bound(k: usize, q: f64, t: f64, steps: usize) -> Result<ChiSquareUpperBound> {
    if k < 4 || steps < 2 || q <= 1.0 || t <= 1.0 {
        return Err(Error::Domain(format!(
            "need k >= 4, steps >= 2, q, t > 1; got k={k}, steps={steps}, q={q}, t={t}"
        )));
    }
    let kf = k as f64;
    let e = 2.0 * steps as f64;
    let coefficient = (1.0 - 1.0 / q).powf(-1.5) * (1.0 - q.powi(-2)).powi(-2);
    let base = 1.0 / q + 1.0 / (t * q.powf(kf / 2.0));
    let first = coefficient * base.powf(e);
    let second = kf * t / (t - 1.0) * (2.0 / q.powf(kf / 4.0)).powf(e);
    Ok(ChiSquareUpperBound {
        coefficient,
        base,
        first,
        second,
        total: first + second,
    })
}

/// `((1-1/q)/(1-1/t)) k^2 / q^{2l}`, the lead-term chi-square lower bound from `(1^k)` with no constant.
pub fn chi2_lower_bound_1k(k: usize, q: f64, t: f64, steps: usize) -> f64 {
    (1.0 - 1.0 / q) / (1.0 - 1.0 / t) * (k * k) as f64 / q.powf(2.0 * steps as f64)
}

/// Exact closed form of `fbar_{(k-1,1)}(1^k)^2`.
pub fn fbar_sq_two_row_at_column<T: Field>(k: usize, q: &T, t: &T) -> T {
    let one = T::one();
    let ti = t.powi_neg(1);
    let qn = |n: usize| q.powi_neg(n);
    let mut p = T::zero();
    for j in 1..k {
        let num = (one.clone() - q.powi(j - 1) * t.clone() * t.clone()) / (one.clone() - q.powi(j) * t.clone());
        let den = (one.clone() - q.powi(j - 1) * t.clone()) / (one.clone() - q.powi(j));
        p = p + num / den;
    }
    let a = (one.clone() - ti.clone() * qn(k - 2)) * (one.clone() - ti.clone() * qn(k - 1))
        / ((one.clone() - qn(k - 1)) * (one.clone() - qn(k)));
    let b = (one.clone() - qn(1)) * (one.clone() - ti.clone() * qn(k - 1))
        / ((one.clone() - ti.clone()) * (one.clone() - ti.clone() * ti * qn(k - 2)));
    a * b * p.clone() * p
}

/// The single `(k-1,1)` term of the chi-square expansion from `(1^k)`, a rigorous lower bound.
pub fn chi2_lead_term_1k(k: usize, q: f64, t: f64, steps: usize) -> f64 {
    let b = beta(&Partition::new(vec![k - 1, 1]), &q, &t);
    fbar_sq_two_row_at_column(k, &q, &t) * b.powi(2 * steps as i32)
}

#[derive(Clone, Debug, Serialize)]
pub struct TvLowerBound {
    pub theta: f64,
    pub value: f64,
    /// The bound drops an `o(1)` term and only holds for large `k`.
    pub asymptotic: bool,
}

/// Total-variation lower bound `e^{-(t-1)/(q-1)} - e^{-q^{-theta}}` from `(1^k)` at `l = log_q k + theta`.
pub fn tv_lower_bound_1k(q: f64, t: f64, theta: f64) -> TvLowerBound {
    TvLowerBound {
        theta,
        value: (-(t - 1.0) / (q - 1.0)).exp() - (-q.powf(-theta)).exp(),
        asymptotic: true,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub k: usize,
    pub q: f64,
    pub t: f64,
    pub steps: usize,
    pub chi2_upper: Option<ChiSquareUpperBound>,
    pub chi2_lower: f64,
    pub lead_term: f64,
    pub tv_lower: TvLowerBound,
}

pub fn bound_report(k: usize, q: f64, t: f64, steps: usize, theta: f64) -> BoundReport {
    BoundReport {
        k,
        q,
        t,
        steps,
        chi2_upper: chi2_upper_bound(k, q, t, steps).ok(),
        chi2_lower: chi2_lower_bound_1k(k, q, t, steps),
        lead_term: if k >= 2 { chi2_lead_term_1k(k, q, t, steps) } else { 0.0 },
        tv_lower: tv_lower_bound_1k(q, t, theta),
    }
}

/// `P_j = prod_{i=1}^{j-1} (1 - t^{-1} q^{-i}) / (1 - q^{-i})` for `j = 1..=k`.
pub fn pk_sequence<T: Field>(k: usize, q: &T, t: &T) -> Vec<T> {
    let mut out = Vec::with_capacity(k);
    let mut acc = T::one();
    for j in 1..=k {
        if j > 1 {
            let qi = q.powi_neg(j - 1);
            acc = acc * (T::one() - t.powi_neg(1) * qi.clone()) / (T::one() - qi);
        }
        out.push(acc.clone());
    }
    out
}

/// `eta_i (q/t)^i = (1 - t^{-i}) / (1 - q^{-i})`; the factor `(q/t)^k` is common to
/// every partition of `k`, so these weights give the same law with terms of order one.
fn balanced_eta(k: usize, q: f64, t: f64) -> Vec<f64> {
    (0..=k)
        .map(|i| {
            if i == 0 {
                0.0
            } else {
                -(-(i as f64) * t.ln()).exp_m1() / -(-(i as f64) * q.ln()).exp_m1()
            }
        })
        .collect()
}

/// `pi_{q,t}(a_1 = 0)` from the coefficients of `exp(sum_i eta_i x^i / i)`.
pub fn prob_no_singletons(k: usize, q: f64, t: f64) -> f64 {
    let eta = balanced_eta(k, q, t);
    let series = |skip_one: bool| {
        let mut c = vec![0.0; k + 1];
        c[0] = 1.0;
        for n in 1..=k {
            let s: f64 = (1..=n)
                .filter(|&j| !(skip_one && j == 1))
                .map(|j| eta[j] * c[n - j])
                .sum();
            c[n] = s / n as f64;
        }
        c[k]
    };
    series(true) / series(false)
}

/// Exact `E[a_1]` under `pi_{q,t}`, from the same series: `eta_1 c_{k-1} / c_k`.
pub fn mean_singletons(k: usize, q: f64, t: f64) -> f64 {
    let eta = balanced_eta(k, q, t);
    let mut c = vec![0.0; k + 1];
    c[0] = 1.0;
    for n in 1..=k {
        c[n] = (1..=n).map(|j| eta[j] * c[n - j]).sum::<f64>() / n as f64;
    }
    eta[1] * c[k - 1] / c[k]
}

/// Law of the number of parts under `pi_{q,t}`: entry `j` is `pi(l(lambda) = j)`.
///
/// Uses `n c_n(y) = y sum_i eta_i c_{n-i}(y)` for the coefficients of `exp(y sum_i eta_i x^i / i)`.
pub fn parts_count_law(k: usize, q: f64, t: f64) -> Vec<f64> {
    let eta = balanced_eta(k, q, t);
    let mut c: Vec<Vec<f64>> = vec![vec![1.0]];
    for n in 1..=k {
        let mut row = vec![0.0; n + 1];
        for i in 1..=n {
            for (j, v) in c[n - i].iter().enumerate() {
                row[j + 1] += eta[i] * v;
            }
        }
        row.iter_mut().for_each(|v| *v /= n as f64);
        c.push(row);
    }
    let total: f64 = c[k].iter().sum();
    c[k].iter().map(|v| v / total).collect()
}

/// Runs `chains` independent copies of the auxiliary chain for `steps` moves from `start`.
fn aux_endpoints(start: &Partition, q: f64, t: f64, steps: usize, chains: usize, seed: u64) -> Result<Vec<Partition>> {
    let stepper = Stepper::Aux { q, t };
    stepper.validate()?;
    (0..chains as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = RngStream::new(seed, s);
            let mut cur = start.clone();
            for _ in 0..steps {
                cur = stepper.step(&cur, &mut rng)?.0;
            }
            Ok(cur)
        })
        .collect()
}

/// Estimates `P_l(a_1 > 0) - pi(a_1 > 0)` from `(1^k)`, a lower bound on the TV distance,
/// with its standard error.
pub fn singleton_tv_lower_bound(
    k: usize,
    q: f64,
    t: f64,
    steps: usize,
    chains: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let ends = aux_endpoints(&Partition::column(k), q, t, steps, chains, seed)?;
    let hits = ends.iter().filter(|l| l.parts().last() == Some(&1)).count();
    let phat = hits as f64 / chains as f64;
    let pi_pos = 1.0 - prob_no_singletons(k, q, t);
    Ok((phat - pi_pos, (phat * (1.0 - phat) / chains as f64).sqrt()))
}

/// Empirical TV of the number of parts after `steps` moves from `start`, against its exact
/// stationary law. Projecting can only shrink TV, so this estimates a lower bound on the full TV.
pub fn parts_count_tv(start: &Partition, q: f64, t: f64, steps: usize, chains: usize, seed: u64) -> Result<EmpiricalTv> {
    let k = start.size();
    let law = parts_count_law(k, q, t);
    let ends = aux_endpoints(start, q, t, steps, chains, seed)?;
    let mut counts = vec![0usize; k + 1];
    for l in &ends {
        counts[l.len()] += 1;
    }
    let n = chains as f64;
    let tv = counts
        .iter()
        .zip(&law)
        .map(|(c, p)| (*c as f64 / n - p).abs())
        .sum::<f64>()
        / 2.0;
    let bins = law.iter().filter(|p| **p > 1e-12).count() as f64;
    Ok(EmpiricalTv {
        tv,
        mc_error: 0.5 * (bins / (2.0 * std::f64::consts::PI * n)).sqrt(),
        binned: true,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactMatrix,
    Spectral,
    Empirical,
    RowCollapse,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceReport {
    pub start: Partition,
    pub steps: usize,
    pub tv: f64,
    pub chi2: Option<f64>,
    pub backend: Backend,
    pub method: Method,
    /// Monte Carlo standard error, empirical method only.
    pub mc_error: Option<f64>,
    /// True when the empirical TV is computed on coarsened bins and so only bounds the true TV from below.
    pub binned: bool,
}

/// Distances after `0..=max_steps` moves along a materialized chain.
pub fn distance_profile<T: Field>(
    m: &TransitionMatrix<T>,
    pi: &Measure<T>,
    start: &Partition,
    max_steps: usize,
) -> Result<Vec<DistanceReport>> {
    let mut v = Measure::point_mass(m.index().clone(), start)?;
    let mut out = Vec::with_capacity(max_steps + 1);
    for steps in 0..=max_steps {
        if steps > 0 {
            v = Measure::new(m.index().clone(), m.step_left(v.probs()))?;
        }
        out.push(DistanceReport {
            start: start.clone(),
            steps,
            tv: tv_distance(&v, pi)?.to_f64_lossy(),
            chi2: Some(chi2_distance(&v, pi)?.to_f64_lossy()),
            backend: pi.backend(),
            method: Method::ExactMatrix,
            mc_error: None,
            binned: false,
        });
    }
    Ok(out)
}

/// Where the distribution after `l` steps comes from.
pub enum MixingSource<'a> {
    Matrix(&'a TransitionMatrix<f64>),
    Sampler { stepper: Stepper, chains: usize, seed: u64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct MixingReport {
    pub steps: usize,
    pub tv: f64,
    pub method: Method,
    pub mc_error: Option<f64>,
    pub binned: bool,
}

/// Smallest `l` with `TV(law after l steps, pi) < eps`, searching up to `cap`.
pub fn mixing_time(
    source: MixingSource<'_>,
    start: &Partition,
    eps: f64,
    pi: &Measure<f64>,
    cap: usize,
) -> Result<MixingReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("threshold must lie in (0,1), got {eps}")));
    }
    match source {
        MixingSource::Matrix(m) => {
            let mut v = Measure::point_mass(m.index().clone(), start)?;
            for steps in 0..=cap {
                if steps > 0 {
                    v = Measure::new(m.index().clone(), m.step_left(v.probs()))?;
                }
                let tv = tv_distance(&v, pi)?;
                if tv < eps {
                    return Ok(MixingReport { steps, tv, method: Method::ExactMatrix, mc_error: None, binned: false });
                }
            }
            Err(Error::IterationCap(cap))
        }
        MixingSource::Sampler { stepper, chains, seed } => {
            stepper.validate()?;
            let mut states: Vec<Partition> = vec![start.clone(); chains];
            let mut rngs: Vec<RngStream> = (0..chains as u64).map(|s| RngStream::new(seed, s)).collect();
            for steps in 0..=cap {
                if steps > 0 {
                    states
                        .par_iter_mut()
                        .zip(rngs.par_iter_mut())
                        .try_for_each(|(s, r)| -> Result<()> {
                            *s = stepper.step(s, r)?.0;
                            Ok(())
                        })?;
                }
                let est = empirical_tv(&states, pi)?;
                if est.tv < eps {
                    return Ok(MixingReport {
                        steps,
                        tv: est.tv,
                        method: Method::Empirical,
                        mc_error: Some(est.mc_error),
                        binned: est.binned,
                    });
                }
            }
            Err(Error::IterationCap(cap))
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EmpiricalTv {
    pub tv: f64,
    /// Rough standard error: `sqrt(bins / (2 pi N))` scaled by half.
    pub mc_error: f64,
    pub binned: bool,
}

/// Partitions get their own bin when `p(k) <= 10^4`; beyond that they are
/// grouped by (largest part, number of parts).
pub fn bin_key(lambda: &Partition, full: bool) -> Partition {
    if full {
        lambda.clone()
    } else {
        Partition::new(vec![lambda.largest(), lambda.len()])
    }
}

/// TV between the empirical law of `samples` and `pi`, binned as in [`bin_key`].
pub fn empirical_tv(samples: &[Partition], pi: &Measure<f64>) -> Result<EmpiricalTv> {
    use std::collections::HashMap;
    let k = pi.k();
    let full = partition_counts(k)[k] <= 10_000;
    let mut target: HashMap<Partition, f64> = HashMap::new();
    for (lam, p) in pi.iter() {
        *target.entry(bin_key(lam, full)).or_default() += *p;
    }
    let mut counts: HashMap<Partition, usize> = HashMap::new();
    for s in samples {
        if s.size() != k {
            return Err(Error::SizeMismatch(s.clone(), s.size(), k));
        }
        *counts.entry(bin_key(s, full)).or_default() += 1;
    }
    let n = samples.len() as f64;
    let mut tv = 0.0;
    for (b, p) in &target {
        let c = counts.get(b).copied().unwrap_or(0) as f64 / n;
        tv += (c - p).abs();
    }
    let bins = target.len() as f64;
    Ok(EmpiricalTv {
        tv: tv / 2.0,
        mc_error: 0.5 * (bins / (2.0 * std::f64::consts::PI * n)).sqrt(),
        binned: !full,
    })
}
