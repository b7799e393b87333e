//! Probability measures on partitions of `k`.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::partition::{ln_z_classical, z_classical, Partition, PartitionIndex};
use crate::scalar::{pochhammer, require_gt_one, Field, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

/// A probability vector over the canonically ordered partitions of `k`.
#[derive(Clone, Debug)]
pub struct Measure<T> {
    index: Arc<PartitionIndex>,
    probs: Vec<T>,
}

impl<T: Field> Measure<T> {
    pub fn new(index: Arc<PartitionIndex>, probs: Vec<T>) -> Result<Self> {
        if probs.len() != index.len() {
            return Err(Error::IndexMismatch(probs.len(), index.len()));
        }
        Ok(Measure { index, probs })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(index: Arc<PartitionIndex>, weights: Vec<T>) -> Result<Self> {
        let total = weights.iter().fold(T::zero(), |acc, w| acc + w.clone());
        if total.is_zero() {
            return Err(Error::DivisionByZero("weights sum to zero".into()));
        }
        let probs = weights.into_iter().map(|w| w / total.clone()).collect();
        Measure::new(index, probs)
    }

    pub fn point_mass(index: Arc<PartitionIndex>, at: &Partition) -> Result<Self> {
        let pos = index.require(at)?;
        let mut probs = vec![T::zero(); index.len()];
        probs[pos] = T::one();
        Measure::new(index, probs)
    }

    pub fn index(&self) -> &Arc<PartitionIndex> {
        &self.index
    }

    pub fn k(&self) -> usize {
        self.index.k()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<T> {
        self.probs
    }

    pub fn get(&self, lambda: &Partition) -> Option<&T> {
        self.index.position(lambda).map(|i| &self.probs[i])
    }

    pub fn total(&self) -> T {
        self.probs.iter().fold(T::zero(), |acc, p| acc + p.clone())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Partition, &T)> {
        self.index.iter().zip(self.probs.iter())
    }

    pub fn to_f64(&self) -> Measure<f64> {
        Measure {
            index: self.index.clone(),
            probs: self.probs.iter().map(|p| p.to_f64_lossy()).collect(),
        }
    }

    pub fn backend(&self) -> Backend {
        if self.probs.first().and_then(|p| p.fraction()).is_some() {
            Backend::Exact
        } else {
            Backend::Float
        }
    }

    /// CSV rows `partition,decimal,fraction`; the fraction column is empty in float mode.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["partition", "probability", "fraction"])?;
        for (lam, p) in self.iter() {
            w.write_record([
                lam.to_string(),
                format!("{:.6}", p.to_f64_lossy()),
                p.fraction().unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .iter()
            .map(|(lam, p)| {
                serde_json::json!({
                    "partition": lam.to_string(),
                    "probability": p.to_f64_lossy(),
                    "fraction": p.fraction(),
                })
            })
            .collect();
        serde_json::json!({
            "k": self.k(),
            "backend": self.backend(),
            "entries": entries,
        })
    }
}

/// `z_lambda(q,t) = z_lambda prod_i (1 - q^{lambda_i}) / (1 - t^{lambda_i})`.
pub fn z_qt<T: Field>(lambda: &Partition, q: &T, t: &T) -> Result<T> {
    let mut acc = T::of(1);
    for &part in lambda.parts() {
        let den = T::one() - t.powi(part);
        if den.is_zero() {
            return Err(Error::DivisionByZero(format!(
                "1 - t^{part} vanishes for {lambda}"
            )));
        }
        acc = acc * (T::one() - q.powi(part)) / den;
    }
    Ok(acc * z_classical_as::<T>(lambda))
}

fn z_classical_as<T: Field>(lambda: &Partition) -> T {
    let mut acc = T::one();
    for (part, mult) in lambda.runs() {
        for m in 1..=mult {
            acc = acc * T::of(part * m);
        }
    }
    acc
}

/// `1/z_lambda` over partitions of `k`: the cycle-type law of a uniform permutation.
pub fn class_law<T: Field>(k: usize) -> Measure<T> {
    let index = PartitionIndex::shared(k);
    let probs = index
        .iter()
        .map(|lam| T::one() / z_classical_as::<T>(lam))
        .collect();
    Measure { index, probs }
}

/// `pi_{q,t}(lambda) = Z / z_lambda(q,t)` with `Z = (q,q)_k / (t,q)_k`, in exact arithmetic.
pub fn pi_qt_table(k: usize, q: &Rational, t: &Rational) -> Result<Measure<Rational>> {
    pi_qt_on(PartitionIndex::shared(k), q, t)
}

pub fn pi_qt_on<T: Field>(index: Arc<PartitionIndex>, q: &T, t: &T) -> Result<Measure<T>> {
    require_gt_one("q", q)?;
    require_gt_one("t", t)?;
    let k = index.k();
    let z = pochhammer(q, q, k) / pochhammer(t, q, k);
    let probs = index
        .as_slice()
        .par_iter()
        .map(|lam| z_qt(lam, q, t).map(|w| z.clone() / w))
        .collect::<Result<Vec<T>>>()?;
    Measure::new(index, probs)
}

/// `ln (x^m - 1)` for `x > 1`, accurate for large `m`.
pub fn ln_pow_minus_one(ln_x: f64, m: usize) -> f64 {
    ln_exp_minus_one(m as f64 * ln_x)
}

/// `ln (e^x - 1)` for `x > 0`.
pub fn ln_exp_minus_one(x: f64) -> f64 {
    x + (-(-x).exp()).ln_1p()
}

/// `ln eta_i` for the weights `eta_i = (t^i - 1)/(q^i - 1)`.
pub fn ln_eta_qt(i: usize, ln_q: f64, ln_t: f64) -> f64 {
    ln_pow_minus_one(ln_t, i) - ln_pow_minus_one(ln_q, i)
}

/// Float `pi_{q,t}` evaluated in the log domain, usable for `k` in the hundreds.
pub fn pi_qt_float(index: Arc<PartitionIndex>, q: f64, t: f64) -> Result<Measure<f64>> {
    require_gt_one("q", &q)?;
    require_gt_one("t", &t)?;
    let k = index.k();
    let (lq, lt) = (q.ln(), t.ln());
    // (q,q)_k / (t,q)_k = prod_{i<k} (q^{i+1} - 1) / (t q^i - 1)
    let ln_z: f64 = (0..k)
        .map(|i| ln_pow_minus_one(lq, i + 1) - ln_exp_minus_one(lt + i as f64 * lq))
        .sum();
    let probs = index
        .as_slice()
        .par_iter()
        .map(|lam| {
            let ln_w: f64 = lam
                .parts()
                .iter()
                .map(|&p| ln_eta_qt(p, lq, lt))
                .sum::<f64>()
                - ln_z_classical(lam);
            (ln_z + ln_w).exp()
        })
        .collect();
    Measure::new(index, probs)
}

/// Ewens measure `pi_alpha(lambda) = Z alpha^{-l(lambda)} / z_lambda`,
/// `Z = alpha^k k! / prod_{i=1}^{k-1} (i alpha + 1)`.
pub fn pi_ewens<T: Field>(k: usize, alpha: &T) -> Result<Measure<T>> {
    if *alpha <= T::zero() {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha:?}")));
    }
    let mut z = alpha.powi(k);
    for i in 1..=k {
        z = z * T::of(i);
    }
    for i in 1..k {
        z = z / (T::of(i) * alpha.clone() + T::one());
    }
    let index = PartitionIndex::shared(k);
    let probs = index
        .iter()
        .map(|lam| z.clone() / (alpha.powi(lam.len()) * z_classical_as::<T>(lam)))
        .collect();
    Measure::new(index, probs)
}

/// `pi_eta(lambda) proportional to prod_i eta_i^{a_i} / z_lambda`; `eta[i-1]` is `eta_i`.
pub fn pi_multiplicative<T: Field>(k: usize, eta: &[T]) -> Result<Measure<T>> {
    if eta.len() < k {
        return Err(Error::Domain(format!(
            "need {k} weights, got {}",
            eta.len()
        )));
    }
    if let Some(bad) = eta[..k].iter().find(|e| **e <= T::zero()) {
        return Err(Error::Domain(format!("weights must be positive, got {bad:?}")));
    }
    let index = PartitionIndex::shared(k);
    let weights = index
        .iter()
        .map(|lam| {
            lam.parts()
                .iter()
                .fold(T::one(), |acc, &p| acc * eta[p - 1].clone())
                / z_classical_as::<T>(lam)
        })
        .collect();
    Measure::from_weights(index, weights)
}

/// `eta_i = (t^i - 1)/(q^i - 1)` for `i = 1..=k`.
pub fn eta_qt<T: Field>(k: usize, q: &T, t: &T) -> Vec<T> {
    (1..=k)
        .map(|i| (t.powi(i) - T::one()) / (q.powi(i) - T::one()))
        .collect()
}

/// `pi_{inf,t}(mu) = t/(t-1) (1/z_mu) prod_i (1 - t^{-mu_i})`.
pub fn pi_inf_t<T: Field>(r: usize, t: &T) -> Result<Measure<T>> {
    pi_inf_t_on(PartitionIndex::shared(r), t)
}

pub fn pi_inf_t_on<T: Field>(index: Arc<PartitionIndex>, t: &T) -> Result<Measure<T>> {
    require_gt_one("t", t)?;
    let lead = t.clone() / (t.clone() - T::one());
    let probs = index
        .as_slice()
        .par_iter()
        .map(|mu| {
            mu.parts().iter().fold(lead.clone(), |acc, &m| {
                acc * (T::one() - t.powi_neg(m))
            }) / z_classical_as::<T>(mu)
        })
        .collect();
    Measure::new(index, probs)
}

pub fn pi_inf_t_float(index: Arc<PartitionIndex>, t: f64) -> Result<Measure<f64>> {
    require_gt_one("t", &t)?;
    let lt = t.ln();
    let lead = (t / (t - 1.0)).ln();
    let probs = index
        .as_slice()
        .par_iter()
        .map(|mu| {
            let s: f64 = mu
                .parts()
                .iter()
                .map(|&m| (-(-(m as f64) * lt).exp()).ln_1p())
                .sum();
            (lead + s - ln_z_classical(mu)).exp()
        })
        .collect();
    Measure::new(index, probs)
}

/// Probability that the part-deletion step keeps exactly the sub-multiset `kept` of `lambda`.
pub fn w_given<T: Field>(lambda: &Partition, kept: &Partition, q: &T) -> Result<T> {
    let removed = lambda.difference(kept)?;
    if removed.is_empty() {
        return Err(Error::Domain(format!(
            "at least one part of {lambda} must be removed"
        )));
    }
    let a = lambda.multiplicities();
    let b = kept.multiplicities();
    let mut w = T::one();
    for (i, &ai) in a.iter().enumerate().skip(1) {
        let bi = b.get(i).copied().unwrap_or(0);
        w = w * binomial_as::<T>(ai, bi) * (q.powi(i) - T::one()).powi(ai - bi);
    }
    Ok(w / (q.powi(lambda.size()) - T::one()))
}

fn binomial_as<T: Field>(n: usize, k: usize) -> T {
    let mut acc = T::one();
    for i in 0..k {
        acc = acc * T::of(n - i) / T::of(i + 1);
    }
    acc
}

/// `z_lambda` as an exact rational.
pub fn z_classical_rational(lambda: &Partition) -> Rational {
    Rational::from_integer(z_classical(lambda))
}
