//! Integer partitions and the machinery every other module indexes by.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num::bigint::BigInt;
use num::traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A weakly decreasing sequence of positive parts. The empty partition is legal.
///
/// Ordering is reverse-lexicographic, so for partitions of the same size
/// `(k)` sorts first and `(1^k)` last.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Builds a partition from parts in any order; zero parts are dropped.
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    /// Wraps parts that are already weakly decreasing and positive.
    pub fn from_sorted(parts: Vec<usize>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(parts.iter().all(|&p| p > 0));
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// The one-part partition `(k)`; empty for `k = 0`.
    pub fn row(k: usize) -> Self {
        Partition::new(vec![k])
    }

    /// `(1^k)`.
    pub fn column(k: usize) -> Self {
        Partition { parts: vec![1; k] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<usize> {
        self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of parts, `l(lambda)`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn largest(&self) -> usize {
        self.parts.first().copied().unwrap_or(0)
    }

    /// `a[i]` is the number of parts equal to `i`; `a[0]` is always zero.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut a = vec![0; self.largest() + 1];
        for &p in &self.parts {
            a[p] += 1;
        }
        a
    }

    /// Run-length form: `(part, multiplicity)` in decreasing part order.
    pub fn runs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &p in &self.parts {
            match out.last_mut() {
                Some((v, m)) if *v == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.largest();
        let mut out = Vec::with_capacity(cols);
        for j in 0..cols {
            out.push(self.parts.iter().take_while(|&&p| p > j).count());
        }
        Partition { parts: out }
    }

    /// Multiset union, re-sorted.
    pub fn union(&self, other: &Partition) -> Partition {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            if self.parts[i] >= other.parts[j] {
                out.push(self.parts[i]);
                i += 1;
            } else {
                out.push(other.parts[j]);
                j += 1;
            }
        }
        out.extend_from_slice(&self.parts[i..]);
        out.extend_from_slice(&other.parts[j..]);
        Partition { parts: out }
    }

    pub fn contains_multiset(&self, sub: &Partition) -> bool {
        self.difference(sub).is_ok()
    }

    /// Removes the parts of `sub` from `self`, failing if `sub` is not a sub-multiset.
    pub fn difference(&self, sub: &Partition) -> Result<Partition> {
        let mut out = Vec::with_capacity(self.len());
        let mut j = 0;
        for &p in &self.parts {
            if j < sub.parts.len() && sub.parts[j] == p {
                j += 1;
            } else if j < sub.parts.len() && sub.parts[j] > p {
                break;
            } else {
                out.push(p);
            }
        }
        if j == sub.parts.len() {
            Ok(Partition { parts: out })
        } else {
            Err(Error::NotSubMultiset(sub.clone(), self.clone()))
        }
    }

    /// Replaces the parts at positions `i < j` by their sum.
    pub fn merge_positions(&self, i: usize, j: usize) -> Partition {
        let mut parts: Vec<usize> = self
            .parts
            .iter()
            .enumerate()
            .filter(|&(pos, _)| pos != i && pos != j)
            .map(|(_, &p)| p)
            .collect();
        parts.push(self.parts[i] + self.parts[j]);
        Partition::new(parts)
    }

    /// Replaces the part at position `i` by `(m, parts[i] - m)`.
    pub fn split_position(&self, i: usize, m: usize) -> Partition {
        let a = self.parts[i];
        debug_assert!(m > 0 && m < a);
        let mut parts = self.parts.clone();
        parts[i] = a - m;
        parts.push(m);
        Partition::new(parts)
    }

    /// `n(lambda) = sum_i (i - 1) lambda_i`.
    pub fn n_statistic(&self) -> usize {
        self.parts.iter().enumerate().map(|(i, &p)| i * p).sum()
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        other.parts.cmp(&self.parts)
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "-");
        }
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Ok(Partition::empty());
        }
        let parts = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::ParsePartition(s.to_string()))?;
        if parts.iter().any(|&p| p == 0) {
            return Err(Error::ParsePartition(s.to_string()));
        }
        Ok(Partition::new(parts))
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All partitions of `k` in canonical order, with position lookup.
#[derive(Debug)]
pub struct PartitionIndex {
    k: usize,
    list: Vec<Partition>,
    position: HashMap<Partition, usize>,
}

impl PartitionIndex {
    pub fn new(k: usize) -> Self {
        let list = enumerate_partitions(k);
        let position = list
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        PartitionIndex { k, list, position }
    }

    pub fn shared(k: usize) -> Arc<Self> {
        Arc::new(Self::new(k))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn get(&self, i: usize) -> &Partition {
        &self.list[i]
    }

    pub fn position(&self, p: &Partition) -> Option<usize> {
        self.position.get(p).copied()
    }

    /// Position of `p`, failing with a size error when it is not a partition of `k`.
    pub fn require(&self, p: &Partition) -> Result<usize> {
        self.position(p)
            .ok_or_else(|| Error::SizeMismatch(p.clone(), p.size(), self.k))
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Partition> {
        self.list.iter()
    }

    pub fn as_slice(&self) -> &[Partition] {
        &self.list
    }
}

/// Every partition of `k`, each once, reverse-lexicographically ordered.
pub fn enumerate_partitions(k: usize) -> Vec<Partition> {
    fn rec(rest: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition::from_sorted(prefix.clone()));
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            prefix.push(p);
            rec(rest - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Partition numbers `p(0..=k)` by Euler's recurrence-free DP.
pub fn partition_counts(k: usize) -> Vec<u128> {
    let mut p = vec![0u128; k + 1];
    p[0] = 1;
    for part in 1..=k {
        for n in part..=k {
            p[n] += p[n - part];
        }
    }
    p
}

/// `z_lambda = prod_i i^{a_i} a_i!`, the centralizer order.
pub fn z_classical(lambda: &Partition) -> BigInt {
    let mut z = BigInt::one();
    for (part, mult) in lambda.runs() {
        for m in 1..=mult {
            z *= BigInt::from(part) * BigInt::from(m);
        }
    }
    z
}

pub fn ln_z_classical(lambda: &Partition) -> f64 {
    lambda
        .runs()
        .iter()
        .map(|&(part, mult)| mult as f64 * (part as f64).ln() + ln_factorial(mult))
        .sum()
}

pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Dominance comparison of partitions of the same size.
///
/// Returns `Some(Less)` when `mu` is strictly dominated by `lambda`, `None` if incomparable.
pub fn dominance_cmp(mu: &Partition, lambda: &Partition) -> Result<Option<Ordering>> {
    if mu.size() != lambda.size() {
        return Err(Error::SizeMismatch(mu.clone(), mu.size(), lambda.size()));
    }
    let n = mu.len().max(lambda.len());
    let (mut sm, mut sl) = (0usize, 0usize);
    let (mut below, mut above) = (false, false);
    for i in 0..n {
        sm += mu.parts.get(i).copied().unwrap_or(0);
        sl += lambda.parts.get(i).copied().unwrap_or(0);
        match sm.cmp(&sl) {
            Ordering::Less => below = true,
            Ordering::Greater => above = true,
            Ordering::Equal => {}
        }
    }
    Ok(match (below, above) {
        (false, false) => Some(Ordering::Equal),
        (true, false) => Some(Ordering::Less),
        (false, true) => Some(Ordering::Greater),
        (true, true) => None,
    })
}

/// `Some(true)` iff `mu <= lambda` in dominance order; `None` when incomparable.
pub fn dominance_leq(mu: &Partition, lambda: &Partition) -> Result<Option<bool>> {
    Ok(dominance_cmp(mu, lambda)?.map(|o| o != Ordering::Greater))
}

/// Arm and leg of the box in row `row`, column `col` (both 1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoxStat {
    pub row: usize,
    pub col: usize,
    pub arm: usize,
    pub leg: usize,
}

pub fn arm_leg(lambda: &Partition, row: usize, col: usize) -> Result<BoxStat> {
    let outside = || Error::BoxOutside {
        partition: lambda.clone(),
        row,
        col,
    };
    if row == 0 || col == 0 || row > lambda.len() || col > lambda.parts[row - 1] {
        return Err(outside());
    }
    let arm = lambda.parts[row - 1] - col;
    let col_len = lambda.parts.iter().take_while(|&&p| p >= col).count();
    Ok(BoxStat {
        row,
        col,
        arm,
        leg: col_len - row,
    })
}

/// Every box of the diagram with its arm and leg.
pub fn boxes(lambda: &Partition) -> Vec<BoxStat> {
    let conj = lambda.conjugate();
    let mut out = Vec::with_capacity(lambda.size());
    for (i, &len) in lambda.parts.iter().enumerate() {
        for j in 0..len {
            out.push(BoxStat {
                row: i + 1,
                col: j + 1,
                arm: len - j - 1,
                leg: conj.parts[j] - i - 1,
            });
        }
    }
    out
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Every sub-multiset of the parts of `lambda` with its count `prod_i C(a_i(lambda), a_i(sub))`.
pub fn sub_multisets(lambda: &Partition) -> Vec<(Partition, BigInt)> {
    let runs = lambda.runs();
    let mut out = vec![(Vec::new(), BigInt::one())];
    for &(part, mult) in &runs {
        let mut next = Vec::with_capacity(out.len() * (mult + 1));
        for (prefix, count) in &out {
            for take in 0..=mult {
                let mut parts: Vec<usize> = prefix.clone();
                parts.extend(std::iter::repeat(part).take(take));
                next.push((parts, count * binomial(mult, take)));
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|(parts, c)| (Partition::from_sorted(parts), c))
        .collect()
}
