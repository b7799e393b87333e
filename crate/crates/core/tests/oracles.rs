//! Brute-force oracles built from permutations and labeled coin flips, compared with the library.

use std::collections::HashMap;

use macdonald_chain::characters::mn_character;
use macdonald_chain::exact_chain::aux_matrix;
use macdonald_chain::measures::{class_law, pi_inf_t, pi_qt_on};
use macdonald_chain::partition::enumerate_partitions;
use macdonald_chain::Partition;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for slot in 0..n {
            let mut next = p.clone();
            next.insert(slot, n - 1);
            out.push(next);
        }
    }
    out
}

fn cycle_type(perm: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; perm.len()];
    let mut lens = Vec::new();
    for s in 0..perm.len() {
        let mut len = 0;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        if len > 0 {
            lens.push(len);
        }
    }
    lens.sort_unstable_by(|a, b| b.cmp(a));
    lens
}

fn sign(perm: &[usize]) -> i64 {
    let even = cycle_type(perm).iter().map(|c| c - 1).sum::<usize>() % 2 == 0;
    if even {
        1
    } else {
        -1
    }
}

/// Law of the cycle type of a uniform permutation, each permutation reweighted by the product of
/// `weight(m)` over its cycles.
fn weighted_cycle_law(k: usize, weight: impl Fn(usize) -> f64) -> HashMap<Vec<usize>, f64> {
    let mut law = HashMap::new();
    for p in permutations(k) {
        let ty = cycle_type(&p);
        let w: f64 = ty.iter().map(|&m| weight(m)).product();
        *law.entry(ty).or_insert(0.0) += w;
    }
    let total: f64 = law.values().sum();
    law.values_mut().for_each(|v| *v /= total);
    law
}

#[test]
fn class_law_counts_permutations() {
    for k in 1..=7 {
        let oracle = weighted_cycle_law(k, |_| 1.0);
        let lib = class_law::<f64>(k);
        for (lam, p) in lib.iter() {
            assert!((oracle[lam.parts()] - p).abs() < 1e-14, "k={k} {lam}");
        }
        assert_eq!(oracle.len(), lib.probs().len());
    }
}

#[test]
fn stationary_law_from_weighted_permutations() {
    let (q, t) = (4.0f64, 2.0f64);
    for k in 1..=7 {
        let oracle = weighted_cycle_law(k, |m| (t.powi(m as i32) - 1.0) / (q.powi(m as i32) - 1.0));
        let lib = pi_qt_on(macdonald_chain::PartitionIndex::shared(k), &q, &t).unwrap();
        for (lam, p) in lib.iter() {
            assert!((oracle[lam.parts()] - p).abs() < 1e-13, "k={k} {lam}");
        }
    }
}

/// Ways to send the parts of `rho`, in order, into bins with exactly the given fill.
fn fillings(rho: &[usize], fill: &mut [i64]) -> i64 {
    match rho.split_first() {
        None => fill.iter().all(|&f| f == 0) as i64,
        Some((&part, rest)) => {
            let mut total = 0;
            for j in 0..fill.len() {
                if fill[j] >= part as i64 {
                    fill[j] -= part as i64;
                    total += fillings(rest, fill);
                    fill[j] += part as i64;
                }
            }
            total
        }
    }
}

/// Coefficient of `x^(lambda + delta)` in the alternant times the power sum `p_rho`.
fn frobenius_character(lambda: &[usize], rho: &[usize]) -> i64 {
    let n = lambda.len();
    let target: Vec<i64> = (0..n).map(|j| (lambda[j] + n - 1 - j) as i64).collect();
    permutations(n)
        .iter()
        .map(|s| {
            let mut fill: Vec<i64> = (0..n).map(|j| target[j] - (n - 1 - s[j]) as i64).collect();
            if fill.iter().any(|&f| f < 0) {
                0
            } else {
                sign(s) * fillings(rho, &mut fill)
            }
        })
        .sum()
}

#[test]
fn characters_match_frobenius_formula() {
    for k in 1..=7 {
        let parts = enumerate_partitions(k);
        for lam in &parts {
            for rho in &parts {
                assert_eq!(mn_character(lam, rho).unwrap(), frobenius_character(lam.parts(), rho.parts()), "{lam} at {rho}");
            }
        }
    }
}

#[test]
fn replacement_law_from_rejected_permutations() {
    let t = 2.5f64;
    for r in 1..=7 {
        let oracle = weighted_cycle_law(r, |m| 1.0 - t.powi(-(m as i32)));
        let lib = pi_inf_t(r, &t).unwrap();
        for (lam, p) in lib.iter() {
            assert!((oracle[lam.parts()] - p).abs() < 1e-14, "r={r} {lam}");
        }
    }
}

/// One step of the chain written out from the sampler description: each labeled part is
/// discarded on a coin with heads probability `1 - q^{-size}`, conditioned on discarding
/// something, and the discarded mass is redrawn from the replacement law.
fn coin_flip_row(lambda: &[usize], q: f64, t: f64) -> HashMap<Vec<usize>, f64> {
    let n = lambda.len();
    let k: usize = lambda.iter().sum();
    let mut row = HashMap::new();
    let replacement: Vec<HashMap<Vec<usize>, f64>> =
        (0..=k).map(|r| if r == 0 { HashMap::from([(vec![], 1.0)]) } else { weighted_cycle_law(r, |m| 1.0 - t.powi(-(m as i32))) }).collect();
    for mask in 1u32..(1 << n) {
        let mut p = 1.0 / (1.0 - q.powi(-(k as i32)));
        let mut kept = Vec::new();
        let mut removed = 0;
        for (j, &part) in lambda.iter().enumerate() {
            let gone = 1.0 - q.powi(-(part as i32));
            if mask & (1 << j) != 0 {
                p *= gone;
                removed += part;
            } else {
                p *= 1.0 - gone;
                kept.push(part);
            }
        }
        for (mu, pm) in &replacement[removed] {
            let mut next: Vec<usize> = kept.iter().chain(mu.iter()).copied().collect();
            next.sort_unstable_by(|a, b| b.cmp(a));
            *row.entry(next).or_insert(0.0) += p * pm;
        }
    }
    row
}

#[test]
fn transition_matrix_matches_coin_flip_description() {
    for (q, t) in [(4.0, 2.0), (1.7, 3.2)] {
        for k in 1..=7 {
            let m = aux_matrix(k, &q, &t).unwrap();
            for (i, lam) in m.index().iter().enumerate() {
                let row = coin_flip_row(lam.parts(), q, t);
                for (j, nu) in m.index().iter().enumerate() {
                    let want = row.get(nu.parts()).copied().unwrap_or(0.0);
                    assert!((m.entry(i, j) - want).abs() < 1e-13, "k={k} {lam} -> {nu}");
                }
            }
        }
    }
}

#[test]
fn two_cycle_matrix_by_hand() {
    let m = aux_matrix(2, &4.0, &2.0).unwrap();
    let row = |p: &str| coin_flip_row(p.parse::<Partition>().unwrap().parts(), 4.0, 2.0);
    assert!((row("2")[&vec![2]] - 0.75).abs() < 1e-15);
    assert!((row("1,1")[&vec![2]] - 0.45).abs() < 1e-15);
    assert!((m.entry(1, 0) - 0.45).abs() < 1e-15);
}
