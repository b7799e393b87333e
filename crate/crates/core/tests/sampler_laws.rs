//! Statistical checks of the samplers against their exact laws.

use std::collections::HashMap;

use macdonald_chain::convergence::{mean_singletons, prob_no_singletons};
use macdonald_chain::measures::{class_law, pi_ewens, pi_inf_t_float, pi_qt_float, Measure};
use macdonald_chain::rng::RngStream;
use macdonald_chain::samplers::{aux_step, chinese_restaurant, sample_pi_inf_t, sample_w, stick_breaking};
use macdonald_chain::{Partition, PartitionIndex};
use rayon::prelude::*;

const CHUNK: usize = 10_000;

fn tally<F>(draws: usize, seed: u64, draw: F) -> HashMap<Partition, usize>
where
    F: Fn(&mut RngStream) -> Partition + Sync,
{
    (0..(draws / CHUNK) as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = RngStream::new(seed, s);
            let mut counts = HashMap::new();
            for _ in 0..CHUNK {
                *counts.entry(draw(&mut rng)).or_insert(0usize) += 1;
            }
            counts
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        })
}

fn tv_and_envelope(counts: &HashMap<Partition, usize>, target: &Measure<f64>) -> (f64, f64) {
    let n = counts.values().sum::<usize>() as f64;
    let mut tv = 0.0;
    let mut seen = 0;
    for (lam, p) in target.iter() {
        let c = counts.get(lam).copied().unwrap_or(0);
        seen += c;
        tv += (c as f64 / n - p).abs();
    }
    tv += (n - seen as f64) / n;
    let worst = target.probs().iter().fold(0.0f64, |m, p| m.max((p / n).sqrt()));
    (tv / 2.0, 4.0 * worst + 0.003)
}

fn draw_from(m: &Measure<f64>, rng: &mut RngStream) -> Partition {
    let u = rng.uniform();
    let mut acc = 0.0;
    for (lam, p) in m.iter() {
        acc += p;
        if u < acc {
            return lam.clone();
        }
    }
    m.index().get(m.index().len() - 1).clone()
}

#[test]
fn samplers_within_concentration_envelope() {
    let n = 1_000_000;
    for k in [5, 10] {
        let index = PartitionIndex::shared(k);
        let cases: Vec<(&str, Measure<f64>, HashMap<Partition, usize>)> = vec![
            ("stick-breaking", class_law(k), tally(n, 1, |r| stick_breaking(k, r))),
            ("restaurant", pi_ewens(k, &(1.0 / 0.7)).unwrap(), tally(n, 2, |r| chinese_restaurant(k, 0.7, r))),
            (
                "replacement",
                pi_inf_t_float(index.clone(), 1.5).unwrap(),
                tally(n, 3, |r| sample_pi_inf_t(k, 1.5, r).unwrap().mu),
            ),
        ];
        for (name, target, counts) in cases {
            let (tv, env) = tv_and_envelope(&counts, &target);
            assert!(tv < env, "{name} k={k}: {tv} >= {env}");
        }
    }
}

#[test]
fn aux_step_preserves_stationary_law() {
    let (k, q, t) = (8, 4.0, 2.0);
    let pi = pi_qt_float(PartitionIndex::shared(k), q, t).unwrap();
    let n = 10_000_000;
    let counts = tally(n, 4, |r| {
        let start = draw_from(&pi, r);
        aux_step(&start, q, t, r).unwrap().next
    });
    for (lam, p) in pi.iter() {
        let c = counts.get(lam).copied().unwrap_or(0) as f64;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((c - n as f64 * p).abs() <= 3.0 * sigma, "{lam}: {c} vs {}", n as f64 * p);
    }
}

#[test]
fn deletion_retries_are_geometric() {
    let lambda: Partition = "3,2,2,1,1,1".parse().unwrap();
    let q = 1.15f64;
    let success = 1.0 - q.powi(-(lambda.size() as i32));
    let n = 200_000u64;
    let mut bins = [0u64; 4];
    let mut rng = RngStream::new(5, 0);
    for _ in 0..n {
        let a = sample_w(&lambda, q, &mut rng).unwrap().attempts as usize;
        bins[a.min(4) - 1] += 1;
    }
    let fail = 1.0 - success;
    let probs = [success, fail * success, fail * fail * success, fail * fail * fail];
    let stat: f64 = bins
        .iter()
        .zip(probs)
        .map(|(&o, p)| {
            let e = n as f64 * p;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    // 99th percentile of chi-square with 3 degrees of freedom
    assert!(stat < 11.345, "chi-square {stat}, bins {bins:?}");
}

fn singleton_sample(chains: usize) -> Vec<f64> {
    let (k, q, t) = (100, 4.0, 2.0);
    (0..chains as u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = RngStream::new(6, s);
            let mut cur = Partition::row(k);
            for _ in 0..20 {
                cur = aux_step(&cur, q, t, &mut rng).unwrap().next;
            }
            cur.parts().iter().filter(|&&p| p == 1).count() as f64
        })
        .collect()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn singleton_count_matches_exact_mean_at_hundred() {
    let (mean, se) = mean_and_se(&singleton_sample(40_000));
    let exact = mean_singletons(100, 4.0, 2.0);
    assert!((mean - exact).abs() <= 3.0 * se, "{mean} +- {se} vs exact {exact}");
    let xs = singleton_sample(40_000);
    let zero = xs.iter().filter(|&&x| x == 0.0).count() as f64 / xs.len() as f64;
    let want = prob_no_singletons(100, 4.0, 2.0);
    assert!((zero - want).abs() <= 3.0 * (want * (1.0 - want) / xs.len() as f64).sqrt());
}

#[test]
fn singleton_count_mean_is_one_third_at_hundred() {
    let (mean, se) = mean_and_se(&singleton_sample(40_000));
    let claimed = (2.0 - 1.0) / (4.0 - 1.0);
    assert!((mean - claimed).abs() <= 3.0 * se, "{mean} +- {se} vs {claimed}");
}
