//! Exact algebraic invariants of the measures, the transition matrices and the spectrum.

use macdonald_chain::exact_chain::{aux_matrix, metropolis_matrix, stationarity_residual};
use macdonald_chain::measures::{pi_inf_t, pi_qt_on, pi_qt_table, w_given};
use macdonald_chain::partition::{enumerate_partitions, sub_multisets};
use macdonald_chain::rng::RngStream;
use macdonald_chain::scalar::{int, pochhammer, rat, Field};
use macdonald_chain::spectral::{beta, eigen_table, fbar_sq_at_row};
use macdonald_chain::{Partition, PartitionIndex, Rational};
use num::traits::{One, Zero};

fn random_pairs(seed: u64, n: usize) -> Vec<(Rational, Rational)> {
    let mut rng = RngStream::new(seed, 0);
    (0..n)
        .map(|_| {
            let q = int(1) + rat(rng.uniform_int(1, 40) as i64, rng.uniform_int(1, 40) as i64);
            let t = int(1) + rat(rng.uniform_int(1, 40) as i64, rng.uniform_int(1, 40) as i64);
            (q, t)
        })
        .collect()
}

#[test]
fn stationary_law_normalized_up_to_twenty() {
    for (q, t) in random_pairs(31, 5) {
        for k in [13, 16, 20] {
            assert!(pi_qt_table(k, &q, &t).unwrap().total().is_one(), "k={k} q={q} t={t}");
        }
    }
}

#[test]
fn replacement_law_normalized_up_to_twenty() {
    for t in [rat(3, 2), int(2), rat(17, 3)] {
        for r in 1..=20 {
            assert!(pi_inf_t(r, &t).unwrap().total().is_one(), "r={r}");
        }
    }
}

#[test]
fn deletion_law_sums_to_one_up_to_twelve() {
    let q = rat(5, 3);
    for k in 1..=12 {
        for lam in enumerate_partitions(k) {
            let total = sub_multisets(&lam)
                .into_iter()
                .filter(|(kept, _)| kept.size() < k)
                .fold(int(0), |acc, (kept, _)| acc + w_given(&lam, &kept, &q).unwrap());
            assert!(total.is_one(), "{lam}");
        }
    }
}

#[test]
fn metropolis_stationary_up_to_twelve() {
    let (q, t) = (int(4), int(2));
    for k in 2..=12 {
        let m = metropolis_matrix(k, &q, &t).unwrap();
        let pi = pi_qt_on(m.index().clone(), &q, &t).unwrap();
        assert!(stationarity_residual(&m, &pi).unwrap().is_zero(), "k={k}");
    }
}

#[test]
fn eigenvalues_positive_and_sum_to_trace() {
    let (q, t) = (int(4), int(2));
    for k in 1..=10 {
        let m = aux_matrix(k, &q, &t).unwrap();
        let index = PartitionIndex::shared(k);
        let mut sum = int(0);
        for lam in index.iter() {
            let b = beta(lam, &q, &t);
            assert!(b > int(0), "{lam}");
            sum = sum + b;
        }
        let trace = (0..m.len()).fold(int(0), |acc, i| acc + m.entry(i, i));
        assert_eq!(trace, sum, "k={k}");
    }
}

#[test]
fn second_eigenvalue_up_to_fifteen() {
    for (q, t) in [(int(4), int(2)), (rat(5, 2), rat(11, 3))] {
        for k in 2..=15 {
            let lead = beta(&Partition::new(vec![k - 1, 1]), &q, &t);
            for lam in enumerate_partitions(k).iter().skip(1) {
                assert!(beta(lam, &q, &t) <= lead, "{lam}");
            }
        }
    }
}

#[test]
fn left_eigenvectors_and_row_values_up_to_eight() {
    for (q, t) in [(int(4), int(2)), (rat(7, 2), rat(9, 4))] {
        for k in 1..=8 {
            let tab = eigen_table(k, &q, &t).unwrap();
            assert!(tab.left_eigen_residual().is_zero(), "k={k}");
            for (l, row) in tab.rows.iter().enumerate() {
                assert_eq!(tab.fbar_sq(l, 0), fbar_sq_at_row(&row.lambda, &q, &t), "{}", row.lambda);
            }
        }
    }
}

#[test]
fn first_row_removal_bound_up_to_ten() {
    let (q, t) = (int(4), int(2));
    let one = int(1);
    for k in 2..=10 {
        let kf = pochhammer(&t, &q, k) / pochhammer(&q, &q, k) * (q.clone() / t.clone()).powi(k);
        for r in 1..=k / 2 {
            let rf = pochhammer(&q, &q, r) / pochhammer(&t, &q, r) * (t.clone() / q.clone()).powi(r);
            let ratio = (one.clone() - q.powi_neg(k)) / (one.clone() - q.powi_neg(r));
            for gamma in enumerate_partitions(r) {
                if gamma.largest() > k - r {
                    continue;
                }
                let mut parts = vec![k - r];
                parts.extend_from_slice(gamma.parts());
                let lam = Partition::new(parts);
                let lhs = fbar_sq_at_row(&lam, &q, &t);
                let rhs = fbar_sq_at_row(&gamma, &q, &t) * ratio.clone() * ratio.clone() * kf.clone() * rf.clone();
                assert!(lhs <= rhs, "k={k} lambda={lam}");
            }
        }
    }
}
