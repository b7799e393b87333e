//! Distances along the exact chain, the spectral expansion and the explicit bounds.

use macdonald_chain::convergence::{
    chi2_distance, chi2_lead_term_1k, chi2_spectral, distance_profile, fbar_sq_two_row_at_column, mixing_time, pk_sequence,
    chi2_upper_bound, MixingSource,
};
use macdonald_chain::exact_chain::{aux_matrix, power_dist};
use macdonald_chain::measures::{pi_qt_float, pi_qt_on};
use macdonald_chain::scalar::{int, rat, Field};
use macdonald_chain::spectral::eigen_table;
use macdonald_chain::Partition;

#[test]
fn spectral_chi_square_matches_direct_up_to_eight() {
    let (q, t) = (int(4), int(2));
    for k in 2..=8 {
        let tab = eigen_table(k, &q, &t).unwrap();
        for start in [Partition::row(k), Partition::column(k)] {
            for l in 0..=6 {
                let direct = chi2_distance(&power_dist(&tab.matrix, &start, l).unwrap(), &tab.pi).unwrap();
                assert_eq!(chi2_spectral(&tab, &start, l).unwrap(), direct, "k={k} start={start} l={l}");
            }
        }
    }
}

#[test]
fn total_variation_never_increases() {
    let (q, t) = (int(4), int(2));
    for k in 2..=10 {
        let m = aux_matrix(k, &q, &t).unwrap();
        let pi = pi_qt_on(m.index().clone(), &q, &t).unwrap();
        for start in [Partition::row(k), Partition::column(k)] {
            let profile = distance_profile(&m, &pi, &start, 8).unwrap();
            for w in profile.windows(2) {
                assert!(w[1].tv <= w[0].tv, "k={k} start={start} l={}", w[1].steps);
                assert!(4.0 * w[1].tv * w[1].tv <= w[1].chi2.unwrap() * (1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn upper_bound_holds_at_second_parameter_pair() {
    let (q, t) = (int(3), rat(3, 2));
    for k in 4..=12 {
        let m = aux_matrix(k, &q, &t).unwrap();
        let pi = pi_qt_on(m.index().clone(), &q, &t).unwrap();
        let profile = distance_profile(&m, &pi, &Partition::row(k), 6).unwrap();
        for l in 2..=6 {
            let bound = chi2_upper_bound(k, 3.0, 1.5, l).unwrap().total;
            assert!(4.0 * profile[l].tv * profile[l].tv <= bound, "k={k} l={l}");
        }
    }
}

#[test]
fn mixing_from_all_ones_grows_with_k() {
    let (q, t) = (2.0, 1.5);
    let time = |k: usize| {
        let m = aux_matrix(k, &q, &t).unwrap();
        let pi = pi_qt_float(m.index().clone(), q, t).unwrap();
        mixing_time(MixingSource::Matrix(&m), &Partition::column(k), 0.1, &pi, 200).unwrap().steps
    };
    let ladder: Vec<usize> = (3..=12).map(time).collect();
    assert!(ladder.windows(2).all(|w| w[0] <= w[1]), "{ladder:?}");
    assert!(ladder[9] > ladder[0], "{ladder:?}");
}

#[test]
fn p_sequence_identity_up_to_fifteen() {
    let (q, t) = (int(4), int(2));
    let seq = pk_sequence(15, &q, &t);
    for (j, pj) in seq.iter().enumerate() {
        let j = j + 1;
        let pi = pi_qt_on(macdonald_chain::PartitionIndex::shared(j), &q, &t).unwrap();
        let single = pi.get(&Partition::row(j)).unwrap().clone();
        let one = int(1);
        let lhs = pj.clone() * (one.clone() - t.powi_neg(1)) / (one.clone() - t.powi_neg(j)) * int(j as i64) * single;
        assert_eq!(lhs, one, "j={j}");
    }
}

#[test]
fn p_sequence_below_inverse_square_root_cap() {
    let seq = pk_sequence(200, &4.0, &2.0);
    let cap = (1.0 - 0.25f64).powf(-0.5);
    assert!(seq.windows(2).all(|w| w[0] <= w[1]));
    let over: Vec<(usize, f64)> = seq.iter().enumerate().filter(|(_, v)| **v >= cap).map(|(j, v)| (j + 1, *v)).collect();
    assert!(over.is_empty(), "cap {cap:.6} exceeded from j={} (P_200 = {:.6})", over[0].0, seq[199]);
}

fn two_row_ratio(k: usize) -> f64 {
    let limit = (1.0 - 0.25) / (1.0 - 0.5);
    fbar_sq_two_row_at_column(k, &4.0, &2.0) / (k * k) as f64 / limit
}

#[test]
fn two_row_column_value_within_two_percent_at_thirty() {
    let r = two_row_ratio(30);
    assert!((r - 1.0).abs() <= 0.02, "ratio to the limit at k=30 is {r:.4}");
}

#[test]
fn two_row_column_value_approaches_limit() {
    let ratios: Vec<f64> = [10, 30, 100, 300].iter().map(|&k| two_row_ratio(k)).collect();
    assert!(ratios.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs()), "{ratios:?}");
    assert!((ratios[2] - 1.0).abs() <= 0.02, "{ratios:?}");
}

#[test]
fn lead_term_bounds_chi_square_from_all_ones() {
    let (q, t) = (int(4), int(2));
    for k in 2..=12 {
        let m = aux_matrix(k, &q, &t).unwrap();
        let pi = pi_qt_on(m.index().clone(), &q, &t).unwrap();
        let profile = distance_profile(&m, &pi, &Partition::column(k), 6).unwrap();
        for l in 1..=6 {
            let lead = chi2_lead_term_1k(k, 4.0, 2.0, l);
            assert!(profile[l].chi2.unwrap() >= lead * (1.0 - 1e-12), "k={k} l={l}");
        }
    }
}
