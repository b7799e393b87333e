//! Transition matrices over partitions of `k`: the auxiliary-variables chain
//! (built two independent ways), the Metropolis baseline, and the transposition
//! walks of the Jack degeneration.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::{pi_inf_t_on, w_given, Measure};
use crate::partition::{sub_multisets, z_classical, Partition, PartitionIndex};
use crate::scalar::{abs, require_gt_one, Field};

/// Row-stochastic matrix stored as sorted sparse rows.
#[derive(Clone, Debug)]
pub struct TransitionMatrix<T> {
    index: Arc<PartitionIndex>,
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Field> TransitionMatrix<T> {
    pub fn from_rows(index: Arc<PartitionIndex>, rows: Vec<BTreeMap<usize, T>>) -> Result<Self> {
        if rows.len() != index.len() {
            return Err(Error::IndexMismatch(rows.len(), index.len()));
        }
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        Ok(TransitionMatrix { index, rows })
    }

    pub fn from_dense(index: Arc<PartitionIndex>, dense: Vec<Vec<T>>) -> Result<Self> {
        let rows = dense
            .into_iter()
            .map(|r| r.into_iter().enumerate().collect::<BTreeMap<_, _>>())
            .collect();
        Self::from_rows(index, rows)
    }

    pub fn identity(index: Arc<PartitionIndex>) -> Self {
        let rows = (0..index.len()).map(|i| vec![(i, T::one())]).collect();
        TransitionMatrix { index, rows }
    }

    pub fn index(&self) -> &Arc<PartitionIndex> {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &[(usize, T)] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> T {
        match self.rows[i].binary_search_by_key(&j, |(c, _)| *c) {
            Ok(pos) => self.rows[i][pos].1.clone(),
            Err(_) => T::zero(),
        }
    }

    /// Entry by partition labels.
    pub fn get(&self, from: &Partition, to: &Partition) -> Result<T> {
        Ok(self.entry(self.index.require(from)?, self.index.require(to)?))
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn dense(&self) -> Vec<Vec<T>> {
        (0..self.len())
            .map(|i| (0..self.len()).map(|j| self.entry(i, j)).collect())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<T> {
        self.rows
            .iter()
            .map(|r| r.iter().fold(T::zero(), |a, (_, v)| a + v.clone()))
            .collect()
    }

    /// Row vector times matrix.
    pub fn step_left(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.len()];
        for (i, row) in self.rows.iter().enumerate() {
            if v[i].is_zero() {
                continue;
            }
            for (j, m) in row {
                out[*j] = out[*j].clone() + v[i].clone() * m.clone();
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn apply_right(&self, f: &[T]) -> Vec<T> {
        self.rows
            .par_iter()
            .map(|row| row.iter().fold(T::zero(), |a, (j, m)| a + m.clone() * f[*j].clone()))
            .collect()
    }

    pub fn to_f64(&self) -> TransitionMatrix<f64> {
        TransitionMatrix {
            index: self.index.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|(j, v)| (*j, v.to_f64_lossy())).collect())
                .collect(),
        }
    }

    /// Sparse CSV: `from,to,fraction,decimal`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["from", "to", "fraction", "decimal"])?;
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                w.write_record([
                    self.index.get(i).to_string(),
                    self.index.get(*j).to_string(),
                    v.fraction().unwrap_or_default(),
                    format!("{:.12e}", v.to_f64_lossy()),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let entries: serde_json::Map<String, serde_json::Value> = row
                    .iter()
                    .map(|(j, v)| {
                        let val = match v.fraction() {
                            Some(f) => serde_json::Value::String(f),
                            None => serde_json::json!(v.to_f64_lossy()),
                        };
                        (self.index.get(*j).to_string(), val)
                    })
                    .collect();
                serde_json::json!({ "from": self.index.get(i).to_string(), "to": entries })
            })
            .collect();
        serde_json::json!({ "k": self.index.k(), "rows": rows })
    }
}

/// Partition-indexed coefficients of a linear combination of power sums.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FormalCombination<T> {
    terms: BTreeMap<Partition, T>,
}

impl<T: Field> FormalCombination<T> {
    pub fn new() -> Self {
        FormalCombination { terms: BTreeMap::new() }
    }

    pub fn add(&mut self, p: Partition, c: T) {
        if let Some(size) = self.terms.keys().next().map(Partition::size) {
            assert_eq!(size, p.size(), "mixed degrees in a combination");
        }
        let entry = self.terms.entry(p).or_insert_with(T::zero);
        *entry = entry.clone() + c;
    }

    pub fn scale(&mut self, c: &T) {
        for v in self.terms.values_mut() {
            *v = v.clone() * c.clone();
        }
    }

    pub fn coefficient(&self, p: &Partition) -> T {
        self.terms.get(p).cloned().unwrap_or_else(T::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Partition, &T)> {
        self.terms.iter()
    }

    fn into_row(self, index: &PartitionIndex) -> Result<BTreeMap<usize, T>> {
        self.terms
            .into_iter()
            .map(|(p, c)| Ok((index.require(&p)?, c)))
            .collect()
    }
}

/// The auxiliary-variables kernel: delete parts by `w_lambda`, refill from `pi_{inf,t}`.
pub fn aux_matrix<T: Field>(k: usize, q: &T, t: &T) -> Result<TransitionMatrix<T>> {
    require_gt_one("q", q)?;
    require_gt_one("t", t)?;
    let index = PartitionIndex::shared(k);
    let refill: Vec<Measure<T>> = (0..=k)
        .map(|r| pi_inf_t_on(PartitionIndex::shared(r), t))
        .collect::<Result<_>>()?;
    let rows = index
        .as_slice()
        .par_iter()
        .map(|lam| aux_row(lam, q, &refill, &index))
        .collect::<Result<Vec<_>>>()?;
    TransitionMatrix::from_rows(index, rows)
}

fn aux_row<T: Field>(
    lam: &Partition,
    q: &T,
    refill: &[Measure<T>],
    index: &PartitionIndex,
) -> Result<BTreeMap<usize, T>> {
    let mut row = BTreeMap::new();
    for (kept, _) in sub_multisets(lam) {
        if kept == *lam {
            continue;
        }
        let w = w_given(lam, &kept, q)?;
        let r = lam.size() - kept.size();
        for (mu, p) in refill[r].iter() {
            let nu = kept.union(mu);
            let e = row.entry(index.require(&nu)?).or_insert_with(T::zero);
            *e = e.clone() + w.clone() * p.clone();
        }
    }
    Ok(row)
}

/// One row of the auxiliary kernel without building the whole matrix.
pub fn aux_row_measure<T: Field>(lambda: &Partition, q: &T, t: &T) -> Result<Measure<T>> {
    require_gt_one("q", q)?;
    require_gt_one("t", t)?;
    let k = lambda.size();
    let index = PartitionIndex::shared(k);
    let refill: Vec<Measure<T>> = (0..=k)
        .map(|r| pi_inf_t_on(PartitionIndex::shared(r), t))
        .collect::<Result<_>>()?;
    let row = aux_row(lambda, q, &refill, &index)?;
    let mut probs = vec![T::zero(); index.len()];
    for (j, v) in row {
        probs[j] = v;
    }
    Measure::new(index, probs)
}

/// The first Macdonald operator on `p_lambda` in `n` variables, summed over
/// subsets of part positions.
pub fn macdonald_d1_action<T: Field>(lambda: &Partition, q: &T, t: &T, n: usize) -> FormalCombination<T> {
    let parts = lambda.parts();
    let l = parts.len();
    let mut out = FormalCombination::new();
    let bracket_n = (0..n).fold(T::zero(), |a, i| a + t.powi(i));
    out.add(lambda.clone(), bracket_n);
    let lead = t.powi(n) / (t.clone() - T::one());
    for mask in 1u64..(1u64 << l) {
        let mut coeff = lead.clone();
        let mut rest = Vec::new();
        let mut r = 0;
        for (pos, &p) in parts.iter().enumerate() {
            if mask >> pos & 1 == 1 {
                coeff = coeff * (q.powi(p) - T::one());
                r += p;
            } else {
                rest.push(p);
            }
        }
        let rest = Partition::from_sorted(rest);
        for mu in PartitionIndex::new(r).iter() {
            let mut c = coeff.clone();
            for &m in mu.parts() {
                c = c * (T::one() - t.powi_neg(m));
            }
            c = c / T::of(usize::try_from(z_classical(mu)).expect("z fits usize"));
            out.add(rest.union(mu), c);
        }
    }
    out
}

/// The auxiliary kernel recovered from the first Macdonald operator by
/// `t/(q^k - 1) (t^{-n} D - sum_{i=1}^n t^{-i})`.
pub fn aux_matrix_via_operator<T: Field>(k: usize, q: &T, t: &T, n: usize) -> Result<TransitionMatrix<T>> {
    require_gt_one("q", q)?;
    require_gt_one("t", t)?;
    if n < k {
        return Err(Error::Domain(format!("need n >= k, got n={n}, k={k}")));
    }
    let index = PartitionIndex::shared(k);
    let shift = (1..=n).fold(T::zero(), |a, i| a + t.powi_neg(i));
    let scale = t.clone() / (q.powi(k) - T::one());
    let rows = index
        .as_slice()
        .par_iter()
        .map(|lam| {
            let mut d = macdonald_d1_action(lam, q, t, n);
            d.scale(&t.powi_neg(n));
            d.add(lam.clone(), T::zero() - shift.clone());
            d.scale(&scale);
            d.into_row(&index)
        })
        .collect::<Result<Vec<_>>>()?;
    TransitionMatrix::from_rows(index, rows)
}

/// `max |pi(x) M(x,y) - pi(y) M(y,x)|`.
pub fn check_reversibility<T: Field>(m: &TransitionMatrix<T>, pi: &Measure<T>) -> Result<T> {
    same_index(m.index(), pi.index())?;
    let p = pi.probs();
    let worst = (0..m.len())
        .into_par_iter()
        .map(|i| {
            m.row(i).iter().fold(T::zero(), |acc, (j, v)| {
                let r = abs(&(p[i].clone() * v.clone() - p[*j].clone() * m.entry(*j, i)));
                if r > acc {
                    r
                } else {
                    acc
                }
            })
        })
        .reduce(T::zero, |a, b| if b > a { b } else { a });
    Ok(worst)
}

/// `max |(pi M)(y) - pi(y)|`.
pub fn stationarity_residual<T: Field>(m: &TransitionMatrix<T>, pi: &Measure<T>) -> Result<T> {
    same_index(m.index(), pi.index())?;
    let next = m.step_left(pi.probs());
    Ok(next
        .iter()
        .zip(pi.probs())
        .map(|(a, b)| abs(&(a.clone() - b.clone())))
        .fold(T::zero(), |acc, r| if r > acc { r } else { acc }))
}

fn same_index(a: &PartitionIndex, b: &PartitionIndex) -> Result<()> {
    if a.k() == b.k() && a.len() == b.len() {
        Ok(())
    } else {
        Err(Error::IndexMismatch(a.k(), b.k()))
    }
}

/// Law after `steps` moves from `start`.
pub fn power_dist<T: Field>(m: &TransitionMatrix<T>, start: &Partition, steps: usize) -> Result<Measure<T>> {
    let mut v = Measure::point_mass(m.index().clone(), start)?.into_probs();
    for _ in 0..steps {
        v = m.step_left(&v);
    }
    Measure::new(m.index().clone(), v)
}

fn binom2<T: Field>(n: usize) -> T {
    T::of(n * n.saturating_sub(1) / 2)
}

/// Class-level kernel of the random-transposition walk where merges are kept
/// with probability `merge_accept(a, b)` and splits of `a` into `(m, a-m)`
/// with probability `split_accept(a, m)`.
pub fn transposition_class_matrix<T, FM, FS>(
    k: usize,
    merge_accept: FM,
    split_accept: FS,
) -> Result<TransitionMatrix<T>>
where
    T: Field,
    FM: Fn(usize, usize) -> T + Sync,
    FS: Fn(usize, usize) -> T + Sync,
{
    if k < 2 {
        return Err(Error::Domain("need k >= 2".into()));
    }
    let index = PartitionIndex::shared(k);
    let pairs: T = binom2(k);
    let rows = index
        .as_slice()
        .par_iter()
        .enumerate()
        .map(|(i, lam)| {
            let parts = lam.parts();
            let mut row: BTreeMap<usize, T> = BTreeMap::new();
            let mut add = |nu: Partition, v: T| -> Result<()> {
                let e = row.entry(index.require(&nu)?).or_insert_with(T::zero);
                *e = e.clone() + v;
                Ok(())
            };
            for x in 0..parts.len() {
                for y in x + 1..parts.len() {
                    let (a, b) = (parts[x], parts[y]);
                    let w = T::of(a * b) / pairs.clone() * merge_accept(a, b);
                    add(lam.merge_positions(x, y), w)?;
                }
                let a = parts[x];
                // each cut size m in 1..a comes from a/2 of the pairs inside the cycle
                for m in 1..a {
                    let w = T::of(a) / (T::of(2) * pairs.clone()) * split_accept(a, m);
                    add(lam.split_position(x, m), w)?;
                }
            }
            let off = row.values().fold(T::zero(), |s, v| s + v.clone());
            let e = row.entry(i).or_insert_with(T::zero);
            *e = e.clone() + T::one() - off;
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    TransitionMatrix::from_rows(index, rows)
}

/// Class-level Metropolis chain for `pi_{q,t}` with random-transposition proposals.
pub fn metropolis_matrix<T: Field>(k: usize, q: &T, t: &T) -> Result<TransitionMatrix<T>> {
    require_gt_one("q", q)?;
    require_gt_one("t", t)?;
    let eta: Vec<T> = (0..=k)
        .map(|i| {
            if i == 0 {
                T::one()
            } else {
                (t.powi(i) - T::one()) / (q.powi(i) - T::one())
            }
        })
        .collect();
    let cap = |r: T| if r > T::one() { T::one() } else { r };
    transposition_class_matrix(
        k,
        |a, b| cap(eta[a + b].clone() / (eta[a].clone() * eta[b].clone())),
        |a, m| cap(eta[m].clone() * eta[a - m].clone() / eta[a].clone()),
    )
}

/// The transposition walk with merges always accepted and splits accepted
/// with probability `1/alpha`.
pub fn hanlon_matrix<T: Field>(r: usize, alpha: &T) -> Result<TransitionMatrix<T>> {
    if *alpha < T::one() {
        return Err(Error::Domain(format!("alpha must be at least 1, got {alpha:?}")));
    }
    let inv = T::one() / alpha.clone();
    transposition_class_matrix(r, |_, _| T::one(), |_, _| inv.clone())
}

/// The Laplace–Beltrami type operator `D(alpha)` on `p_lambda` in `n` variables,
/// expanded over ordered pairs of part positions.
pub fn jack_operator_action<T: Field>(lambda: &Partition, alpha: &T, n: usize) -> FormalCombination<T> {
    let parts = lambda.parts();
    let half = T::one() / T::of(2);
    let mut out = FormalCombination::new();
    let mut diag = T::zero();
    for &p in parts {
        diag = diag + alpha.clone() * T::of(p * (p - 1)) + T::of(p) * (T::of(2 * n) - T::of(p + 1));
    }
    out.add(lambda.clone(), half.clone() * diag);
    for j in 0..parts.len() {
        for k in 0..parts.len() {
            if j == k {
                continue;
            }
            let (a, b) = (j.min(k), j.max(k));
            let c = half.clone() * alpha.clone() * T::of(parts[j] * parts[k]);
            out.add(lambda.merge_positions(a, b), c);
        }
        for m in 1..parts[j] {
            out.add(lambda.split_position(j, m), half.clone() * T::of(parts[j]));
        }
    }
    out
}

/// Transition matrix read off from `D(alpha) p_lambda = (n-1) r p_lambda + alpha C(r,2) sum_mu l_{mu lambda} p_mu`.
pub fn hanlon_ell_matrix<T: Field>(r: usize, alpha: &T, n: usize) -> Result<TransitionMatrix<T>> {
    if n < r {
        return Err(Error::Domain(format!("need n >= r, got n={n}, r={r}")));
    }
    if r < 2 {
        return Err(Error::Domain("need r >= 2".into()));
    }
    let index = PartitionIndex::shared(r);
    let scale = T::one() / (alpha.clone() * binom2::<T>(r));
    let rows = index
        .as_slice()
        .par_iter()
        .map(|lam| {
            let mut d = jack_operator_action(lam, alpha, n);
            d.add(lam.clone(), T::zero() - T::of((n - 1) * r));
            d.scale(&scale);
            d.into_row(&index)
        })
        .collect::<Result<Vec<_>>>()?;
    TransitionMatrix::from_rows(index, rows)
}

#[cfg(test)]
mod tests {
    use num::traits::{One, Zero};
    use super::*;
    use crate::measures::{pi_ewens, pi_inf_t, pi_qt_table};
    use crate::scalar::{int, rat, Rational};

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn two_state_kernel() {
        let m = aux_matrix(2, &int(4), &int(2)).unwrap();
        assert_eq!(
            m.dense(),
            vec![vec![rat(3, 4), rat(1, 4)], vec![rat(9, 20), rat(11, 20)]]
        );
    }

    #[test]
    fn single_part_row_is_replacement_law() {
        let (q, t) = (rat(7, 2), rat(9, 4));
        for k in 1..=8 {
            let m = aux_matrix(k, &q, &t).unwrap();
            let want = pi_inf_t(k, &t).unwrap();
            let row: Vec<Rational> = (0..m.len()).map(|j| m.entry(0, j)).collect();
            assert_eq!(row, want.probs());
            assert_eq!(aux_row_measure(&Partition::row(k), &q, &t).unwrap().probs(), want.probs());
        }
    }

    #[test]
    fn rows_sum_to_one_and_balance() {
        let (q, t) = (int(4), int(2));
        for k in 1..=8 {
            let m = aux_matrix(k, &q, &t).unwrap();
            assert!(m.row_sums().iter().all(One::is_one));
            let pi = pi_qt_table(k, &q, &t).unwrap();
            assert!(check_reversibility(&m, &pi).unwrap().is_zero());
            assert!(stationarity_residual(&m, &pi).unwrap().is_zero());
        }
    }

    #[test]
    fn operator_construction_matches() {
        let (q, t) = (int(4), int(2));
        for k in 1..=5 {
            let direct = aux_matrix(k, &q, &t).unwrap().dense();
            for n in [k, k + 3] {
                let op = aux_matrix_via_operator(k, &q, &t, n).unwrap().dense();
                assert_eq!(op, direct, "k={k} n={n}");
            }
        }
        assert!(aux_matrix_via_operator(4, &q, &t, 3).is_err());
    }

    #[test]
    fn identity_is_reversible() {
        let pi = pi_qt_table(5, &int(4), &int(2)).unwrap();
        let id = TransitionMatrix::identity(pi.index().clone());
        assert!(check_reversibility(&id, &pi).unwrap().is_zero());
    }

    #[test]
    fn power_distribution() {
        let m = aux_matrix(2, &int(4), &int(2)).unwrap();
        assert_eq!(power_dist(&m, &p("2"), 0).unwrap().probs(), &[int(1), int(0)]);
        assert_eq!(power_dist(&m, &p("2"), 1).unwrap().probs(), &[rat(3, 4), rat(1, 4)]);
        let mf = aux_matrix(6, &4.0, &2.0).unwrap();
        let pi = crate::measures::pi_qt_float(mf.index().clone(), 4.0, 2.0).unwrap();
        let far = power_dist(&mf, &Partition::column(6), 200).unwrap();
        for (a, b) in far.probs().iter().zip(pi.probs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn metropolis_is_stochastic_and_balanced() {
        let (q, t) = (int(4), int(2));
        for k in 2..=8 {
            let m = metropolis_matrix(k, &q, &t).unwrap();
            assert!(m.row_sums().iter().all(One::is_one));
            let pi = pi_qt_table(k, &q, &t).unwrap();
            assert!(check_reversibility(&m, &pi).unwrap().is_zero());
        }
        // from (1,1) the only proposal is (2)
        let m = metropolis_matrix(2, &q, &t).unwrap();
        let eta1 = rat(1, 3);
        let eta2 = rat(3, 15);
        let ratio = eta2 / (eta1.clone() * eta1);
        assert_eq!(m.get(&p("1,1"), &p("2")).unwrap(), ratio.min(int(1)));
    }

    #[test]
    fn hanlon_small_rows() {
        let alpha = rat(7, 2);
        let m = hanlon_matrix(3, &alpha).unwrap();
        assert_eq!(m.get(&p("1,1,1"), &p("2,1")).unwrap(), int(1));
        assert_eq!(m.get(&p("3"), &p("2,1")).unwrap(), rat(2, 7));
        assert_eq!(m.get(&p("3"), &p("3")).unwrap(), rat(5, 7));
        let one = hanlon_matrix(5, &int(1)).unwrap();
        for i in 0..one.len() {
            assert!(one.entry(i, i).is_zero());
        }
        assert!(hanlon_matrix(3, &rat(1, 2)).is_err());
    }

    #[test]
    fn hanlon_balance_and_operator_form() {
        for alpha in [int(1), int(2), rat(7, 2)] {
            for r in 2..=6 {
                let h = hanlon_matrix(r, &alpha).unwrap();
                assert!(h.row_sums().iter().all(One::is_one));
                let pi = pi_ewens(r, &alpha).unwrap();
                assert!(check_reversibility(&h, &pi).unwrap().is_zero());
                let ell = hanlon_ell_matrix(r, &alpha, r).unwrap().dense();
                assert_eq!(ell, h.dense());
                assert_eq!(hanlon_ell_matrix(r, &alpha, r + 5).unwrap().dense(), ell);
            }
        }
    }

    #[test]
    fn reversed_filter_targets_inverse_parameter() {
        // splits always kept, merges kept with probability 1/alpha
        let alpha = int(3);
        let inv = int(1) / alpha.clone();
        for r in 2..=6 {
            let m = transposition_class_matrix(r, |_, _| inv.clone(), |_, _| int(1)).unwrap();
            assert!(check_reversibility(&m, &pi_ewens(r, &inv).unwrap()).unwrap().is_zero());
            assert!(!check_reversibility(&m, &pi_ewens(r, &alpha).unwrap()).unwrap().is_zero());
        }
    }

    #[test]
    fn exports() {
        let m = aux_matrix(2, &int(4), &int(2)).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("from,to,fraction,decimal\n2,2,3/4,"));
        assert_eq!(m.to_json()["rows"][1]["to"]["1,1"], "11/20");
    }
}
