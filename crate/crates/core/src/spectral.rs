//! Eigenvalues and eigenvectors of the auxiliary-variables chain.
//!
//! Eigenvectors are computed as exact kernels of `M - beta I` and scaled so
//! that the coordinate at `(k)` equals `X_{(k)}^lambda (1 - q^k)`; dividing by
//! `prod_i (1 - q^{rho_i})` then yields the power-sum coefficients `X_rho^lambda`
//! of the integral-form Macdonald polynomials.

use std::collections::HashMap;
use std::sync::Arc;

use num::traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::characters::character_table;
use crate::error::{Error, Result};
use crate::exact_chain::{aux_matrix, TransitionMatrix};
use crate::measures::{pi_qt_on, Measure};
use crate::partition::{boxes, z_classical, Partition, PartitionIndex};
use crate::scalar::{abs, fraction_string, pochhammer, Field, Rational};

/// `beta_lambda = t/(q^k - 1) sum_i (q^{lambda_i} - 1) t^{-i}`.
pub fn beta<T: Field>(lambda: &Partition, q: &T, t: &T) -> T {
    let k = lambda.size();
    let s = lambda
        .parts()
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (i, &p)| acc + (q.powi(p) - T::one()) * t.powi_neg(i + 1));
    t.clone() / (q.powi(k) - T::one()) * s
}

/// Arm-leg products `c_lambda = prod (1 - q^a t^{l+1})` and `c'_lambda = prod (1 - q^{a+1} t^l)`.
pub fn c_pair<T: Field>(lambda: &Partition, q: &T, t: &T) -> (T, T) {
    boxes(lambda).iter().fold((T::one(), T::one()), |(c, cp), b| {
        (
            c * (T::one() - q.powi(b.arm) * t.powi(b.leg + 1)),
            cp * (T::one() - q.powi(b.arm + 1) * t.powi(b.leg)),
        )
    })
}

/// Closed-form special values of `X_rho^lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecialX {
    /// `X_rho^{(k)} = (q,q)_k / prod_i (1 - q^{rho_i})`, argument `rho`.
    RowK,
    /// `(q,q)_k prod_i (1 - t^{rho_i})`, a misprinted variant of `RowK` kept for comparison.
    RowKPrinted,
    /// `X_rho^{(1^k)} = (-1)^{k - l(rho)} (t,t)_k / prod_i (1 - t^{rho_i})`, argument `rho`.
    Row1k,
    /// `X_{(k)}^lambda = prod over boxes (i,j) != (1,1) of (t^{i-1} - q^{j-1})`, argument `lambda`.
    ColK,
}

pub fn x_special<T: Field>(which: SpecialX, arg: &Partition, q: &T, t: &T) -> T {
    let k = arg.size();
    match which {
        SpecialX::RowK => arg
            .parts()
            .iter()
            .fold(pochhammer(q, q, k), |acc, &p| acc / (T::one() - q.powi(p))),
        SpecialX::RowKPrinted => arg
            .parts()
            .iter()
            .fold(pochhammer(q, q, k), |acc, &p| acc * (T::one() - t.powi(p))),
        SpecialX::Row1k => {
            let v = arg
                .parts()
                .iter()
                .fold(pochhammer(t, t, k), |acc, &p| acc / (T::one() - t.powi(p)));
            if (k - arg.len()) % 2 == 0 {
                v
            } else {
                T::zero() - v
            }
        }
        SpecialX::ColK => boxes(arg)
            .iter()
            .filter(|b| (b.row, b.col) != (1, 1))
            .fold(T::one(), |acc, b| acc * (t.powi(b.row - 1) - q.powi(b.col - 1))),
    }
}

/// `fbar_lambda((k))^2 = (X_{(k)}^lambda (q^k - 1))^2 / (c c') (t,q)_k / (q,q)_k`.
pub fn fbar_sq_at_row<T: Field>(lambda: &Partition, q: &T, t: &T) -> T {
    let k = lambda.size();
    let x = x_special(SpecialX::ColK, lambda, q, t) * (q.powi(k) - T::one());
    let (c, cp) = c_pair(lambda, q, t);
    x.clone() * x / (c * cp) * pochhammer(t, q, k) / pochhammer(q, q, k)
}

/// `<f_lambda, f_lambda>` in `L^2(pi_{q,t})`: `c c' (q,q)_k / (t,q)_k`.
pub fn eigen_norm<T: Field>(lambda: &Partition, q: &T, t: &T) -> T {
    let k = lambda.size();
    let (c, cp) = c_pair(lambda, q, t);
    c * cp * pochhammer(q, q, k) / pochhammer(t, q, k)
}

#[derive(Clone, Debug)]
pub struct SpectralRow {
    pub lambda: Partition,
    pub beta: Rational,
    /// `f_lambda(rho)` over the index.
    pub f: Vec<Rational>,
    /// `X_rho^lambda` over the index.
    pub x: Vec<Rational>,
    pub c: Rational,
    pub c_prime: Rational,
    pub norm: Rational,
}

#[derive(Clone, Debug)]
pub struct SpectralTable {
    pub k: usize,
    pub q: Rational,
    pub t: Rational,
    pub index: Arc<PartitionIndex>,
    pub matrix: TransitionMatrix<Rational>,
    pub pi: Measure<Rational>,
    pub rows: Vec<SpectralRow>,
}

/// Fails with the colliding pairs when two eigenvalues coincide.
pub fn check_distinct(index: &PartitionIndex, betas: &[Rational]) -> Result<()> {
    let mut clashes = Vec::new();
    for i in 0..betas.len() {
        for j in i + 1..betas.len() {
            if betas[i] == betas[j] {
                clashes.push((index.get(i).clone(), index.get(j).clone()));
            }
        }
    }
    if clashes.is_empty() {
        Ok(())
    } else {
        Err(Error::EigenvalueCollision(clashes))
    }
}

/// Basis of the null space of a square matrix by exact Gauss–Jordan elimination.
pub fn kernel(mut a: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let n = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..n).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = Rational::one() / a[r][c].clone();
        for v in a[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == n {
            break;
        }
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = Rational::zero() - a[i][free].clone();
            }
            v
        })
        .collect()
}

/// Number of ways to distribute the (distinguishable) parts of `rho` into the
/// rows of `lambda` so that row `i` receives total `lambda_i`; this is the
/// coefficient of `m_lambda` in `p_rho`.
pub fn power_to_monomial(rho: &Partition, lambda: &Partition) -> u128 {
    fn rec(parts: &[usize], caps: &mut Vec<usize>, memo: &mut HashMap<(usize, Vec<usize>), u128>) -> u128 {
        let Some((&first, rest)) = parts.split_first() else {
            return u128::from(caps.iter().all(|&c| c == 0));
        };
        let key = (parts.len(), caps.clone());
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let mut total = 0;
        for i in 0..caps.len() {
            if caps[i] >= first {
                caps[i] -= first;
                total += rec(rest, caps, memo);
                caps[i] += first;
            }
        }
        memo.insert(key, total);
        total
    }
    if rho.size() != lambda.size() {
        return 0;
    }
    rec(rho.parts(), &mut lambda.parts().to_vec(), &mut HashMap::new())
}

/// Coefficient of `m_lambda` in `sum_rho z_rho^{-1} prod_i (1 - t^{rho_i}) X_rho p_rho`
/// where `X_rho = f(rho) / prod_i (1 - q^{rho_i})`.
pub fn leading_monomial_coefficient(
    index: &PartitionIndex,
    lambda: &Partition,
    f: &[Rational],
    q: &Rational,
    t: &Rational,
) -> Rational {
    index.iter().zip(f).fold(Rational::zero(), |acc, (rho, fv)| {
        let count = power_to_monomial(rho, lambda);
        if count == 0 || fv.is_zero() {
            return acc;
        }
        let w = rho.parts().iter().fold(fv.clone(), |a, &p| {
            a * (Rational::one() - t.powi(p)) / (Rational::one() - q.powi(p))
        });
        acc + w * Rational::from_integer(count.into()) / Rational::from_integer(z_classical(rho))
    })
}

/// Exact eigen-decomposition of the auxiliary chain on partitions of `k`.
pub fn eigen_table(k: usize, q: &Rational, t: &Rational) -> Result<SpectralTable> {
    let matrix = aux_matrix(k, q, t)?;
    let index = matrix.index().clone();
    let pi = pi_qt_on(index.clone(), q, t)?;
    let betas: Vec<Rational> = index.iter().map(|l| beta(l, q, t)).collect();
    check_distinct(&index, &betas)?;
    let dense = matrix.dense();
    let qk = q.powi(k);
    let rows = index
        .as_slice()
        .par_iter()
        .zip(betas.par_iter())
        .map(|(lam, b)| {
            let mut a = dense.clone();
            for (i, row) in a.iter_mut().enumerate() {
                row[i] = row[i].clone() - b.clone();
            }
            let mut basis = kernel(a);
            if basis.len() != 1 {
                return Err(Error::KernelDimension(lam.clone(), basis.len()));
            }
            let v = basis.pop().expect("one vector");
            let s = if v[0].is_zero() {
                // X_{(k)}^lambda vanishes here, so fix the scale by the leading
                // monomial coefficient of J_lambda, which is c_lambda
                let lead = leading_monomial_coefficient(&index, lam, &v, q, t);
                if lead.is_zero() {
                    return Err(Error::DivisionByZero(format!("eigenvector of {lam} has no usable anchor")));
                }
                c_pair(lam, q, t).0 / lead
            } else {
                x_special(SpecialX::ColK, lam, q, t) * (Rational::one() - qk.clone()) / v[0].clone()
            };
            let f: Vec<Rational> = v.into_iter().map(|x| x * s.clone()).collect();
            let x = f
                .iter()
                .zip(index.iter())
                .map(|(fv, rho)| {
                    rho.parts()
                        .iter()
                        .fold(fv.clone(), |acc, &p| acc / (Rational::one() - q.powi(p)))
                })
                .collect();
            let (c, c_prime) = c_pair(lam, q, t);
            let norm = eigen_norm(lam, q, t);
            Ok(SpectralRow {
                lambda: lam.clone(),
                beta: b.clone(),
                f,
                x,
                c,
                c_prime,
                norm,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralTable {
        k,
        q: q.clone(),
        t: t.clone(),
        index,
        matrix,
        pi,
        rows,
    })
}

impl SpectralTable {
    pub fn row(&self, lambda: &Partition) -> Result<&SpectralRow> {
        Ok(&self.rows[self.index.require(lambda)?])
    }

    /// `fbar_lambda(rho)^2 = f_lambda(rho)^2 / <f_lambda, f_lambda>`.
    pub fn fbar_sq(&self, lambda: usize, rho: usize) -> Rational {
        let row = &self.rows[lambda];
        row.f[rho].clone() * row.f[rho].clone() / row.norm.clone()
    }

    /// `max_lambda max_rho |(M f_lambda)(rho) - beta_lambda f_lambda(rho)|`.
    pub fn eigen_residual(&self) -> Rational {
        self.rows
            .par_iter()
            .map(|row| {
                let mf = self.matrix.apply_right(&row.f);
                mf.iter()
                    .zip(&row.f)
                    .map(|(a, b)| abs(&(a.clone() - row.beta.clone() * b.clone())))
                    .fold(Rational::zero(), |m, r| if r > m { r } else { m })
            })
            .reduce(Rational::zero, |a, b| if b > a { b } else { a })
    }

    /// Same as [`eigen_residual`](Self::eigen_residual) for `h_lambda = f_lambda pi` acting on the left.
    pub fn left_eigen_residual(&self) -> Rational {
        let pi = self.pi.probs();
        self.rows
            .par_iter()
            .map(|row| {
                let h: Vec<Rational> = row.f.iter().zip(pi).map(|(f, p)| f.clone() * p.clone()).collect();
                let hm = self.matrix.step_left(&h);
                hm.iter()
                    .zip(&h)
                    .map(|(a, b)| abs(&(a.clone() - row.beta.clone() * b.clone())))
                    .fold(Rational::zero(), |m, r| if r > m { r } else { m })
            })
            .reduce(Rational::zero, |a, b| if b > a { b } else { a })
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Row {
            lambda: String,
            beta: String,
            c: String,
            c_prime: String,
            norm: String,
            f: Vec<String>,
            x: Vec<String>,
        }
        let rows: Vec<Row> = self
            .rows
            .iter()
            .map(|r| Row {
                lambda: r.lambda.to_string(),
                beta: fraction_string(&r.beta),
                c: fraction_string(&r.c),
                c_prime: fraction_string(&r.c_prime),
                norm: fraction_string(&r.norm),
                f: r.f.iter().map(fraction_string).collect(),
                x: r.x.iter().map(fraction_string).collect(),
            })
            .collect();
        serde_json::json!({
            "k": self.k,
            "q": fraction_string(&self.q),
            "t": fraction_string(&self.t),
            "partitions": self.index.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "rows": rows,
        })
    }
}

/// `max |sum_rho f_lambda f_mu pi - delta norm|` over all pairs.
pub fn gram_check(table: &SpectralTable) -> Rational {
    let pi = table.pi.probs();
    let n = table.rows.len();
    (0..n)
        .into_par_iter()
        .map(|a| {
            (0..n)
                .map(|b| {
                    let s = (0..n).fold(Rational::zero(), |acc, r| {
                        acc + table.rows[a].f[r].clone() * table.rows[b].f[r].clone() * pi[r].clone()
                    });
                    let want = if a == b { table.rows[a].norm.clone() } else { Rational::zero() };
                    abs(&(s - want))
                })
                .fold(Rational::zero(), |m, r| if r > m { r } else { m })
        })
        .reduce(Rational::zero, |a, b| if b > a { b } else { a })
}

/// `K[lambda][mu] = K_{mu lambda}(q,t) = sum_rho z_rho^{-1} chi_rho^mu X_rho^lambda`.
pub fn kostka_qt(table: &SpectralTable) -> Vec<Vec<Rational>> {
    let chi = character_table(table.k);
    let z: Vec<Rational> = table
        .index
        .iter()
        .map(|r| Rational::from_integer(z_classical(r)))
        .collect();
    table
        .rows
        .iter()
        .map(|row| {
            chi.iter()
                .map(|chi_mu| {
                    (0..z.len()).fold(Rational::zero(), |acc, r| {
                        acc + Rational::from_integer(chi_mu[r].into()) * row.x[r].clone() / z[r].clone()
                    })
                })
                .collect()
        })
        .collect()
}

/// Recovers `X[lambda][rho] = sum_mu chi_rho^mu K_{mu lambda}` from a Kostka table.
pub fn x_from_kostka(k: usize, kostka: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let chi = character_table(k);
    let n = chi.len();
    kostka
        .iter()
        .map(|krow| {
            (0..n)
                .map(|r| {
                    (0..n).fold(Rational::zero(), |acc, mu| {
                        acc + Rational::from_integer(chi[mu][r].into()) * krow[mu].clone()
                    })
                })
                .collect()
        })
        .collect()
}
