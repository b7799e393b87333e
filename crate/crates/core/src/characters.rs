//! Irreducible characters of the symmetric group by border-strip removal.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::partition::{enumerate_partitions, Partition};

/// Memoized Murnaghan–Nakayama evaluator.
#[derive(Default, Debug)]
pub struct CharacterCache {
    memo: HashMap<(Partition, Partition), i64>,
}

impl CharacterCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// `chi^lambda` evaluated at cycle type `rho`.
    pub fn character(&mut self, lambda: &Partition, rho: &Partition) -> Result<i64> {
        if lambda.size() != rho.size() {
            return Err(Error::SizeMismatch(rho.clone(), rho.size(), lambda.size()));
        }
        Ok(self.eval(lambda, rho.parts()))
    }

    fn eval(&mut self, lambda: &Partition, rho: &[usize]) -> i64 {
        let Some((&r, rest)) = rho.split_first() else {
            return 1;
        };
        let key = (lambda.clone(), Partition::from_sorted(rho.to_vec()));
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        // Beta-set (first-column hook lengths): removing an r-border strip is
        // moving one bead down by r onto an empty position.
        let n = lambda.len();
        let beads: Vec<usize> = lambda
            .parts()
            .iter()
            .enumerate()
            .map(|(i, &p)| p + n - 1 - i)
            .collect();
        let mut total = 0;
        for &b in &beads {
            if b < r || beads.contains(&(b - r)) {
                continue;
            }
            let nb = b - r;
            let crossed = beads.iter().filter(|&&x| nb < x && x < b).count();
            let sign = if crossed % 2 == 0 { 1 } else { -1 };
            let mut moved: Vec<usize> = beads.iter().map(|&x| if x == b { nb } else { x }).collect();
            moved.sort_unstable_by(|a, b| b.cmp(a));
            let m = moved.len();
            let shape: Vec<usize> = moved
                .iter()
                .enumerate()
                .map(|(j, &x)| x - (m - 1 - j))
                .filter(|&p| p > 0)
                .collect();
            total += sign * self.eval(&Partition::from_sorted(shape), rest);
        }
        self.memo.insert(key, total);
        total
    }
}

pub fn mn_character(lambda: &Partition, rho: &Partition) -> Result<i64> {
    CharacterCache::new().character(lambda, rho)
}

/// Full table `chi[lambda][rho]` over partitions of `k` in canonical order.
pub fn character_table(k: usize) -> Vec<Vec<i64>> {
    let parts = enumerate_partitions(k);
    let mut cache = CharacterCache::new();
    parts
        .iter()
        .map(|lam| parts.iter().map(|rho| cache.eval(lam, rho.parts())).collect())
        .collect()
}
