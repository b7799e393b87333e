//! Seeded, stream-separated random source.

use num::traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalar::Rational;

/// A reproducible stream: identical `(seed, stream)` pairs give identical draws.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform on `lo..=hi`.
    pub fn uniform_int(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Bernoulli trial with an exact rational success probability, decided by
    /// comparing lazily generated random bits with the binary expansion of `p`.
    pub fn bernoulli_exact(&mut self, p: &Rational) -> bool {
        if !p.is_positive() {
            return false;
        }
        if *p >= Rational::one() {
            return true;
        }
        let two = Rational::from_integer(2.into());
        let mut frac = p.clone();
        loop {
            frac = frac * &two;
            let digit = frac >= Rational::one();
            if digit {
                frac -= Rational::one();
            }
            let bit: bool = self.rng.gen();
            match (bit, digit) {
                (false, true) => return true,
                (true, false) => return false,
                _ if frac.is_zero() => return false,
                _ => {}
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn same_seed_same_stream() {
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 3);
        let xs: Vec<usize> = (0..50).map(|_| a.uniform_int(1, 1000)).collect();
        let ys: Vec<usize> = (0..50).map(|_| b.uniform_int(1, 1000)).collect();
        assert_eq!(xs, ys);
        let mut c = RngStream::new(7, 4);
        let zs: Vec<usize> = (0..50).map(|_| c.uniform_int(1, 1000)).collect();
        assert_ne!(xs, zs);
    }

    #[test]
    fn exact_bernoulli_frequency() {
        let mut r = RngStream::new(1, 0);
        let p = rat(2, 7);
        let n = 200_000;
        let hits = (0..n).filter(|_| r.bernoulli_exact(&p)).count() as f64;
        let mean = hits / n as f64;
        let sd = (2.0 / 7.0 * 5.0 / 7.0 / n as f64).sqrt();
        assert!((mean - 2.0 / 7.0).abs() < 4.0 * sd, "{mean}");
        assert!(r.bernoulli_exact(&rat(1, 1)));
        assert!(!r.bernoulli_exact(&rat(0, 1)));
        let half = (0..n).filter(|_| r.bernoulli_exact(&rat(1, 2))).count() as f64 / n as f64;
        assert!((half - 0.5).abs() < 4.0 * (0.25 / n as f64).sqrt());
    }
}
