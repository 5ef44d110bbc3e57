//! The power-law memory distribution over past times `{1, ..., n}`.
//!
//! `P(k) = (beta + 1) / n * mu_k / mu_{n+1}` with `mu_k = c_k(beta)`. The
//! telescoping identity `sum_{k<=m} mu_k = m mu_{m+1} / (beta + 1)` gives the
//! closed-form CDF `F(m) = m mu_{m+1} / (n mu_{n+1})`, which the sampler
//! inverts by bisection.

use rand::Rng;

use crate::error::{domain, Result};
use crate::gamma_kernel::{self, RatioSeq};

#[derive(Debug, Clone, Copy)]
pub struct MemoryLaw<'a> {
    beta: f64,
    n: u64,
    table: Option<&'a [f64]>,
}

impl MemoryLaw<'static> {
    pub fn new(beta: f64, n: u64) -> Result<Self> {
        if !(beta.is_finite() && beta > -1.0) {
            return domain(format!("beta must be > -1, got {beta}"));
        }
        if n < 1 {
            return domain("history length n must be >= 1");
        }
        Ok(Self { beta, n, table: None })
    }
}

impl<'a> MemoryLaw<'a> {
    /// Law over `{1..=n}` that reads `mu_k` from a cached sequence, which
    /// must cover `mu_{n+1}`.
    pub fn with_table(seq: &'a RatioSeq, n: u64) -> Result<Self> {
        if n < 1 {
            return domain("history length n must be >= 1");
        }
        if (seq.len() as u64) < n + 1 {
            return domain(format!("mu table has {} terms, need {}", seq.len(), n + 1));
        }
        Ok(Self { beta: seq.xi(), n, table: Some(seq.as_slice()) })
    }

    pub(crate) fn from_slice(beta: f64, n: u64, mu: &'a [f64]) -> Self {
        debug_assert!(mu.len() as u64 > n);
        Self { beta, n, table: Some(mu) }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `mu_{hi} / mu_{lo}` for `lo <= hi`.
    fn mu_ratio(&self, lo: u64, hi: u64) -> f64 {
        match self.table {
            Some(mu) => mu[hi as usize - 1] / mu[lo as usize - 1],
            None => gamma_kernel::ln_c_ratio(lo, hi, self.beta).exp(),
        }
    }

    pub fn pmf(&self, k: u64) -> f64 {
        if k < 1 || k > self.n {
            return 0.0;
        }
        (self.beta + 1.0) / self.n as f64 / self.mu_ratio(k, self.n + 1)
    }

    /// `P(memory <= m)`.
    pub fn cdf(&self, m: u64) -> f64 {
        if m == 0 {
            0.0
        } else if m >= self.n {
            1.0
        } else {
            m as f64 / self.n as f64 / self.mu_ratio(m + 1, self.n + 1)
        }
    }

    /// Smallest `m` with `cdf(m) > u`, for `u` in `[0, 1)`.
    pub fn sample(&self, u: f64) -> u64 {
        let (mut lo, mut hi) = (1u64, self.n);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.cdf(mid) > u {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.sample(rng.random::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sum::compensated_sum;
    use proptest::prelude::*;

    #[test]
    fn pmf_examples() {
        let uni = MemoryLaw::new(0.0, 5).unwrap();
        assert!((uni.pmf(3) - 0.2).abs() < 1e-15);
        assert_eq!(MemoryLaw::new(0.7, 1).unwrap().pmf(1), 1.0);
        let l = MemoryLaw::new(1.0, 3).unwrap();
        assert!((l.pmf(2) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(l.pmf(0), 0.0);
        assert_eq!(l.pmf(4), 0.0);
    }

    #[test]
    fn cdf_examples() {
        for beta in [-0.5, 0.0, 2.0] {
            let l = MemoryLaw::new(beta, 17).unwrap();
            assert_eq!(l.cdf(17), 1.0);
            assert_eq!(l.cdf(0), 0.0);
        }
        assert!((MemoryLaw::new(0.0, 10).unwrap().cdf(4) - 0.4).abs() < 1e-15);
        let l = MemoryLaw::new(1.0, 3).unwrap();
        assert!((l.cdf(2) - 0.5).abs() < 1e-15);
        assert!((l.cdf(2) - (l.pmf(1) + l.pmf(2))).abs() < 1e-15);
    }

    #[test]
    fn sample_examples() {
        let single = MemoryLaw::new(3.0, 1).unwrap();
        for u in [0.0, 0.3, 0.999_999] {
            assert_eq!(single.sample(u), 1);
        }
        let uni = MemoryLaw::new(0.0, 4).unwrap();
        assert_eq!(uni.sample(0.6), 3);
        // boundary: cdf(2) = 0.5 is not > 0.5
        assert_eq!(uni.sample(0.5), 3);
        assert_eq!(uni.sample(0.0), 1);
    }

    #[test]
    fn normalization_grid() {
        for beta in [-0.9, -0.5, 0.0, 0.5, 1.0, 3.0] {
            for n in [1u64, 2, 10, 1_000, 1_000_000] {
                let l = MemoryLaw::new(beta, n).unwrap();
                let total = compensated_sum((1..=n).map(|k| l.pmf(k)));
                assert!((total - 1.0).abs() < 1e-12, "beta={beta} n={n}: {total}");
            }
        }
    }

    #[test]
    fn table_and_point_evaluation_agree() {
        let mut seq = RatioSeq::new(1.3).unwrap();
        seq.extend_to(5001);
        let t = MemoryLaw::with_table(&seq, 5000).unwrap();
        let p = MemoryLaw::new(1.3, 5000).unwrap();
        for k in [1, 2, 17, 2500, 4999, 5000] {
            assert!((t.pmf(k) / p.pmf(k) - 1.0).abs() < 1e-12);
            assert!((t.cdf(k) - p.cdf(k)).abs() < 1e-12);
        }
        assert!(MemoryLaw::with_table(&seq, 5001).is_err());
    }

    #[test]
    fn pmf_monotonicity_follows_sign_of_beta() {
        let up = MemoryLaw::new(0.8, 50).unwrap();
        let down = MemoryLaw::new(-0.4, 50).unwrap();
        let flat = MemoryLaw::new(0.0, 50).unwrap();
        for k in 1..50 {
            assert!(up.pmf(k + 1) > up.pmf(k));
            assert!(down.pmf(k + 1) < down.pmf(k));
            assert!((flat.pmf(k + 1) - flat.pmf(k)).abs() < 1e-16);
        }
    }

    proptest! {
        #[test]
        fn cdf_is_partial_sum(beta in -0.9f64..3.0, n in 1u64..3000, frac in 0.0f64..1.0) {
            let l = MemoryLaw::new(beta, n).unwrap();
            let m = ((n as f64) * frac) as u64;
            let partial = compensated_sum((1..=m).map(|k| l.pmf(k)));
            prop_assert!((l.cdf(m) - partial).abs() < 1e-12);
        }

        #[test]
        fn sample_is_monotone_in_u(beta in -0.9f64..3.0, n in 1u64..100_000, u in 0.0f64..1.0, v in 0.0f64..1.0) {
            let l = MemoryLaw::new(beta, n).unwrap();
            let (a, b) = if u <= v { (u, v) } else { (v, u) };
            let (ka, kb) = (l.sample(a), l.sample(b));
            prop_assert!(ka <= kb);
            prop_assert!((1..=n).contains(&ka));
            prop_assert!(l.cdf(ka) > a);
            prop_assert!(l.cdf(ka - 1) <= a);
        }
    }
}
