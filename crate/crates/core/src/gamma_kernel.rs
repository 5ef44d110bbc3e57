//! Gamma-ratio sequences and the telescoping sums built on them.
//!
//! The central object is
//!
//! ```text
//! c_n(xi) = Gamma(n + xi) / (Gamma(n) Gamma(xi + 1)),   xi > -1, n >= 1,
//! ```
//!
//! which satisfies `c_1 = 1` and `c_{n+1} = c_n (n + xi) / n`. The memory
//! weights of the walk are `mu_n = c_n(beta)`.
//!
//! Two independent routes are provided. [`c`] is a point evaluation that uses
//! an exact product for small `n` and an asymptotic expansion of
//! `ln Gamma(n + xi) - ln Gamma(n)` otherwise, so it costs O(1) for any `n`.
//! [`RatioSeq`] walks the recurrence and caches every term, switching to
//! compensated log-space accumulation past a threshold.

use crate::error::{domain, Result};
use crate::sum::Neumaier;

/// Largest `n` for which [`c`] multiplies the recurrence factors directly.
pub const DIRECT_PRODUCT_MAX: u64 = 32;

/// Default index past which [`RatioSeq`] accumulates in log space.
pub const DEFAULT_LOG_THRESHOLD: usize = 10_000;

/// Arguments below this are shifted up by the recurrence before the
/// asymptotic series is applied.
const ASYMPTOTIC_MIN: f64 = 15.0;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2k} / (2k (2k - 1))
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

// B_{2k} / (2k)
const DIGAMMA: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32_760.0,
    1.0 / 12.0,
];

fn stirling_series(z: f64) -> f64 {
    let zinv = 1.0 / z;
    let z2 = zinv * zinv;
    let mut acc = 0.0;
    for &coef in STIRLING.iter().rev() {
        acc = acc * z2 + coef;
    }
    acc * zinv
}

fn shift_for(x: f64) -> u32 {
    if x < ASYMPTOTIC_MIN {
        (ASYMPTOTIC_MIN - x).ceil() as u32
    } else {
        0
    }
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma needs x > 0, got {x}");
    let k = shift_for(x);
    let mut prod = 1.0;
    for j in 0..k {
        prod *= x + j as f64;
    }
    let z = x + k as f64;
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + stirling_series(z) - prod.ln()
}

/// `ln Gamma(z + delta) - ln Gamma(z)` without forming either term.
///
/// Accurate in absolute terms even when `z` is in the millions and `delta` is
/// O(1), where the naive difference of two log-gammas loses ~8 digits.
pub fn ln_gamma_ratio(z: f64, delta: f64) -> f64 {
    debug_assert!(z > 0.0 && z + delta > 0.0);
    if delta == 0.0 {
        return 0.0;
    }
    let k = shift_for(z.min(z + delta));
    let mut shift = Neumaier::new();
    for j in 0..k {
        shift.add((delta / (z + j as f64)).ln_1p());
    }
    let zz = z + k as f64;
    let core = (zz + delta - 0.5) * (delta / zz).ln_1p() + delta * zz.ln() - delta
        + (stirling_series(zz + delta) - stirling_series(zz));
    core - shift.value()
}

/// Digamma function for `x > 0`.
pub fn digamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let k = shift_for(x);
    let mut shift = Neumaier::new();
    for j in 0..k {
        shift.add(1.0 / (x + j as f64));
    }
    let z = x + k as f64;
    let z2 = 1.0 / (z * z);
    let mut acc = 0.0;
    for &coef in DIGAMMA.iter().rev() {
        acc = acc * z2 + coef;
    }
    z.ln() - 0.5 / z - acc * z2 - shift.value()
}

fn check_xi(xi: f64) -> Result<()> {
    if !(xi.is_finite() && xi > -1.0) {
        return domain(format!("exponent must be finite and > -1, got {xi}"));
    }
    Ok(())
}

fn check_n(n: u64) -> Result<()> {
    if n < 1 {
        return domain("index n must be >= 1");
    }
    Ok(())
}

fn direct_product(n: u64, xi: f64) -> f64 {
    let mut v = 1.0;
    for k in 1..n {
        let k = k as f64;
        v *= (k + xi) / k;
    }
    v
}

/// `ln c_n(xi)`.
pub fn ln_c(n: u64, xi: f64) -> Result<f64> {
    check_n(n)?;
    check_xi(xi)?;
    Ok(ln_c_unchecked(n, xi))
}

#[inline]
pub(crate) fn ln_c_unchecked(n: u64, xi: f64) -> f64 {
    if xi == 0.0 {
        0.0
    } else if n <= DIRECT_PRODUCT_MAX {
        direct_product(n, xi).ln()
    } else {
        ln_gamma_ratio(n as f64, xi) - ln_gamma(xi + 1.0)
    }
}

/// `c_n(xi) = Gamma(n + xi) / (Gamma(n) Gamma(xi + 1))`.
pub fn c(n: u64, xi: f64) -> Result<f64> {
    check_n(n)?;
    check_xi(xi)?;
    Ok(c_unchecked(n, xi))
}

#[inline]
pub(crate) fn c_unchecked(n: u64, xi: f64) -> f64 {
    if xi == 0.0 {
        1.0
    } else if n <= DIRECT_PRODUCT_MAX {
        direct_product(n, xi)
    } else {
        ln_c_unchecked(n, xi).exp()
    }
}

/// `ln(c_hi(xi) / c_lo(xi))` for `1 <= lo <= hi`.
///
/// Short ranges are summed term by term so that ratios close to one keep full
/// relative precision.
pub fn ln_c_ratio(lo: u64, hi: u64, xi: f64) -> f64 {
    debug_assert!(lo >= 1 && lo <= hi);
    if lo == hi || xi == 0.0 {
        return 0.0;
    }
    if hi - lo <= 256 {
        let mut s = Neumaier::new();
        for m in lo..hi {
            s.add((xi / m as f64).ln_1p());
        }
        s.value()
    } else {
        ln_gamma_ratio(hi as f64, xi) - ln_gamma_ratio(lo as f64, xi)
    }
}

/// `sum_{k=n_lo}^{n_hi} Gamma(k + a) / Gamma(k + b)` by telescoping.
///
/// Requires `a > -1`, `b >= 0`, `b != a + 1` and `1 <= n_lo <= n_hi`. The
/// lower boundary term vanishes when `n_lo - 1 + b = 0` (`1/Gamma(0) = 0`).
pub fn gamma_ratio_sum(a: f64, b: f64, n_lo: u64, n_hi: u64) -> Result<f64> {
    if !(a.is_finite() && a > -1.0) {
        return domain(format!("a must be > -1, got {a}"));
    }
    if !(b.is_finite() && b >= 0.0) {
        return domain(format!("b must be >= 0, got {b}"));
    }
    let denom = a - b + 1.0;
    if denom == 0.0 {
        return domain(format!("b = a + 1 (a = {a}, b = {b}) makes the telescoping sum singular"));
    }
    if n_lo < 1 || n_lo > n_hi {
        return domain(format!("need 1 <= n_lo <= n_hi, got {n_lo}..={n_hi}"));
    }
    let upper = ln_gamma_ratio(n_hi as f64 + b, denom).exp();
    let lower_arg = (n_lo - 1) as f64 + b;
    let lower = if n_lo == 1 && b == 0.0 {
        0.0
    } else {
        ln_gamma_ratio(lower_arg, denom).exp()
    };
    Ok((upper - lower) / denom)
}

/// `sum_{k=1}^{n-1} c_k(x) / (k c_{k+1}(y))` in closed form.
pub fn bercu_variant_sum(x: f64, y: f64, n: u64) -> Result<f64> {
    check_xi(x)?;
    check_xi(y)?;
    if n < 2 {
        return domain(format!("n must be >= 2, got {n}"));
    }
    if x == y {
        Ok(harmonic_shifted(x, n - 1))
    } else {
        let log_ratio = ln_c_unchecked(n, x) - ln_c_unchecked(n, y);
        Ok(log_ratio.exp_m1() / (x - y))
    }
}

/// `sum_{k=1}^{m} 1 / (k + x)` for `x > -1`.
pub fn harmonic_shifted(x: f64, m: u64) -> f64 {
    if m <= 4096 {
        let mut s = Neumaier::new();
        for k in 1..=m {
            s.add(1.0 / (k as f64 + x));
        }
        s.value()
    } else {
        digamma(m as f64 + 1.0 + x) - digamma(1.0 + x)
    }
}

/// A lazily extended, cached sequence `c_1(xi), c_2(xi), ...`.
///
/// Terms up to `log_threshold` are products of the recurrence factors; later
/// terms are accumulated as `ln c_{m+1} = ln c_m + ln(1 + xi/m)` with
/// compensated summation. Extension needs `&mut self`; share a fully
/// extended sequence across threads behind an `Arc`.
#[derive(Debug, Clone)]
pub struct RatioSeq {
    xi: f64,
    values: Vec<f64>,
    log_values: Vec<f64>,
    log_threshold: usize,
    log_acc: Neumaier,
}

impl RatioSeq {
    pub fn new(xi: f64) -> Result<Self> {
        Self::with_log_threshold(xi, DEFAULT_LOG_THRESHOLD)
    }

    pub fn with_log_threshold(xi: f64, log_threshold: usize) -> Result<Self> {
        check_xi(xi)?;
        Ok(Self {
            xi,
            values: vec![1.0],
            log_values: vec![0.0],
            log_threshold: log_threshold.max(1),
            log_acc: Neumaier::new(),
        })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Number of cached terms; `c_1..=c_len` are available.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn extend_to(&mut self, n: usize) {
        self.values.reserve(n.saturating_sub(self.values.len()));
        self.log_values.reserve(n.saturating_sub(self.log_values.len()));
        while self.values.len() < n {
            let m = self.values.len();
            let mf = m as f64;
            if m < self.log_threshold {
                let v = self.values[m - 1] * (mf + self.xi) / mf;
                self.values.push(v);
                self.log_values.push(v.ln());
            } else {
                if m == self.log_threshold {
                    self.log_acc = Neumaier::starting_at(self.log_values[m - 1]);
                }
                self.log_acc.add((self.xi / mf).ln_1p());
                let lv = self.log_acc.value();
                self.log_values.push(lv);
                self.values.push(lv.exp());
            }
        }
    }

    /// `c_n(xi)` if cached.
    pub fn get(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }

    pub fn ln_get(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.log_values.get(i).copied())
    }

    /// Cached value when available, point evaluation otherwise.
    pub fn value(&self, n: u64) -> f64 {
        match usize::try_from(n).ok().and_then(|i| self.get(i)) {
            Some(v) => v,
            None => c_unchecked(n, self.xi),
        }
    }

    /// The cached terms, index `i` holding `c_{i+1}`.
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!(ln_gamma(2.0).abs() < 1e-14);
        assert!(rel(ln_gamma(0.5), 0.5 * std::f64::consts::PI.ln()) < 1e-14);
        // ln(9!) = ln 362880
        assert!(rel(ln_gamma(10.0), 362_880f64.ln()) < 1e-14);
        assert!(rel(ln_gamma(1e-8), -(1e-8f64).ln() - 0.577_215_664_901_532_9e-8) < 1e-12);
    }

    #[test]
    fn digamma_known_values() {
        let euler = 0.577_215_664_901_532_9;
        assert!((digamma(1.0) + euler).abs() < 1e-14);
        // psi(n+1) = H_n - gamma
        let h10: f64 = (1..=10).map(|k| 1.0 / k as f64).sum();
        assert!((digamma(11.0) - (h10 - euler)).abs() < 1e-14);
    }

    #[test]
    fn c_trivial_cases() {
        for n in [1, 2, 7, 100, 1_000_000] {
            assert_eq!(c(n, 0.0).unwrap(), 1.0);
        }
        for beta in [-0.9, -0.5, 0.3, 1.0, 4.5] {
            assert!(rel(c(2, beta).unwrap(), 1.0 + beta) < 1e-15);
            assert_eq!(c(1, beta).unwrap(), 1.0);
        }
    }

    #[test]
    fn c_matches_high_precision_goldens() {
        // mpmath, 40 digits
        let cases = [
            (1000, 0.75, 193.470_266_288_832_228_177_857),
            (1_000_000, 0.75, 34_407.641_170_477_669_140_2),
            (10_000_000, -0.5, 1.784_124_183_057_428_954_885e-4),
            (10_000_000, 10.0, 2.755_744_323_216_214_752_673e63),
        ];
        for (n, xi, want) in cases {
            let got = c(n, xi).unwrap();
            assert!(rel(got, want) < 1e-12, "c({n}, {xi}) = {got}, want {want}");
        }
    }

    #[test]
    fn c_domain_errors() {
        assert!(c(0, 0.5).is_err());
        assert!(c(3, -1.0).is_err());
        assert!(c(3, -1.5).is_err());
        assert!(c(3, f64::NAN).is_err());
    }

    #[test]
    fn recurrence_matches_point_evaluation() {
        for xi in [-0.9, -0.5, 0.25, 0.75, 1.0, 3.0, 10.0] {
            let mut seq = RatioSeq::new(xi).unwrap();
            seq.extend_to(1_000_000);
            for n in [10usize, 1_000, 1_000_000] {
                let a = seq.get(n).unwrap();
                let b = c(n as u64, xi).unwrap();
                assert!(rel(a, b) < 1e-12, "xi={xi} n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn ratio_seq_ratio_invariant() {
        let mut seq = RatioSeq::with_log_threshold(1.7, 50).unwrap();
        seq.extend_to(200);
        assert_eq!(seq.get(1), Some(1.0));
        for n in 1..200 {
            let r = seq.get(n + 1).unwrap() / seq.get(n).unwrap();
            let want = (n as f64 + 1.7) / n as f64;
            assert!(rel(r, want) < 1e-13);
        }
        assert!(seq.get(0).is_none());
        assert!(seq.get(201).is_none());
        assert!(rel(seq.value(5000), c(5000, 1.7).unwrap()) < 1e-15);
    }

    #[test]
    fn gamma_ratio_sum_examples() {
        assert!((gamma_ratio_sum(0.0, 0.0, 1, 5).unwrap() - 5.0).abs() < 1e-12);
        assert!((gamma_ratio_sum(1.0, 0.0, 1, 3).unwrap() - 6.0).abs() < 1e-12);
        let direct: f64 = (2..=50u64)
            .map(|k| (ln_gamma(k as f64 + 0.5) - ln_gamma(k as f64 + 2.5)).exp())
            .sum();
        let closed = gamma_ratio_sum(0.5, 2.5, 2, 50).unwrap();
        assert!(rel(closed, direct) < 1e-12, "{closed} vs {direct}");
    }

    #[test]
    fn gamma_ratio_sum_rejects_singular_and_bad_ranges() {
        assert!(gamma_ratio_sum(0.5, 1.5, 1, 10).is_err());
        assert!(gamma_ratio_sum(-1.0, 0.0, 1, 10).is_err());
        assert!(gamma_ratio_sum(0.0, -0.1, 1, 10).is_err());
        assert!(gamma_ratio_sum(0.0, 0.0, 0, 10).is_err());
        assert!(gamma_ratio_sum(0.0, 0.0, 5, 4).is_err());
    }

    #[test]
    fn bercu_variant_examples() {
        let v = bercu_variant_sum(0.0, 0.0, 4).unwrap();
        assert!((v - 11.0 / 6.0).abs() < 1e-15);

        let direct: f64 = (1..10u64)
            .map(|k| c(k, 1.0).unwrap() / (k as f64 * c(k + 1, 0.0).unwrap()))
            .sum();
        let closed = bercu_variant_sum(1.0, 0.0, 10).unwrap();
        assert!(rel(closed, direct) < 1e-12);

        let direct: f64 = (1..100).map(|k| 1.0 / (k as f64 + 0.3)).sum();
        assert!(rel(bercu_variant_sum(0.3, 0.3, 100).unwrap(), direct) < 1e-13);
    }

    #[test]
    fn bercu_variant_branches_are_continuous() {
        for (x, n) in [(0.3, 100u64), (1.5, 10_000), (-0.4, 10_000)] {
            let eq = bercu_variant_sum(x, x, n).unwrap();
            let near = bercu_variant_sum(x + 1e-6, x, n).unwrap();
            assert!((eq - near).abs() < 1e-4, "x={x}: {eq} vs {near}");
        }
    }

    #[test]
    fn harmonic_branches_agree_at_switch() {
        for x in [-0.5, 0.0, 2.0] {
            let direct = {
                let mut s = Neumaier::new();
                for k in 1..=5000u64 {
                    s.add(1.0 / (k as f64 + x));
                }
                s.value()
            };
            assert!(rel(harmonic_shifted(x, 5000), direct) < 1e-13);
        }
    }

    #[test]
    fn ln_c_ratio_short_and_long_routes() {
        for xi in [-0.5, 1.0, 3.0] {
            for (lo, hi) in [(1u64, 2u64), (5, 200), (50, 10_050), (1000, 1_000_000)] {
                let want = ln_c(hi, xi).unwrap() - ln_c(lo, xi).unwrap();
                let got = ln_c_ratio(lo, hi, xi);
                assert!((got - want).abs() < 1e-12 * want.abs().max(1.0));
            }
        }
    }
}
