//! Exhaustive enumeration of all `2^{n-1}` histories of a short walk.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gamma_kernel;
use crate::sum::Neumaier;
use crate::walkers::ModelParams;

pub const MAX_ENUMERATION_STEPS: u64 = 16;

/// Exact law of `Xi_n`; `probs[k - 1] = P(Xi_n = k)` for `k` in `1..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactLaw {
    pub n: u64,
    pub probs: Vec<f64>,
}

impl ExactLaw {
    pub fn prob(&self, k: u64) -> f64 {
        if k < 1 || k > self.n {
            0.0
        } else {
            self.probs[k as usize - 1]
        }
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().copied().collect::<Neumaier>().value()
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(i, &q)| (i + 1) as f64 * q).collect::<Neumaier>().value()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Enumeration {
    pub law: ExactLaw,
    pub degree: usize,
    /// `E[Xi^a Sigma^b]` at `a * (degree + 1) + b`.
    moments: Vec<f64>,
}

impl Enumeration {
    pub fn moment(&self, a: usize, b: usize) -> f64 {
        assert!(a + b <= self.degree, "moment ({a}, {b}) exceeds degree {}", self.degree);
        self.moments[a * (self.degree + 1) + b]
    }
}

struct Walker<'a> {
    n: u64,
    rate: f64,
    mu: &'a [f64],
    degree: usize,
    law: Vec<Neumaier>,
    moments: Vec<Neumaier>,
}

impl Walker<'_> {
    // `m` steps taken so far.
    fn descend(&mut self, m: u64, xi: u64, sigma: f64, prob: f64) {
        if prob == 0.0 {
            return;
        }
        if m == self.n {
            self.law[xi as usize - 1].add(prob);
            let d = self.degree;
            let mut xa = 1.0;
            for a in 0..=d {
                let mut sb = 1.0;
                for b in 0..=d - a {
                    self.moments[a * (d + 1) + b].add(prob * xa * sb);
                    sb *= sigma;
                }
                xa *= xi as f64;
            }
            return;
        }
        let mu_next = self.mu[m as usize];
        let pi = (self.rate * sigma / (m as f64 * mu_next)).min(1.0);
        self.descend(m + 1, xi, sigma, prob * (1.0 - pi));
        self.descend(m + 1, xi + 1, sigma + mu_next, prob * pi);
    }
}

/// Exact law of `Xi_n` and all moments `E[Xi_n^a Sigma_n^b]` with
/// `a + b <= degree`, by summing over every history `(X_2, ..., X_n)`.
pub fn enumerate_law(params: &ModelParams, n: u64, degree: usize) -> Result<Enumeration> {
    if n > MAX_ENUMERATION_STEPS {
        return Err(Error::Size { what: "enumeration steps", got: n, limit: MAX_ENUMERATION_STEPS });
    }
    if n < 2 {
        return domain(format!("enumeration needs n >= 2, got {n}"));
    }
    let beta = params.beta();
    let mu: Vec<f64> = (1..=n).map(|k| gamma_kernel::c_unchecked(k, beta)).collect();
    let width = (degree + 1) * (degree + 1);
    let mut w = Walker {
        n,
        rate: params.rate(),
        mu: &mu,
        degree,
        law: vec![Neumaier::new(); n as usize],
        moments: vec![Neumaier::new(); width],
    };
    w.descend(1, 1, 1.0, 1.0);
    Ok(Enumeration {
        law: ExactLaw { n, probs: w.law.iter().map(Neumaier::value).collect() },
        degree,
        moments: w.moments.iter().map(Neumaier::value).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_engine::{exact_mean_xi, propagate_moments};

    fn params(p: f64, beta: f64) -> ModelParams {
        ModelParams::new(p, beta).unwrap()
    }

    #[test]
    fn two_steps() {
        let e = enumerate_law(&params(0.3, 1.7), 2, 1).unwrap();
        assert!((e.law.prob(2) - 0.3).abs() < 1e-15);
        assert!((e.law.prob(1) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn size_and_domain_errors() {
        let pr = params(0.5, 1.0);
        assert!(matches!(enumerate_law(&pr, 17, 1), Err(Error::Size { .. })));
        assert!(enumerate_law(&pr, 1, 1).is_err());
        assert!(enumerate_law(&pr, 16, 1).is_ok());
    }

    #[test]
    fn law_is_normalized_and_mean_is_exact() {
        for p in [0.2, 0.5, 0.8] {
            for beta in [-0.5, 0.0, 0.5, p / (1.0 - p), 2.0] {
                let pr = params(p, beta);
                for n in [2u64, 5, 11, 16] {
                    let e = enumerate_law(&pr, n, 1).unwrap();
                    assert!((e.law.total() - 1.0).abs() < 1e-12);
                    assert_eq!(e.law.probs.len() as u64, n);
                    assert!((e.law.mean() - exact_mean_xi(n, &pr)).abs() < 1e-12);
                    assert!((e.moment(1, 0) - e.law.mean()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn second_moments_match_propagator() {
        let pr = params(0.5, 1.0);
        let e = enumerate_law(&pr, 12, 2).unwrap();
        let t = &propagate_moments(&pr, 12, 2, &[12]).unwrap()[0];
        for (a, b) in [(2, 0), (1, 1), (0, 2), (0, 1)] {
            let (x, y) = (e.moment(a, b), t.moment(a, b));
            assert!(((x - y) / y).abs() < 1e-12, "({a},{b}): {x} vs {y}");
        }
    }
}
