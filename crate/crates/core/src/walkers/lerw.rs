use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// The laziest elephant random walk with uniform memory and retention `rate`:
/// `P(X'_{n+1} = 1 | F'_n) = rate * Xi'_n / n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LerwState {
    pub n: u64,
    pub xi: u64,
}

impl Default for LerwState {
    fn default() -> Self {
        Self::initial()
    }
}

impl LerwState {
    pub fn initial() -> Self {
        Self { n: 1, xi: 1 }
    }

    #[inline]
    pub fn step_probability(&self, rate: f64) -> f64 {
        self.xi as f64 * (rate / self.n as f64)
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rate: f64, rng: &mut R) -> Result<bool> {
        let u = rng.random::<f64>();
        self.step_with_uniform(rate, u)
    }

    pub fn step_with_uniform(&mut self, rate: f64, u: f64) -> Result<bool> {
        if !(rate > 0.0 && rate < 1.0) {
            return domain(format!("LERW rate must lie in (0, 1), got {rate}"));
        }
        let x = u < self.step_probability(rate);
        if x {
            self.xi += 1;
        }
        self.n += 1;
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_with_probability_rate() {
        let mut s = LerwState::initial();
        assert!(s.step_with_uniform(0.35, 0.3499).unwrap());
        let mut s = LerwState::initial();
        assert!(!s.step_with_uniform(0.35, 0.35).unwrap());
        assert_eq!(s, LerwState { n: 2, xi: 1 });
    }

    #[test]
    fn rate_domain() {
        let mut s = LerwState::initial();
        assert!(s.step_with_uniform(0.0, 0.5).is_err());
        assert!(s.step_with_uniform(1.0, 0.5).is_err());
        assert!(s.step_with_uniform(-0.2, 0.5).is_err());
    }
}
