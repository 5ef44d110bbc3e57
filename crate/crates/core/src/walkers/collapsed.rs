use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{WalkKernel, STEP_PROB_SLACK};
use crate::error::{Error, Result};

/// The Markov state `(n, Xi_n, Sigma_n)` plus the compensator
/// `A_n = sum_{k<=n} E[X_k | F_{k-1}]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapsedState {
    pub n: u64,
    pub xi: u64,
    pub sigma: f64,
    pub a: f64,
}

impl Default for CollapsedState {
    fn default() -> Self {
        Self::initial()
    }
}

impl CollapsedState {
    /// State after the deterministic first step `X_1 = 1`.
    pub fn initial() -> Self {
        Self { n: 1, xi: 1, sigma: 1.0, a: 1.0 }
    }

    /// `P(X_{n+1} = 1 | F_n)`.
    #[inline]
    pub fn step_probability(&self, kernel: &WalkKernel) -> f64 {
        self.sigma * kernel.coef(self.n)
    }

    pub fn step<R: Rng + ?Sized>(&mut self, kernel: &WalkKernel, rng: &mut R) -> Result<bool> {
        let u = rng.random::<f64>();
        self.step_with_uniform(kernel, u)
    }

    /// Advances one step, taking `X_{n+1} = 1` iff `u < pi_n`.
    #[inline]
    pub fn step_with_uniform(&mut self, kernel: &WalkKernel, u: f64) -> Result<bool> {
        kernel.check_room(self.n)?;
        let pi = self.step_probability(kernel);
        let p = kernel.params().p();
        if pi > p + STEP_PROB_SLACK {
            return Err(Error::Consistency(format!(
                "step probability {pi} exceeds p = {p} at n = {}",
                self.n
            )));
        }
        let x = u < pi;
        if x {
            self.xi += 1;
            self.sigma += kernel.mu(self.n + 1);
        }
        self.a += pi;
        self.n += 1;
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, tag};
    use crate::walkers::ModelParams;

    #[test]
    fn first_step_probability_is_p() {
        for (p, beta) in [(0.3, -0.7), (0.5, 0.0), (0.8, 5.0)] {
            let k = WalkKernel::new(ModelParams::new(p, beta).unwrap(), 4).unwrap();
            let s = CollapsedState::initial();
            assert!((s.step_probability(&k) - p).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_memory_reduces_to_xi_over_n() {
        let k = WalkKernel::new(ModelParams::new(0.6, 0.0).unwrap(), 500).unwrap();
        let mut s = CollapsedState::initial();
        let mut rng = stream(1, tag::WALK, 0);
        for _ in 0..400 {
            let want = 0.6 * s.xi as f64 / s.n as f64;
            assert!((s.step_probability(&k) - want).abs() < 1e-15);
            s.step(&k, &mut rng).unwrap();
        }
    }

    #[test]
    fn all_ones_history_steps_with_probability_p() {
        let k = WalkKernel::new(ModelParams::new(0.4, 1.7).unwrap(), 100).unwrap();
        let mut s = CollapsedState::initial();
        for _ in 0..60 {
            assert!((s.step_probability(&k) - 0.4).abs() < 1e-12);
            assert!(s.step_with_uniform(&k, 0.0).unwrap());
        }
        assert_eq!(s.xi, 61);
    }

    #[test]
    fn refuses_to_step_past_horizon() {
        let k = WalkKernel::new(ModelParams::new(0.4, 1.0).unwrap(), 3).unwrap();
        let mut s = CollapsedState::initial();
        s.step_with_uniform(&k, 0.9).unwrap();
        s.step_with_uniform(&k, 0.9).unwrap();
        assert!(matches!(s.step_with_uniform(&k, 0.9), Err(Error::Domain(_))));
    }

    #[test]
    fn corrupted_sigma_trips_the_guard() {
        let k = WalkKernel::new(ModelParams::new(0.4, 1.0).unwrap(), 10).unwrap();
        let mut s = CollapsedState { n: 3, xi: 1, sigma: 100.0, a: 1.0 };
        assert!(matches!(s.step_with_uniform(&k, 0.5), Err(Error::Consistency(_))));
    }
}
