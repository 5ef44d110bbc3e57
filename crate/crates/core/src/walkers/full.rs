use rand::Rng;

use super::WalkKernel;
use crate::error::Result;
use crate::sum::Neumaier;

/// Full-history simulator. O(n) memory and O(log n) per step.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    history: Vec<bool>,
    xi: u64,
    sigma: f64,
}

impl Default for FullState {
    fn default() -> Self {
        Self::initial()
    }
}

impl FullState {
    pub fn initial() -> Self {
        Self { history: vec![true], xi: 1, sigma: 1.0 }
    }

    pub fn n(&self) -> u64 {
        self.history.len() as u64
    }

    pub fn xi(&self) -> u64 {
        self.xi
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `X_1, ..., X_n`.
    pub fn history(&self) -> &[bool] {
        &self.history
    }

    /// Draws the memory index, then the retention coin.
    pub fn step<R: Rng + ?Sized>(&mut self, kernel: &WalkKernel, rng: &mut R) -> Result<bool> {
        let u_mem = rng.random::<f64>();
        let u_coin = rng.random::<f64>();
        self.step_with_uniforms(kernel, u_mem, u_coin)
    }

    pub fn step_with_uniforms(&mut self, kernel: &WalkKernel, u_mem: f64, u_coin: f64) -> Result<bool> {
        let n = self.n();
        kernel.check_room(n)?;
        let k = kernel.memory_law(n).sample(u_mem);
        let x = u_coin < kernel.params().p() && self.history[k as usize - 1];
        self.history.push(x);
        if x {
            self.xi += 1;
            self.sigma += kernel.mu(n + 1);
        }
        Ok(x)
    }

    /// `p * sum_{k : X_k = 1} P(memory = k)`, evaluated from the history.
    pub fn exact_step_probability(&self, kernel: &WalkKernel) -> f64 {
        let law = kernel.memory_law(self.n());
        let mut s = Neumaier::new();
        for (i, &x) in self.history.iter().enumerate() {
            if x {
                s.add(law.pmf(i as u64 + 1));
            }
        }
        kernel.params().p() * s.value()
    }

    /// `sum_k X_k mu_k` recomputed from scratch.
    pub fn recomputed_sigma(&self, kernel: &WalkKernel) -> f64 {
        let mut s = Neumaier::new();
        for (i, &x) in self.history.iter().enumerate() {
            if x {
                s.add(kernel.mu(i as u64 + 1));
            }
        }
        s.value()
    }
}
