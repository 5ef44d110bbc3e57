//! Simulators for the lazy walk with power-law memory.
//!
//! The walk starts from `X_1 = 1`. At step `n + 1` a past time `k` is drawn
//! from the memory law over `{1..=n}` and `X_{n+1} = X_k` with probability
//! `p`, otherwise `X_{n+1} = 0`. Averaging over the recalled time shows
//!
//! ```text
//! P(X_{n+1} = 1 | history) = p (beta + 1) Sigma_n / (n mu_{n+1}),
//! Sigma_n = sum_k X_k mu_k,
//! ```
//!
//! so `(n, Xi_n, Sigma_n)` is a Markov chain. [`CollapsedState`] simulates
//! that chain in O(1) per step and is the production simulator;
//! [`FullState`] keeps the whole history and is retained as a differential
//! oracle.

mod collapsed;
mod full;
mod lerw;
mod run;

pub use collapsed::CollapsedState;
pub use full::FullState;
pub use lerw::LerwState;
pub use run::{
    a_lower_bounds, coupled_run, coupled_run_with, run_collapsed, run_full, run_walk, Checkpoints,
    CheckpointRow, CoupledRow, CoupledRun, CouplingOrder,
};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gamma_kernel::RatioSeq;
use crate::memory_law::MemoryLaw;

/// Tolerance for deciding `beta == p / (1 - p)`.
pub const CRITICAL_TOL: f64 = 1e-12;

/// Slack allowed above `p` in a computed step probability before the
/// collapsed chain reports an internal inconsistency.
pub const STEP_PROB_SLACK: f64 = 1e-9;

/// Retention probability `p` and memory exponent `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    p: f64,
    beta: f64,
}

#[derive(Deserialize)]
struct RawParams {
    p: f64,
    beta: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        ModelParams::new(raw.p, raw.beta)
    }
}

impl ModelParams {
    pub fn new(p: f64, beta: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return domain(format!("p must lie in (0, 1), got {p}"));
        }
        if !(beta.is_finite() && beta > -1.0) {
            return domain(format!("beta must be finite and > -1, got {beta}"));
        }
        Ok(Self { p, beta })
    }

    /// Parameters on the critical line `beta = p / (1 - p)`.
    pub fn critical(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return domain(format!("p must lie in (0, 1), got {p}"));
        }
        Self::new(p, p / (1.0 - p))
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `p (beta + 1)`, the growth rate of `E[Sigma_n]`.
    pub fn rate(&self) -> f64 {
        self.p * (self.beta + 1.0)
    }

    pub fn critical_beta(&self) -> f64 {
        self.p / (1.0 - self.p)
    }

    pub fn is_critical(&self) -> bool {
        (self.beta - self.critical_beta()).abs() <= CRITICAL_TOL
    }

    /// `p (beta + 1) - beta`.
    pub fn growth_exponent(&self) -> f64 {
        self.rate() - self.beta
    }
}

/// Tables of `mu_k` and the step coefficients `p (beta + 1) / (n mu_{n+1})`
/// for a fixed horizon. Built once and shared read-only by every replicate.
#[derive(Debug, Clone)]
pub struct WalkKernel {
    params: ModelParams,
    n_max: u64,
    mu: Vec<f64>,
    coef: Vec<f64>,
}

impl WalkKernel {
    /// Kernel supporting walks up to `n_max` steps.
    pub fn new(params: ModelParams, n_max: u64) -> Result<Self> {
        if n_max < 1 {
            return domain("n_max must be >= 1");
        }
        let len = usize::try_from(n_max + 1)
            .map_err(|_| Error::Domain(format!("n_max {n_max} too large")))?;
        let mut seq = RatioSeq::new(params.beta)?;
        seq.extend_to(len);
        let mu = seq.as_slice().to_vec();
        let r = params.rate();
        let mut coef = vec![0.0; len];
        for n in 1..len {
            coef[n] = r / (n as f64 * mu[n]);
        }
        Ok(Self { params, n_max, mu, coef })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    /// `mu_k` for `1 <= k <= n_max + 1`.
    #[inline]
    pub fn mu(&self, k: u64) -> f64 {
        self.mu[k as usize - 1]
    }

    /// `p (beta + 1) / (n mu_{n+1})` for `1 <= n <= n_max`.
    #[inline]
    pub fn coef(&self, n: u64) -> f64 {
        self.coef[n as usize]
    }

    /// Memory law over `{1..=n}` backed by this kernel's table.
    pub fn memory_law(&self, n: u64) -> MemoryLaw<'_> {
        assert!(n >= 1 && n <= self.n_max, "memory law index {n} outside kernel range");
        MemoryLaw::from_slice(self.params.beta, n, &self.mu)
    }

    pub(crate) fn check_room(&self, n: u64) -> Result<()> {
        if n >= self.n_max {
            return domain(format!("walk at n = {n} cannot step past kernel horizon {}", self.n_max));
        }
        Ok(())
    }
}
