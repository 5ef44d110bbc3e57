use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{CollapsedState, FullState, LerwState, ModelParams, WalkKernel};
use crate::error::{domain, Error, Result};
use crate::gamma_kernel;
use crate::rng::{stream, tag};
use crate::sum::Neumaier;

/// Where a trajectory is sampled. Every policy also reports `n = 1` and the
/// final step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Checkpoints {
    /// `n = ceil(ratio^j)`, `j = 0, 1, ...`
    Geometric { ratio: f64 },
    /// Every `every`-th step.
    Linear { every: u64 },
    Explicit(Vec<u64>),
}

impl Default for Checkpoints {
    fn default() -> Self {
        Checkpoints::Geometric { ratio: 1.2 }
    }
}

impl Checkpoints {
    /// Sorted, deduplicated checkpoints within `[1, n_max]`.
    pub fn expand(&self, n_max: u64) -> Result<Vec<u64>> {
        if n_max < 1 {
            return domain("n_max must be >= 1");
        }
        let mut out = vec![1, n_max];
        match self {
            Checkpoints::Geometric { ratio } => {
                if !(ratio.is_finite() && *ratio > 1.0) {
                    return domain(format!("geometric ratio must be > 1, got {ratio}"));
                }
                let mut x = 1.0f64;
                while x.ceil() <= n_max as f64 {
                    out.push(x.ceil() as u64);
                    x *= ratio;
                }
            }
            Checkpoints::Linear { every } => {
                if *every == 0 {
                    return domain("linear checkpoint spacing must be >= 1");
                }
                out.extend((1..=n_max / every).map(|j| j * every));
            }
            Checkpoints::Explicit(ns) => {
                out.extend(ns.iter().copied().filter(|&n| n >= 1 && n <= n_max));
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

/// One trajectory sample `(n, Xi_n, Sigma_n, M_n, A_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRow {
    pub n: u64,
    pub xi: u64,
    pub sigma: f64,
    pub m: f64,
    pub a: f64,
}

fn martingale(params: &ModelParams, n: u64, sigma: f64) -> f64 {
    sigma / gamma_kernel::c_unchecked(n, params.rate())
}

fn validate_checkpoints(checkpoints: &[u64], n_steps: u64) -> Result<()> {
    if n_steps < 1 {
        return domain("n_steps must be >= 1");
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return domain("checkpoints must be strictly increasing");
    }
    if checkpoints.first().is_some_and(|&n| n < 1) || checkpoints.last().is_some_and(|&n| n > n_steps) {
        return domain(format!("checkpoints must lie in [1, {n_steps}]"));
    }
    Ok(())
}

/// Runs the collapsed chain to `n_steps`, sampling at `checkpoints`
/// (strictly increasing, within `[1, n_steps]`).
pub fn run_collapsed<R: Rng + ?Sized>(
    kernel: &WalkKernel,
    n_steps: u64,
    checkpoints: &[u64],
    rng: &mut R,
) -> Result<Vec<CheckpointRow>> {
    validate_checkpoints(checkpoints, n_steps)?;
    let params = *kernel.params();
    let mut rows = Vec::with_capacity(checkpoints.len());
    let mut s = CollapsedState::initial();
    for &target in checkpoints {
        while s.n < target {
            s.step(kernel, rng)?;
        }
        rows.push(CheckpointRow { n: s.n, xi: s.xi, sigma: s.sigma, m: martingale(&params, s.n, s.sigma), a: s.a });
    }
    Ok(rows)
}

/// Full-history counterpart of [`run_collapsed`]. `A_n` is accumulated from
/// the exact conditional probability of each step.
pub fn run_full<R: Rng + ?Sized>(
    kernel: &WalkKernel,
    n_steps: u64,
    checkpoints: &[u64],
    rng: &mut R,
) -> Result<Vec<CheckpointRow>> {
    validate_checkpoints(checkpoints, n_steps)?;
    let params = *kernel.params();
    let mut rows = Vec::with_capacity(checkpoints.len());
    let mut s = FullState::initial();
    let mut a = Neumaier::starting_at(1.0);
    for &target in checkpoints {
        while s.n() < target {
            a.add(s.sigma() * kernel.coef(s.n()));
            s.step(kernel, rng)?;
        }
        rows.push(CheckpointRow {
            n: s.n(),
            xi: s.xi(),
            sigma: s.sigma(),
            m: martingale(&params, s.n(), s.sigma()),
            a: a.value(),
        });
    }
    Ok(rows)
}

/// Single collapsed walk, deterministic in `seed`.
pub fn run_walk(params: ModelParams, n_steps: u64, seed: u64, checkpoints: &Checkpoints) -> Result<Vec<CheckpointRow>> {
    let kernel = WalkKernel::new(params, n_steps)?;
    let cps = checkpoints.expand(n_steps)?;
    let mut rng = stream(seed, tag::WALK, 0);
    run_collapsed(&kernel, n_steps, &cps, &mut rng)
}

/// Deterministic lower bounds `1 + p sum_{k=2}^n P(memory_k = 1)` on the
/// compensator `A_n`, at each checkpoint. Every step recalls time 1 with at
/// least this probability because `X_1 = 1`.
pub fn a_lower_bounds(kernel: &WalkKernel, checkpoints: &[u64]) -> Vec<f64> {
    let params = kernel.params();
    let (p, b1) = (params.p(), params.beta() + 1.0);
    let mut acc = Neumaier::starting_at(1.0);
    let mut k = 1u64;
    checkpoints
        .iter()
        .map(|&n| {
            while k < n {
                k += 1;
                acc.add(p * b1 / ((k - 1) as f64 * kernel.mu(k)));
            }
            acc.value()
        })
        .collect()
}

/// Which pathwise order the coupling guarantees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingOrder {
    /// `beta < 0`: `Xi_n >= Xi'_n`.
    WalkAboveLerw,
    /// `beta > 0`: `Xi_n <= Xi'_n`.
    WalkBelowLerw,
    /// `beta = 0`: identical chains.
    Equal,
}

impl CouplingOrder {
    pub fn for_beta(beta: f64) -> Self {
        if beta < 0.0 {
            CouplingOrder::WalkAboveLerw
        } else if beta > 0.0 {
            CouplingOrder::WalkBelowLerw
        } else {
            CouplingOrder::Equal
        }
    }

    fn holds(&self, xi: u64, xi_lerw: u64) -> bool {
        match self {
            CouplingOrder::WalkAboveLerw => xi >= xi_lerw,
            CouplingOrder::WalkBelowLerw => xi <= xi_lerw,
            CouplingOrder::Equal => xi == xi_lerw,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoupledRow {
    pub n: u64,
    pub xi: u64,
    pub xi_lerw: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledRun {
    pub order: CouplingOrder,
    pub rows: Vec<CoupledRow>,
    /// Largest `|Xi_n - Xi'_n|` seen over all steps.
    pub max_gap: u64,
}

/// Drives the walk and the comparison LERW (rate `p (beta + 1)`) from one
/// shared uniform per step and checks the pathwise order after every step.
pub fn coupled_run_with<R: Rng + ?Sized>(
    kernel: &WalkKernel,
    n_steps: u64,
    checkpoints: &[u64],
    rng: &mut R,
) -> Result<CoupledRun> {
    validate_checkpoints(checkpoints, n_steps)?;
    let params = *kernel.params();
    let rate = params.rate();
    if rate >= 1.0 {
        return domain(format!("comparison LERW needs p(beta+1) < 1, got {rate}"));
    }
    let order = CouplingOrder::for_beta(params.beta());
    let mut walk = CollapsedState::initial();
    let mut lerw = LerwState::initial();
    let mut rows = Vec::with_capacity(checkpoints.len());
    let mut max_gap = 0;
    for &target in checkpoints {
        while walk.n < target {
            let u = rng.random::<f64>();
            walk.step_with_uniform(kernel, u)?;
            lerw.step_with_uniform(rate, u)?;
            if !order.holds(walk.xi, lerw.xi) {
                return Err(Error::Consistency(format!(
                    "coupling order {order:?} violated at n = {}: Xi = {}, Xi' = {}",
                    walk.n, walk.xi, lerw.xi
                )));
            }
            max_gap = max_gap.max(walk.xi.abs_diff(lerw.xi));
        }
        rows.push(CoupledRow { n: walk.n, xi: walk.xi, xi_lerw: lerw.xi });
    }
    Ok(CoupledRun { order, rows, max_gap })
}

pub fn coupled_run(params: ModelParams, n_steps: u64, seed: u64, checkpoints: &Checkpoints) -> Result<CoupledRun> {
    let kernel = WalkKernel::new(params, n_steps)?;
    let cps = checkpoints.expand(n_steps)?;
    let mut rng = stream(seed, tag::COUPLING, 0);
    coupled_run_with(&kernel, n_steps, &cps, &mut rng)
}
