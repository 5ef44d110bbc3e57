//! Multi-type branching process dominating the occupied times for `beta > 0`.
//!
//! A particle of type `k` has a child of type `y > k` with probability
//! `q(k, y) = p P(beta_y = k) = p(beta+1)/(y-1) * mu_k/mu_y`, independently
//! over `y`. The expected number of children is `m = p(beta+1)/beta` for
//! every type, and
//!
//! ```text
//! sum_{y=k+1}^{K} q(k, y) = m (1 - mu_k / mu_K).
//! ```
//!
//! Types beyond the cutoff `K*(k)`, where the remaining mass
//! `m mu_k / mu_K` first drops to `epsilon`, are never produced; the skipped
//! mass is accounted for in `truncation_mass`.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::gamma_kernel::{ln_c_ratio, ln_c_unchecked, ln_gamma, RatioSeq};
use crate::walkers::ModelParams;

pub const DEFAULT_EPSILON: f64 = 1e-8;
pub const DEFAULT_MAX_GEN: u64 = 10_000;
pub const DEFAULT_MAX_POP: u64 = 1_000_000;

/// Particle types are integers; lineages grow roughly geometrically, so they
/// are held in `u128` and capped here.
pub const MAX_TYPE: Type = 1 << 127;

pub type Type = u128;

/// Beyond this the two-term asymptotic expansion of `ln mu_n` is exact to
/// rounding.
const EXACT_TYPE_MAX: Type = 1 << 53;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchingParams {
    model: ModelParams,
    epsilon: f64,
    max_gen: u64,
    max_pop: u64,
}

impl BranchingParams {
    pub fn new(p: f64, beta: f64) -> Result<Self> {
        Self::from_model(ModelParams::new(p, beta)?)
    }

    pub fn from_model(model: ModelParams) -> Result<Self> {
        if model.beta() <= 0.0 {
            return domain(format!("branching needs beta > 0, got {}", model.beta()));
        }
        Ok(Self { model, epsilon: DEFAULT_EPSILON, max_gen: DEFAULT_MAX_GEN, max_pop: DEFAULT_MAX_POP })
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return domain(format!("epsilon must be > 0, got {epsilon}"));
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    pub fn with_caps(mut self, max_gen: u64, max_pop: u64) -> Result<Self> {
        if max_gen < 1 || max_pop < 1 {
            return domain("generation and population caps must be >= 1");
        }
        self.max_gen = max_gen;
        self.max_pop = max_pop;
        Ok(self)
    }

    pub fn model(&self) -> &ModelParams {
        &self.model
    }

    pub fn p(&self) -> f64 {
        self.model.p()
    }

    pub fn beta(&self) -> f64 {
        self.model.beta()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn max_gen(&self) -> u64 {
        self.max_gen
    }

    pub fn max_pop(&self) -> u64 {
        self.max_pop
    }

    /// `m = p(beta+1)/beta`.
    pub fn mean_offspring(&self) -> f64 {
        self.model.rate() / self.beta()
    }

    /// `ln(mu_hi / mu_lo)`.
    fn ln_mu_ratio(&self, lo: Type, hi: Type) -> f64 {
        let beta = self.beta();
        let tail = |n: Type| {
            let x = n as f64;
            beta * x.ln() + beta * (beta - 1.0) / (2.0 * x) - ln_gamma(beta + 1.0)
        };
        if hi <= EXACT_TYPE_MAX {
            ln_c_ratio(lo as u64, hi as u64, beta)
        } else if lo <= EXACT_TYPE_MAX {
            tail(hi) - ln_c_unchecked(lo as u64, beta)
        } else {
            let (a, b) = (lo as f64, hi as f64);
            beta * ((hi - lo) as f64 / a).ln_1p() + beta * (beta - 1.0) / 2.0 * (1.0 / b - 1.0 / a)
        }
    }

    fn q(&self, k: Type, y: Type) -> f64 {
        self.model.rate() / (y - 1) as f64 * (-self.ln_mu_ratio(k, y)).exp()
    }

    /// `m mu_k / mu_big`.
    fn tail(&self, k: Type, big: Type) -> f64 {
        self.mean_offspring() * (-self.ln_mu_ratio(k, big)).exp()
    }
}

/// `q(k, y)`, the probability that a type-`k` particle has a type-`y` child.
pub fn offspring_rate(k: Type, y: Type, params: &BranchingParams) -> Result<f64> {
    if k < 1 || y <= k {
        return domain(format!("offspring rate needs 1 <= k < y, got k = {k}, y = {y}"));
    }
    Ok(params.q(k, y))
}

/// `sum_{y=k+1}^{big} q(k, y)` in closed form.
pub fn offspring_partial_sum(k: Type, big: Type, params: &BranchingParams) -> Result<f64> {
    if k < 1 || big <= k {
        return domain(format!("partial sum needs 1 <= k < K, got k = {k}, K = {big}"));
    }
    Ok(params.mean_offspring() * -(-params.ln_mu_ratio(k, big)).exp_m1())
}

/// Smallest `K > k` whose remaining mass is at most `epsilon`, capped at
/// [`MAX_TYPE`].
pub fn cutoff(k: Type, params: &BranchingParams) -> Type {
    if params.tail(k, MAX_TYPE) > params.epsilon {
        return MAX_TYPE;
    }
    let (mut lo, mut hi) = (k + 1, MAX_TYPE);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if params.tail(k, mid) <= params.epsilon {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Offspring {
    /// Child types, increasing.
    pub children: Vec<Type>,
    /// Expected number of children beyond the cutoff.
    pub truncation_mass: f64,
}

/// Children of one type-`k` particle.
///
/// The Bernoulli field over `y = k+1..=K*` is drawn by thinning: `q(k, .)`
/// is decreasing, so from a position `y` every later type is proposed with
/// probability `q(k, y)`, the gap to the next proposal is geometric, and a
/// proposal at `y'` is kept with probability `q(k, y') / q(k, y)`.
pub fn sample_offspring<R: Rng + ?Sized>(k: Type, params: &BranchingParams, rng: &mut R) -> Result<Offspring> {
    if k < 1 {
        return domain("particle types start at 1");
    }
    let big = cutoff(k, params);
    let truncation_mass = params.tail(k, big);
    let mut children = Vec::new();
    let mut y = k + 1;
    while y <= big {
        let bound = params.q(k, y);
        if bound <= 0.0 {
            break;
        }
        let u: f64 = 1.0 - rng.random::<f64>();
        let gap = (u.ln() / (-bound).ln_1p()).floor();
        if gap >= (big - y) as f64 + 1.0 {
            break;
        }
        let cand = y + gap as Type;
        if rng.random::<f64>() * bound < params.q(k, cand) {
            children.push(cand);
        }
        y = cand + 1;
    }
    Ok(Offspring { children, truncation_mass })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    /// 1 for the founder.
    pub generation: u64,
    pub types: Vec<Type>,
    /// Truncated offspring mass accumulated up to and including the births
    /// of this generation.
    pub truncation_mass: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Censoring {
    MaxGen,
    MaxPop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub generation: u64,
    pub count: u64,
    pub min_type: Type,
    pub max_type: Type,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchingRun {
    pub generations: Vec<Population>,
    /// `N_n` for each recorded generation.
    pub counts: Vec<u64>,
    pub extinct: bool,
    pub censored: Option<Censoring>,
    /// Sorted distinct particle types over all recorded generations.
    pub distinct_types: Vec<Type>,
    pub particles_processed: u64,
    /// Particles whose cutoff was clamped to [`MAX_TYPE`]; each of these may
    /// leave more than `epsilon` of offspring mass untried.
    pub capped_particles: u64,
    pub truncation_mass: f64,
}

impl BranchingRun {
    /// Whether generation `g` is nonempty, or `None` if the run was censored
    /// before deciding.
    pub fn alive_at(&self, g: u64) -> Option<bool> {
        if g >= 1 && g <= self.counts.len() as u64 {
            Some(self.counts[g as usize - 1] > 0)
        } else if self.extinct {
            Some(false)
        } else {
            None
        }
    }

    /// `N_g`, zero after extinction, `None` if censored before `g`.
    pub fn count_at(&self, g: u64) -> Option<u64> {
        match self.alive_at(g) {
            Some(true) => Some(self.counts[g as usize - 1]),
            Some(false) => Some(0),
            None => None,
        }
    }

    /// Number of distinct types `<= n`. Types grow by at least one per
    /// generation, so these all appear within the first `n` generations.
    pub fn distinct_types_up_to(&self, n: u64) -> u64 {
        self.distinct_types.partition_point(|&t| t <= n as Type) as u64
    }

    pub fn census(&self) -> Vec<CensusRow> {
        self.generations
            .iter()
            .map(|g| CensusRow {
                generation: g.generation,
                count: g.types.len() as u64,
                min_type: g.types.iter().copied().min().unwrap_or(0),
                max_type: g.types.iter().copied().max().unwrap_or(0),
            })
            .collect()
    }
}

/// Runs generations until extinction or a cap. Hitting a cap is reported via
/// `censored`, not as an error.
pub fn simulate<R: Rng + ?Sized>(params: &BranchingParams, rng: &mut R) -> Result<BranchingRun> {
    let mut current = Population { generation: 1, types: vec![1], truncation_mass: 0.0 };
    let mut distinct: BTreeSet<Type> = BTreeSet::from([1]);
    let mut generations = Vec::new();
    let mut counts = Vec::new();
    let mut processed = 0u64;
    let mut capped = 0u64;
    let mut mass = 0.0;
    let mut censored = None;
    let mut extinct = false;
    loop {
        counts.push(current.types.len() as u64);
        generations.push(current.clone());
        if current.types.is_empty() {
            extinct = true;
            break;
        }
        if current.generation >= params.max_gen {
            censored = Some(Censoring::MaxGen);
            break;
        }
        let mut next = Vec::new();
        for &k in &current.types {
            let off = sample_offspring(k, params, rng)?;
            processed += 1;
            if off.truncation_mass > params.epsilon {
                capped += 1;
            }
            mass += off.truncation_mass;
            next.extend(off.children);
            if next.len() as u64 > params.max_pop {
                break;
            }
        }
        if next.len() as u64 > params.max_pop {
            censored = Some(Censoring::MaxPop);
            break;
        }
        next.sort_unstable();
        distinct.extend(next.iter().copied());
        current = Population { generation: current.generation + 1, types: next, truncation_mass: mass };
    }
    Ok(BranchingRun {
        generations,
        counts,
        extinct,
        censored,
        distinct_types: distinct.into_iter().collect(),
        particles_processed: processed,
        capped_particles: capped,
        truncation_mass: mass,
    })
}

fn modified_kernel(model: &ModelParams, n_steps: u64) -> Result<RatioSeq> {
    if model.beta() <= 0.0 {
        return domain(format!("the modified walk needs beta > 0, got {}", model.beta()));
    }
    if n_steps < 1 {
        return domain("n_steps must be >= 1");
    }
    let mut mu = RatioSeq::new(model.beta())?;
    mu.extend_to(n_steps as usize + 1);
    Ok(mu)
}

/// `P(beta_{n+1} = i)` from a `mu` table.
fn recall_prob(mu: &RatioSeq, beta: f64, n: u64, i: u64) -> f64 {
    (beta + 1.0) / n as f64 * mu.value(i) / mu.value(n + 1)
}

/// `Xi-hat_n` for `n = 1..=n_steps` of the modified walk, where `Y_{n+1}` is
/// 1 when a `p`-coin succeeds and some occupied `i` has `beta-hat(i, n+1) = 1`.
pub fn simulate_modified_walk<R: Rng + ?Sized>(model: &ModelParams, n_steps: u64, rng: &mut R) -> Result<Vec<u64>> {
    let mu = modified_kernel(model, n_steps)?;
    let (p, beta) = (model.p(), model.beta());
    let mut occupied: Vec<u64> = vec![1];
    let mut out = Vec::with_capacity(n_steps as usize);
    out.push(1);
    for n in 1..n_steps {
        let coin = rng.random::<f64>() < p;
        let mut hit = false;
        for &i in &occupied {
            if rng.random::<f64>() < recall_prob(&mu, beta, n, i) {
                hit = true;
            }
        }
        if coin && hit {
            occupied.push(n + 1);
        }
        out.push(occupied.len() as u64);
    }
    Ok(out)
}

/// One walk and one modified walk driven by a shared uniform per step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModifiedCoupling {
    pub xi: u64,
    pub xi_hat: u64,
    /// First `n` with `Xi_n != Xi-hat_n`.
    pub first_disagreement: Option<u64>,
    /// Sum, over the agreeing steps, of `p sum_{i<j} P(beta_{n+1}=i) P(beta_{n+1}=j)`
    /// over occupied pairs. Its mean bounds `P(Xi_n != Xi-hat_n)`.
    pub pair_bound: f64,
}

/// While the two occupied sets agree, the walk steps with probability
/// `p sum_S P(beta_{n+1}=i)` and the modified walk with
/// `p (1 - prod_S (1 - P(beta_{n+1}=i)))`; the gap is at most the pairwise
/// inclusion-exclusion term.
pub fn coupled_modified_run<R: Rng + ?Sized>(model: &ModelParams, n_steps: u64, rng: &mut R) -> Result<ModifiedCoupling> {
    let mu = modified_kernel(model, n_steps)?;
    let (p, beta) = (model.p(), model.beta());
    let mut occupied: Vec<u64> = vec![1];
    let mut xi_hat = 1u64;
    let mut hat_occupied: Option<Vec<u64>> = None;
    let mut first_disagreement = None;
    let mut pair_bound = 0.0;
    for n in 1..n_steps {
        let u = rng.random::<f64>();
        match hat_occupied.as_mut() {
            None => {
                let (mut s, mut s2, mut none) = (0.0, 0.0, 1.0);
                for &i in &occupied {
                    let a = recall_prob(&mu, beta, n, i);
                    s += a;
                    s2 += a * a;
                    none *= 1.0 - a;
                }
                pair_bound += p * (s * s - s2) / 2.0;
                let walk_up = u < p * s;
                let hat_up = u < p * (1.0 - none);
                if walk_up != hat_up {
                    first_disagreement = Some(n + 1);
                    let mut hat = occupied.clone();
                    if hat_up {
                        hat.push(n + 1);
                    }
                    hat_occupied = Some(hat);
                }
                if walk_up {
                    occupied.push(n + 1);
                }
                xi_hat = hat_occupied.as_ref().map_or(occupied.len(), Vec::len) as u64;
            }
            Some(hat) => {
                let s: f64 = occupied.iter().map(|&i| recall_prob(&mu, beta, n, i)).sum();
                let none: f64 = hat.iter().map(|&i| 1.0 - recall_prob(&mu, beta, n, i)).product();
                if u < p * s {
                    occupied.push(n + 1);
                }
                if u < p * (1.0 - none) {
                    hat.push(n + 1);
                }
                xi_hat = hat.len() as u64;
            }
        }
    }
    Ok(ModifiedCoupling { xi: occupied.len() as u64, xi_hat, first_disagreement, pair_bound })
}
