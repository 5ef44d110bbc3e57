//! Lower bound on the probability that the walk never leaves the origin.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::gamma_kernel::RatioSeq;
use crate::sum::Neumaier;
use crate::walkers::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbOneBound {
    pub n_trunc: u64,
    /// `prod_{n=2}^{N} (1 - p P(beta_n = 1))`.
    pub truncated_product: f64,
    /// `sum_{n>N} P(beta_n = 1)`, exact.
    pub tail_sum: f64,
    /// `truncated_product * (1 - p)^{tail_sum}`, a lower bound on the full
    /// product and hence on `P(Xi_n = 1 for all n)`.
    pub certified_lower_bound: f64,
}

/// `P(beta_n = 1) = (beta + 1) / ((n - 1) mu_n)`. Its tail sums telescope:
/// `sum_{n>N} P(beta_n = 1) = (beta + 1) / (beta mu_N)`.
///
/// Each omitted factor satisfies `1 - p x >= (1 - p)^x` for `x` in `[0, 1]`,
/// which turns the tail sum into a certified multiplicative correction.
pub fn lower_bound_prob_one(params: &ModelParams, n_trunc: u64) -> Result<ProbOneBound> {
    let (p, beta) = (params.p(), params.beta());
    if beta <= 0.0 {
        return domain(format!("the product bound needs beta > 0, got {beta}"));
    }
    if n_trunc < 2 {
        return domain("truncation point must be >= 2");
    }
    let mut mu = RatioSeq::new(beta)?;
    mu.extend_to(n_trunc as usize);
    let mut ln_prod = Neumaier::new();
    for n in 2..=n_trunc {
        let x = (beta + 1.0) / ((n - 1) as f64 * mu.value(n));
        ln_prod.add((-p * x).ln_1p());
    }
    let truncated_product = ln_prod.value().exp();
    let tail_sum = (beta + 1.0) / (beta * mu.value(n_trunc));
    let certified_lower_bound = (ln_prod.value() + tail_sum * (-p).ln_1p()).exp();
    Ok(ProbOneBound { n_trunc, truncated_product, tail_sum, certified_lower_bound })
}
