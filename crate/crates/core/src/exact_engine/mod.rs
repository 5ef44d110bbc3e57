//! Exact results: closed-form means, the mixed-moment propagator, exhaustive
//! enumeration for short walks, the L2 diagnostic for the martingale and the
//! localization lower bound.

mod bounds;
mod enumerate;
mod l2;
mod moments;

pub use bounds::{lower_bound_prob_one, ProbOneBound};
pub use enumerate::{enumerate_law, Enumeration, ExactLaw, MAX_ENUMERATION_STEPS};
pub use l2::{l2_diagnostic, L2Diagnostic, L2_SLOPE_MARGIN};
pub use moments::{propagate_moments, propagate_with, MomentTable, MAX_DEGREE};

use crate::error::{domain, Result};
use crate::gamma_kernel::{self, harmonic_shifted};
use crate::walkers::ModelParams;

/// `E[Xi_n]` in closed form.
///
/// Off the critical line this is
/// `r/(r - beta) * c_n(r)/c_n(beta) + beta/(beta - r)` with `r = p(beta+1)`;
/// on it, `sum_{k=0}^{n-1} beta / (k + beta)`.
pub fn exact_mean_xi(n: u64, params: &ModelParams) -> f64 {
    assert!(n >= 1, "exact_mean_xi needs n >= 1");
    if n == 1 {
        return 1.0;
    }
    let beta = params.beta();
    let r = params.rate();
    if params.is_critical() {
        // k = 0 contributes exactly 1.
        1.0 + beta * harmonic_shifted(beta, n - 1)
    } else {
        let log_ratio = gamma_kernel::ln_c_unchecked(n, r) - gamma_kernel::ln_c_unchecked(n, beta);
        r / (r - beta) * log_ratio.exp() + beta / (beta - r)
    }
}

/// `lim E[Xi_n] = beta / (beta - p(beta+1))` in the localized phase.
pub fn limit_mean_xi(params: &ModelParams) -> Option<f64> {
    let (beta, r) = (params.beta(), params.rate());
    (beta > params.critical_beta() && !params.is_critical()).then(|| beta / (beta - r))
}

/// `C(p, beta) = Gamma(beta + 1) / ((p(beta+1) - beta) Gamma(p(beta+1)))`,
/// the prefactor of `E[Xi_n] ~ C n^{p(beta+1) - beta}` below the critical line.
pub fn asymptotic_constant(params: &ModelParams) -> Result<f64> {
    let (beta, r) = (params.beta(), params.rate());
    if beta >= params.critical_beta() || params.is_critical() {
        return domain(format!(
            "asymptotic constant needs beta < p/(1-p) = {}, got {beta}",
            params.critical_beta()
        ));
    }
    let ln_ratio = gamma_kernel::ln_gamma(beta + 1.0) - gamma_kernel::ln_gamma(r);
    Ok(ln_ratio.exp() / (r - beta))
}
