//! Second-moment diagnostic for the martingale `M_n = Sigma_n / c_n(p(beta+1))`.
//!
//! `E[M_n^2]` is nondecreasing, with increments of the same order as those of
//! `E[L_n] = E[Sigma_n^2] / c_n(2 p(beta+1))`, which decay like
//! `n^{beta - p(beta+1) - 1}`. The verdict fits that decay on the last decade.

use serde::{Deserialize, Serialize};

use super::moments::propagate_with;
use crate::analysis::fit_exponent;
use crate::error::{Error, Result};
use crate::gamma_kernel::ln_c_unchecked;
use crate::walkers::ModelParams;

/// Fitted increment slopes above `-1 - L2_SLOPE_MARGIN` are read as divergent.
pub const L2_SLOPE_MARGIN: f64 = 0.02;

const SLOPE_POINTS: usize = 48;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L2Diagnostic {
    pub n_max: u64,
    pub sup_m2: f64,
    /// `E[M^2]` at the start of the last decade, `n_max / 10` (at least 1).
    pub m2_decade_start: f64,
    pub last_decade_increase: f64,
    /// Log-log slope of `E[L_{n+1}] - E[L_n]` over the last decade.
    pub increment_slope: f64,
    pub increment_slope_stderr: f64,
    pub theoretical_slope: f64,
    pub bounded: bool,
    /// `(n, E[M_n^2])` on a geometric grid.
    pub series: Vec<(u64, f64)>,
}

fn sample_grid(lo: u64, hi: u64, points: usize) -> Vec<u64> {
    if hi - lo < points as u64 {
        return (lo..=hi).collect();
    }
    let ratio = (hi as f64 / lo as f64).powf(1.0 / (points - 1) as f64);
    let mut out: Vec<u64> = (0..points).map(|i| (lo as f64 * ratio.powi(i as i32)).round() as u64).collect();
    out.push(hi);
    out.iter_mut().for_each(|n| *n = (*n).clamp(lo, hi));
    out.dedup();
    out
}

pub fn l2_diagnostic(params: &ModelParams, n_max: u64) -> Result<L2Diagnostic> {
    if n_max < 2 {
        return Err(Error::InsufficientData(format!("L2 diagnostic needs n_max >= 2, got {n_max}")));
    }
    let beta = params.beta();
    let r = params.rate();
    let start = (n_max / 10).max(1);
    // increments L_{n+1} - L_n for n in the grid
    let inc_grid = sample_grid(start, n_max - 1, SLOPE_POINTS);
    let series_grid = sample_grid(1, n_max, 4 * SLOPE_POINTS);

    let mut sup_m2 = f64::NEG_INFINITY;
    let mut m2_decade_start = f64::NAN;
    let mut m2_last = f64::NAN;
    let mut prev_l = f64::NAN;
    let mut increments = Vec::with_capacity(inc_grid.len());
    let mut series = Vec::with_capacity(series_grid.len());
    let (mut inc_i, mut ser_i) = (0, 0);

    propagate_with(params, n_max, 2, |n, w| {
        let ln_s2 = w[2].ln() + 2.0 * ln_c_unchecked(n + 1, beta);
        let m2 = (ln_s2 - 2.0 * ln_c_unchecked(n, r)).exp();
        let l = (ln_s2 - ln_c_unchecked(n, 2.0 * r)).exp();
        sup_m2 = sup_m2.max(m2);
        if n == start {
            m2_decade_start = m2;
        }
        m2_last = m2;
        if inc_i < inc_grid.len() && inc_grid[inc_i] + 1 == n {
            increments.push((n - 1, l - prev_l));
            inc_i += 1;
        }
        if ser_i < series_grid.len() && series_grid[ser_i] == n {
            series.push((n, m2));
            ser_i += 1;
        }
        prev_l = l;
    })?;

    let fit = fit_exponent(&increments, (start, n_max))?;
    let theoretical_slope = beta - r - 1.0;
    Ok(L2Diagnostic {
        n_max,
        sup_m2,
        m2_decade_start,
        last_decade_increase: m2_last - m2_decade_start,
        increment_slope: fit.slope,
        increment_slope_stderr: fit.stderr,
        theoretical_slope,
        bounded: fit.slope < -1.0 - L2_SLOPE_MARGIN,
        series,
    })
}
