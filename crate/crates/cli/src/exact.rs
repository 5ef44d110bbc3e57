use erw_core::analysis::{classify_phase, Regime};
use erw_core::exact_engine::{
    asymptotic_constant, enumerate_law, exact_mean_xi, l2_diagnostic, limit_mean_xi, propagate_moments, L2Diagnostic,
};
use erw_core::export::Metadata;
use erw_core::ModelParams;
use serde::Serialize;

use crate::config::{config_hash, params_stem, ExactConfig};
use crate::error::CliResult;
use crate::output::Staging;

/// The L2 diagnostic fits over the last decade and needs this many steps.
const L2_MIN_N: u64 = 7;

#[derive(Debug, Serialize)]
struct MeanRow {
    n: u64,
    mean_xi: f64,
    /// `C n^gamma`, `beta ln n` or the limit, depending on the phase.
    leading_order: Option<f64>,
    limit: Option<f64>,
    gap_to_limit: Option<f64>,
}

#[derive(Debug, Serialize)]
struct MomentRow {
    n: u64,
    a: usize,
    b: usize,
    moment: f64,
    ln_moment: f64,
    /// `E[Xi^a Sigma^b] / (n^(b beta) (ln n)^(2k-1-b))`, `k = a + b`, on
    /// the critical line.
    critical_scaled: Option<f64>,
}

#[derive(Debug, Serialize)]
struct PmfRow {
    k: u64,
    probability: f64,
}

#[derive(Debug, Serialize)]
struct ExactSummary {
    params: ModelParams,
    regime: &'static str,
    growth_exponent: Option<f64>,
    asymptotic_constant: Option<f64>,
    n: u64,
    mean_xi: f64,
    limit: Option<f64>,
    gap_to_limit: Option<f64>,
    l2: Option<L2Diagnostic>,
}

fn leading_order(n: u64, pr: &ModelParams, regime: Regime) -> Option<f64> {
    match regime {
        Regime::Critical => Some(pr.beta() * (n as f64).ln()),
        Regime::Localized => limit_mean_xi(pr),
        _ => asymptotic_constant(pr).ok().map(|c| c * (n as f64).powf(pr.growth_exponent())),
    }
}

fn critical_scaled(n: u64, a: usize, b: usize, ln_moment: f64, beta: f64) -> Option<f64> {
    let k = a + b;
    if n < 3 || k == 0 {
        return None;
    }
    let ln_n = (n as f64).ln();
    Some((ln_moment - b as f64 * beta * ln_n - (2 * k - 1 - b) as f64 * ln_n.ln()).exp())
}

pub fn run(cfg: &ExactConfig, stage: &mut Staging) -> CliResult<()> {
    let hash = config_hash(cfg);
    let cps = cfg.checkpoints.expand(cfg.n)?;
    for pr in &cfg.grid {
        let phase = classify_phase(pr);
        let limit = limit_mean_xi(pr);
        let meta = |kind: &str| Metadata::new(kind, &hash, None).with("p", pr.p()).with("beta", pr.beta()).with("n", cfg.n);

        let means: Vec<MeanRow> = cps
            .iter()
            .map(|&n| {
                let mean_xi = exact_mean_xi(n, pr);
                MeanRow { n, mean_xi, leading_order: leading_order(n, pr, phase.regime), limit, gap_to_limit: limit.map(|l| l - mean_xi) }
            })
            .collect();
        let stem = params_stem("exact", pr);
        stage.table(&stem, cfg.format, &meta("exact_mean"), &means)?;

        let mean_xi = exact_mean_xi(cfg.n, pr);
        let summary = ExactSummary {
            params: *pr,
            regime: phase.regime.name(),
            growth_exponent: phase.growth_exponent,
            asymptotic_constant: phase.constant,
            n: cfg.n,
            mean_xi,
            limit,
            gap_to_limit: limit.map(|l| l - mean_xi),
            l2: if cfg.n >= L2_MIN_N { Some(l2_diagnostic(pr, cfg.n)?) } else { None },
        };
        stage.json(&format!("{stem}_summary"), &meta("exact_summary"), &summary)?;

        if let Some(d) = cfg.degree {
            let tables = propagate_moments(pr, cfg.n, d, &cps)?;
            let critical = pr.is_critical();
            let rows: Vec<MomentRow> = tables
                .iter()
                .flat_map(|t| {
                    t.entries().map(move |(a, b, _)| {
                        let ln_moment = t.ln_moment(a, b);
                        MomentRow {
                            n: t.n,
                            a,
                            b,
                            moment: t.moment(a, b),
                            ln_moment,
                            critical_scaled: if critical { critical_scaled(t.n, a, b, ln_moment, pr.beta()) } else { None },
                        }
                    })
                })
                .collect();
            stage.table(&format!("{stem}_moments"), cfg.format, &meta("exact_moments").with("degree", d), &rows)?;
        }

        if cfg.enumerate {
            let law = enumerate_law(pr, cfg.n, 1)?.law;
            let rows: Vec<PmfRow> = (1..=cfg.n).map(|k| PmfRow { k, probability: law.prob(k) }).collect();
            stage.table(&format!("{stem}_law"), cfg.format, &meta("exact_law").with("total", law.total()), &rows)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_scaling_exponents() {
        // k = 1, b = 0 divides by ln n only.
        let n = 1_000u64;
        let v = critical_scaled(n, 1, 0, 2.0f64.ln(), 1.0).unwrap();
        assert!((v - 2.0 / (n as f64).ln()).abs() < 1e-12);
        assert!(critical_scaled(2, 1, 0, 0.0, 1.0).is_none());
        assert!(critical_scaled(100, 0, 0, 0.0, 1.0).is_none());
    }
}
