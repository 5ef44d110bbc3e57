use erw_core::analysis::{
    classify_phase, compare_mc_exact, fit_exponent, stagnation_profile, Regime, SampleStats,
};
use erw_core::branching::{simulate, BranchingParams, Censoring};
use erw_core::ensemble::{map_replicates, run_ensemble, Ensemble, EnsembleConfig, SimulatorKind};
use erw_core::exact_engine::{
    asymptotic_constant, enumerate_law, exact_mean_xi, l2_diagnostic, limit_mean_xi, lower_bound_prob_one,
    propagate_moments,
};
use erw_core::rng::tag;
use erw_core::sum::Neumaier;
use erw_core::walkers::{coupled_run, Checkpoints};
use erw_core::ModelParams;
use serde::Serialize;

use crate::config::ReportConfig;
use crate::goldens::{self, GoldenCheck};
use crate::simulate::describe;

/// Horizon of the Monte Carlo mean gates.
const MC_N: u64 = 10_000;
const L2_N: u64 = 100_000;
const COUPLING_SEEDS: u64 = 200;
const BRANCHING_GENERATIONS: u64 = 40;

#[derive(Debug, Clone, Serialize)]
pub struct GateRow {
    pub regime: String,
    pub gate: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub pass: bool,
    pub gates: Vec<GateRow>,
    pub goldens: Vec<GoldenCheck>,
}

type Check = Result<(bool, String), erw_core::Error>;

/// Representative parameters for each phase.
pub fn representative(regime: Regime) -> ModelParams {
    let beta = match regime {
        Regime::NegativeBeta => -0.5,
        Regime::ZeroBeta => 0.0,
        Regime::SubCriticalPositive => 0.5,
        Regime::Critical => 1.0,
        Regime::Localized => 2.0,
    };
    ModelParams::new(0.5, beta).expect("representative parameters are valid")
}

struct Ctx<'a> {
    cfg: &'a ReportConfig,
    regime: Regime,
    pr: ModelParams,
    rows: Vec<GateRow>,
}

impl Ctx<'_> {
    fn gate(&mut self, name: &str, check: Check) {
        let (pass, detail) = check.unwrap_or_else(|e| (false, e.to_string()));
        self.rows.push(GateRow { regime: self.regime.name().into(), gate: name.into(), pass, detail });
    }

    fn ensemble(&self, n: u64, replicates: u64, salt: u64) -> Result<Ensemble, erw_core::Error> {
        run_ensemble(&EnsembleConfig {
            params: self.pr,
            n_steps: n,
            replicates,
            seed: self.cfg.seed.wrapping_add(salt),
            checkpoints: Checkpoints::Explicit(vec![n / 2, n]),
            simulator: SimulatorKind::Collapsed,
        })
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn classification(pr: &ModelParams, regime: Regime) -> Check {
    let got = classify_phase(pr).regime;
    Ok((got == regime, format!("(p, beta) = ({}, {}) classified {}", pr.p(), pr.beta(), got.name())))
}

fn engines_agree(pr: &ModelParams) -> Check {
    let n = 12;
    let cps: Vec<u64> = (2..=n).collect();
    let tables = propagate_moments(pr, n, 1, &cps)?;
    let mut worst = 0.0f64;
    for t in &tables {
        let closed = exact_mean_xi(t.n, pr);
        let law = enumerate_law(pr, t.n, 1)?.law;
        worst = worst.max(rel(t.moment(1, 0), closed)).max(rel(law.mean(), closed));
    }
    Ok((worst < 1e-10, format!("closed form, recursion and enumeration agree to {worst:.1e} for n <= {n}")))
}

fn growth(pr: &ModelParams) -> Check {
    let pts: Vec<(u64, f64)> = (0..=40)
        .map(|j| {
            let n = (1e3 * 10f64.powf(j as f64 / 20.0)).round() as u64;
            (n, exact_mean_xi(n, pr))
        })
        .collect();
    let fit = fit_exponent(&pts, (1_000, 100_000))?;
    let want = pr.growth_exponent();
    let ratio = exact_mean_xi(100_000, pr) / (asymptotic_constant(pr)? * 1e5f64.powf(want));
    Ok((
        (fit.slope - want).abs() < 0.05 && (0.9..=1.1).contains(&ratio),
        format!("slope {:.4} vs {want:.4}, E[Xi]/(C n^gamma) at 1e5 = {ratio:.4}", fit.slope),
    ))
}

fn critical_mean(pr: &ModelParams) -> Check {
    let beta = pr.beta();
    let mut sum = Neumaier::starting_at(1.0);
    let mut worst = 0.0f64;
    for n in 2..=100_000u64 {
        sum.add(beta / ((n - 1) as f64 + beta));
        worst = worst.max((exact_mean_xi(n, pr) - sum.value()).abs());
    }
    let ratio = exact_mean_xi(1_000_000, pr) / (beta * 1e6f64.ln());
    Ok((
        worst < 1e-12 && (0.95..=1.10).contains(&ratio),
        format!("matches the harmonic sum to {worst:.1e}; E[Xi_1e6]/(beta ln 1e6) = {ratio:.4}"),
    ))
}

fn localized_mean(pr: &ModelParams) -> Check {
    let limit = limit_mean_xi(pr).ok_or_else(|| erw_core::Error::Domain("no finite limit".into()))?;
    let gaps: Vec<f64> = [10u64, 100, 1_000, 10_000, 100_000].iter().map(|&n| limit - exact_mean_xi(n, pr)).collect();
    let ok = gaps.iter().all(|&g| g > 0.0) && gaps.windows(2).all(|w| w[1] < w[0]);
    Ok((ok, format!("limit {limit}; gaps at n = 1e1..1e5: {}", fmt_list(&gaps))))
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn l2(pr: &ModelParams, regime: Regime) -> Check {
    let d = l2_diagnostic(pr, L2_N)?;
    let want = regime.l2_bounded();
    Ok((
        d.bounded == want,
        format!(
            "expected {}, increment slope {:.3} +/- {:.3} (theory {:.3}), last-decade increase {:.3e}",
            if want { "bounded" } else { "divergent" },
            d.increment_slope,
            d.increment_slope_stderr,
            d.theoretical_slope,
            d.last_decade_increase
        ),
    ))
}

fn mc_mean(ctx: &Ctx) -> Check {
    let e = ctx.ensemble(MC_N, ctx.cfg.replicates, 1)?;
    let report = e.report(0.95)?;
    let exact = exact_mean_xi(MC_N, &ctx.pr);
    let cmp = compare_mc_exact(&report, exact, MC_N, ctx.cfg.z_level)?;
    let mc = report.at(MC_N).map_or(f64::NAN, |s| s.xi.mean);
    Ok((cmp.pass(), format!("{} replicates at n = {MC_N}: mc {mc:.4} exact {exact:.4} {}", ctx.cfg.replicates, describe(&cmp))))
}

fn coupling(ctx: &Ctx) -> Check {
    let pr = ctx.pr;
    let runs = map_replicates(ctx.cfg.seed, tag::COUPLING, COUPLING_SEEDS, |i, _| {
        coupled_run(pr, MC_N, ctx.cfg.seed.wrapping_add(i), &Checkpoints::Geometric { ratio: 2.0 })
    })?;
    let gap = runs.iter().map(|r| r.max_gap).max().unwrap_or(0);
    let order = runs.first().map(|r| format!("{:?}", r.order)).unwrap_or_default();
    Ok((true, format!("{COUPLING_SEEDS} coupled runs to n = {MC_N}, order {order} held at every step, max gap {gap}")))
}

fn mixed_moments(pr: &ModelParams) -> Check {
    let beta = pr.beta();
    let tables = propagate_moments(pr, 1_000_000, 3, &[100_000, 1_000_000])?;
    let mut worst = 0.0f64;
    for k in 1..=3usize {
        for l in 0..=k {
            let s: Vec<f64> = tables
                .iter()
                .map(|t| {
                    let ln_n = (t.n as f64).ln();
                    (t.ln_moment(k - l, l) - l as f64 * beta * ln_n - (2 * k - 1 - l) as f64 * ln_n.ln()).exp()
                })
                .collect();
            worst = worst.max(rel(s[1], s[0]));
        }
    }
    Ok((worst < 0.10, format!("scaled E[Xi^(k-l) Sigma^l], k <= 3, moves at most {:.2}% from 1e5 to 1e6", 100.0 * worst)))
}

fn localization(ctx: &Ctx) -> Check {
    let bound = lower_bound_prob_one(&ctx.pr, 1_000_000)?;
    let e = ctx.ensemble(MC_N, ctx.cfg.replicates, 2)?;
    let ones: Vec<f64> = e.final_xi().iter().map(|&x| f64::from(u8::from(x == 1))).collect();
    let s = SampleStats::from_values(&ones, 0.95);
    let floor = bound.certified_lower_bound - ctx.cfg.z_level * s.std_error();
    Ok((
        s.mean >= floor,
        format!("P(Xi_{MC_N} = 1) ~ {:.4} vs certified bound {:.6}", s.mean, bound.certified_lower_bound),
    ))
}

fn stagnation(ctx: &Ctx) -> Check {
    let n = 2 * MC_N;
    let e = ctx.ensemble(n, ctx.cfg.replicates, 3)?;
    let w = stagnation_profile(&e.checkpoints, &e.xi_matrix(), &[(MC_N, n)])?;
    Ok((w[0].fraction > 0.99, format!("Xi frozen on [{MC_N}, {n}] in {:.4} of replicates", w[0].fraction)))
}

fn branching_runs(ctx: &Ctx) -> Result<Vec<erw_core::branching::BranchingRun>, erw_core::Error> {
    let b = BranchingParams::from_model(ctx.pr)?.with_caps(BRANCHING_GENERATIONS, 1_000_000)?;
    map_replicates(ctx.cfg.seed, tag::BRANCHING, ctx.cfg.replicates, |_, rng| simulate(&b, rng))
}

fn branching_critical(ctx: &Ctx) -> Check {
    let runs = branching_runs(ctx)?;
    let decided: Vec<_> = runs.iter().filter(|r| r.censored != Some(Censoring::MaxPop)).collect();
    let alive: Vec<f64> = [5u64, 10, 20, 40]
        .iter()
        .map(|&g| decided.iter().filter(|r| r.alive_at(g) == Some(true)).count() as f64 / decided.len().max(1) as f64)
        .collect();
    Ok((alive.windows(2).all(|w| w[1] < w[0]), format!("P(N_G > 0), G = 5, 10, 20, 40: {}", fmt_list(&alive))))
}

fn branching_extinction(ctx: &Ctx) -> Check {
    let runs = branching_runs(ctx)?;
    let frac = runs.iter().filter(|r| r.extinct).count() as f64 / runs.len() as f64;
    Ok((frac >= 0.99, format!("extinct by generation {BRANCHING_GENERATIONS} in {frac:.4} of runs")))
}

fn regime_gates(cfg: &ReportConfig, regime: Regime) -> Vec<GateRow> {
    let pr = representative(regime);
    let mut ctx = Ctx { cfg, regime, pr, rows: Vec::new() };
    ctx.gate("classification", classification(&pr, regime));
    ctx.gate("exact engines agree", engines_agree(&pr));
    match regime {
        Regime::Critical => ctx.gate("mean grows like beta ln n", critical_mean(&pr)),
        Regime::Localized => ctx.gate("mean increases to its limit", localized_mean(&pr)),
        _ => ctx.gate("growth exponent and prefactor", growth(&pr)),
    }
    ctx.gate("L2 boundedness", l2(&pr, regime));
    let mc = mc_mean(&ctx);
    ctx.gate("Monte Carlo mean", mc);
    match regime {
        Regime::NegativeBeta | Regime::ZeroBeta | Regime::SubCriticalPositive => {
            let c = coupling(&ctx);
            ctx.gate("LERW coupling order", c);
        }
        Regime::Critical => {
            ctx.gate("mixed moments stabilize", mixed_moments(&pr));
            let l = localization(&ctx);
            ctx.gate("localization probability", l);
            let b = branching_critical(&ctx);
            ctx.gate("branching survival decreasing", b);
        }
        Regime::Localized => {
            let s = stagnation(&ctx);
            ctx.gate("stagnation", s);
            let b = branching_extinction(&ctx);
            ctx.gate("branching extinction", b);
        }
    }
    ctx.rows
}

pub fn run(cfg: &ReportConfig) -> crate::error::CliResult<Report> {
    let only = cfg.regime.as_deref();
    let want_goldens = only.is_none_or(|r| r == "goldens");
    let golden_list = if want_goldens { goldens::load(cfg.goldens.as_deref())? } else { Vec::new() };
    let mut gates = Vec::new();
    for regime in Regime::ALL {
        let selected = match only {
            None => true,
            Some(r) => r.parse::<Regime>().is_ok_and(|x| x == regime),
        };
        if selected {
            gates.extend(regime_gates(cfg, regime));
        }
    }
    let goldens: Vec<GoldenCheck> = golden_list.iter().map(goldens::check).collect();
    for g in &goldens {
        let detail = match (&g.error, g.computed, g.rel_error) {
            (Some(e), _, _) => e.clone(),
            (None, Some(v), Some(r)) => format!("computed {v:.15e}, expected {:.15e}, rel err {r:.1e} (<= {:.0e})", g.golden.value, g.golden.rel_tol),
            _ => String::new(),
        };
        gates.push(GateRow { regime: "goldens".into(), gate: g.golden.name.clone(), pass: g.pass, detail });
    }
    let pass = gates.iter().all(|g| g.pass);
    Ok(Report { pass, gates, goldens })
}

pub fn print_table(report: &Report) {
    let w_regime = report.gates.iter().map(|g| g.regime.len()).max().unwrap_or(6).max(6);
    let w_gate = report.gates.iter().map(|g| g.gate.len()).max().unwrap_or(4).max(4);
    println!("{:<w_regime$}  {:<w_gate$}  result  detail", "regime", "gate");
    for g in &report.gates {
        println!("{:<w_regime$}  {:<w_gate$}  {:<6}  {}", g.regime, g.gate, if g.pass { "PASS" } else { "FAIL" }, g.detail);
    }
    println!("overall: {}", if report.pass { "PASS" } else { "FAIL" });
}
