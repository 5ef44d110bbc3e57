use erw_core::analysis::{
    chi_square_gof, chi_square_two_sample, classify_phase, compare_mc_exact, counts_1_to_n, ChiSquareTest, Comparison,
    EnsembleReport,
};
use erw_core::branching::{simulate, BranchingParams, BranchingRun, Type};
use erw_core::ensemble::{map_replicates, run_ensemble, Ensemble, EnsembleConfig, SimulatorKind};
use erw_core::exact_engine::{enumerate_law, exact_mean_xi, MAX_ENUMERATION_STEPS};
use erw_core::export::Metadata;
use erw_core::rng::tag;
use erw_core::walkers::Checkpoints;
use erw_core::ModelParams;
use serde::Serialize;

use crate::config::{config_hash, params_stem, Mode, SimulateConfig};
use crate::error::CliResult;
use crate::output::Staging;

/// Chi-square tests below this p-value fail the differential gate.
pub const DIFFERENTIAL_P_MIN: f64 = 1e-3;

#[derive(Debug, Serialize)]
struct StatsRow {
    n: u64,
    replicates: u64,
    xi_mean: f64,
    xi_variance: f64,
    xi_ci_half_width: f64,
    exact_mean_xi: f64,
    m_mean: f64,
    m_variance: f64,
    m_ci_half_width: f64,
}

#[derive(Debug, Serialize)]
struct TrajectoryRow {
    replicate: u64,
    n: u64,
    xi: u64,
    sigma: f64,
    m: f64,
    a: f64,
}

#[derive(Debug, Serialize)]
struct BranchingSummaryRow {
    replicate: u64,
    extinct: bool,
    censored: String,
    generations: u64,
    final_count: u64,
    distinct_types: u64,
    particles_processed: u64,
    capped_particles: u64,
    truncation_mass: f64,
}

#[derive(Debug, Serialize)]
struct CensusOut {
    replicate: u64,
    generation: u64,
    count: u64,
    min_type: String,
    max_type: String,
}

#[derive(Debug, Serialize)]
pub struct Gate {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
struct WalkSummary<'a> {
    params: ModelParams,
    regime: &'static str,
    simulator: SimulatorKind,
    report: &'a EnsembleReport,
    final_gate: Comparison,
}

#[derive(Debug, Serialize)]
struct DifferentialSummary {
    params: ModelParams,
    enumeration_n: u64,
    full_vs_exact: ChiSquareTest,
    collapsed_vs_exact: ChiSquareTest,
    final_n: u64,
    full_vs_collapsed: ChiSquareTest,
}

fn kind(mode: Mode) -> SimulatorKind {
    match mode {
        Mode::Full => SimulatorKind::Full,
        _ => SimulatorKind::Collapsed,
    }
}

fn meta(kind: &str, hash: &str, cfg: &SimulateConfig, pr: &ModelParams) -> Metadata {
    Metadata::new(kind, hash, Some(cfg.seed))
        .with("p", pr.p())
        .with("beta", pr.beta())
        .with("n", cfg.n)
        .with("replicates", cfg.replicates)
}

/// Runs every grid point and stages the output. Returns the gates.
pub fn run(cfg: &SimulateConfig, stage: &mut Staging) -> CliResult<Vec<Gate>> {
    let hash = config_hash(cfg);
    let mut gates = Vec::new();
    for pr in &cfg.grid {
        match cfg.mode {
            Mode::Branching => branching(cfg, pr, &hash, stage)?,
            Mode::Collapsed | Mode::Full => gates.push(walk(cfg, pr, &hash, stage)?),
        }
        if cfg.differential {
            gates.extend(differential(cfg, pr, &hash, stage)?);
        }
    }
    Ok(gates)
}

fn walk(cfg: &SimulateConfig, pr: &ModelParams, hash: &str, stage: &mut Staging) -> CliResult<Gate> {
    let sim = kind(cfg.mode);
    let ensemble = run_ensemble(&EnsembleConfig {
        params: *pr,
        n_steps: cfg.n,
        replicates: cfg.replicates,
        seed: cfg.seed,
        checkpoints: cfg.checkpoints.clone(),
        simulator: sim,
    })?;
    let report = ensemble.report(cfg.confidence)?;
    let rows: Vec<StatsRow> = report
        .checkpoints
        .iter()
        .map(|s| StatsRow {
            n: s.n,
            replicates: s.xi.count,
            xi_mean: s.xi.mean,
            xi_variance: s.xi.variance,
            xi_ci_half_width: s.xi.ci_half_width,
            exact_mean_xi: exact_mean_xi(s.n, pr),
            m_mean: s.m.mean,
            m_variance: s.m.variance,
            m_ci_half_width: s.m.ci_half_width,
        })
        .collect();
    let stem = params_stem("simulate", pr);
    let m = meta("checkpoint_stats", hash, cfg, pr).with("simulator", format!("{sim:?}").to_lowercase());
    stage.table(&stem, cfg.format, &m, &rows)?;
    if cfg.trajectories {
        stage.table(&format!("{stem}_trajectories"), cfg.format, &m.clone().with("table", "trajectories"), &trajectory_rows(&ensemble))?;
    }

    let exact = exact_mean_xi(cfg.n, pr);
    let cmp = compare_mc_exact(&report, exact, cfg.n, cfg.z_level)?;
    let summary = WalkSummary { params: *pr, regime: classify_phase(pr).regime.name(), simulator: sim, report: &report, final_gate: cmp };
    stage.json(&format!("{stem}_report"), &meta("ensemble_report", hash, cfg, pr), &summary)?;
    let mc = report.at(cfg.n).map_or(f64::NAN, |s| s.xi.mean);
    Ok(Gate {
        name: format!("p={} beta={} E[Xi_{}]", pr.p(), pr.beta(), cfg.n),
        pass: cmp.pass(),
        detail: format!("mc {mc:.6} exact {exact:.6} {}", describe(&cmp)),
    })
}

pub fn describe(cmp: &Comparison) -> String {
    match cmp {
        Comparison::ZScore { z, level, .. } => format!("z = {z:.3} (|z| <= {level})"),
        Comparison::DegenerateVariance { tolerance, .. } => format!("zero variance, tolerance {tolerance:.1e}"),
    }
}

fn trajectory_rows(e: &Ensemble) -> Vec<TrajectoryRow> {
    e.trajectories
        .iter()
        .enumerate()
        .flat_map(|(i, t)| {
            t.iter().map(move |r| TrajectoryRow { replicate: i as u64, n: r.n, xi: r.xi, sigma: r.sigma, m: r.m, a: r.a })
        })
        .collect()
}

fn branching(cfg: &SimulateConfig, pr: &ModelParams, hash: &str, stage: &mut Staging) -> CliResult<()> {
    let b = BranchingParams::from_model(*pr)?
        .with_epsilon(cfg.branching.epsilon)?
        .with_caps(cfg.branching.max_gen, cfg.branching.max_pop)?;
    let runs: Vec<BranchingRun> = map_replicates(cfg.seed, tag::BRANCHING, cfg.replicates, |_, rng| simulate(&b, rng))?;
    let summary: Vec<BranchingSummaryRow> = runs
        .iter()
        .enumerate()
        .map(|(i, r)| BranchingSummaryRow {
            replicate: i as u64,
            extinct: r.extinct,
            censored: r.censored.map_or_else(String::new, |c| format!("{c:?}").to_lowercase()),
            generations: r.counts.len() as u64,
            final_count: r.counts.last().copied().unwrap_or(0),
            distinct_types: r.distinct_types.len() as u64,
            particles_processed: r.particles_processed,
            capped_particles: r.capped_particles,
            truncation_mass: r.truncation_mass,
        })
        .collect();
    let census: Vec<CensusOut> = runs
        .iter()
        .enumerate()
        .flat_map(|(i, r)| {
            r.census().into_iter().map(move |c| CensusOut {
                replicate: i as u64,
                generation: c.generation,
                count: c.count,
                min_type: type_str(c.min_type),
                max_type: type_str(c.max_type),
            })
        })
        .collect();
    let stem = params_stem("branching", pr);
    let bmeta = |kind: &str| {
        Metadata::new(kind, hash, Some(cfg.seed)).with("p", pr.p()).with("beta", pr.beta()).with("replicates", cfg.replicates)
    };
    let m = bmeta("branching_summary")
        .with("mean_offspring", b.mean_offspring())
        .with("epsilon", b.epsilon())
        .with("max_gen", b.max_gen())
        .with("max_pop", b.max_pop());
    stage.table(&stem, cfg.format, &m, &summary)?;
    stage.table(&format!("{stem}_census"), cfg.format, &bmeta("branching_census"), &census)?;
    Ok(())
}

/// Types may exceed `u64`; they are written as decimal strings.
fn type_str(t: Type) -> String {
    t.to_string()
}

fn chi_gate(name: String, t: &ChiSquareTest) -> Gate {
    Gate {
        name,
        pass: t.p_value > DIFFERENTIAL_P_MIN,
        detail: format!("stat {:.3}, dof {}, p {:.4} (> {DIFFERENTIAL_P_MIN})", t.statistic, t.dof, t.p_value),
    }
}

fn differential(cfg: &SimulateConfig, pr: &ModelParams, hash: &str, stage: &mut Staging) -> CliResult<Vec<Gate>> {
    let n_enum = cfg.n.clamp(2, MAX_ENUMERATION_STEPS);
    let exact = enumerate_law(pr, n_enum, 1)?.law;
    let cps = Checkpoints::Explicit(vec![n_enum, cfg.n]);
    let run = |sim: SimulatorKind| {
        run_ensemble(&EnsembleConfig {
            params: *pr,
            n_steps: cfg.n.max(n_enum),
            replicates: cfg.replicates,
            seed: cfg.seed,
            checkpoints: cps.clone(),
            simulator: sim,
        })
    };
    let full = run(SimulatorKind::Full)?;
    let collapsed = run(SimulatorKind::Collapsed)?;
    let at = |e: &Ensemble, n: u64| -> Vec<u64> {
        let j = e.checkpoints.iter().position(|&c| c == n).expect("checkpoint requested above");
        e.trajectories.iter().map(|t| t[j].xi).collect()
    };
    let n_final = cfg.n.max(n_enum);
    let summary = DifferentialSummary {
        params: *pr,
        enumeration_n: n_enum,
        full_vs_exact: chi_square_gof(&counts_1_to_n(at(&full, n_enum), n_enum), &exact.probs)?,
        collapsed_vs_exact: chi_square_gof(&counts_1_to_n(at(&collapsed, n_enum), n_enum), &exact.probs)?,
        final_n: n_final,
        full_vs_collapsed: chi_square_two_sample(
            &counts_1_to_n(at(&full, n_final), n_final),
            &counts_1_to_n(at(&collapsed, n_final), n_final),
        )?,
    };
    stage.json(&params_stem("differential", pr), &meta("differential", hash, cfg, pr), &summary)?;
    let label = format!("p={} beta={}", pr.p(), pr.beta());
    Ok(vec![
        chi_gate(format!("{label} full vs exact law, n={n_enum}"), &summary.full_vs_exact),
        chi_gate(format!("{label} collapsed vs exact law, n={n_enum}"), &summary.collapsed_vs_exact),
        chi_gate(format!("{label} full vs collapsed, n={n_final}"), &summary.full_vs_collapsed),
    ])
}
