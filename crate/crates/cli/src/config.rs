//! Flags, the optional TOML config file and their merge. Flags win over the
//! file, the file over `ERW_OUT_DIR`, and that over built-in defaults.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use erw_core::walkers::Checkpoints;
use erw_core::ModelParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{config_err, CliError, CliResult};

pub const OUT_DIR_ENV: &str = "ERW_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "erw-out";

#[derive(Debug, Parser)]
#[command(name = "erw", version, about = "Lazy elephant random walk with power-law memory")]
pub struct Cli {
    /// TOML file with default values for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory [env: ERW_OUT_DIR] [default: erw-out].
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Worker threads [default: all cores]. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo ensembles over a (p, beta) grid.
    Simulate(SimulateArgs),
    /// Closed-form means, exact moments, L2 diagnostics and enumeration.
    Exact(ExactArgs),
    /// Run the pass/fail gates, one row per phase.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Collapsed,
    Full,
    Branching,
}

#[derive(Debug, Default, Args)]
pub struct GridArgs {
    /// Retention probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Memory exponents, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub beta: Vec<f64>,
    /// Number of steps.
    #[arg(long)]
    pub n: Option<u64>,
    /// `geometric:<ratio>`, `linear:<every>` or a list such as `1,10,100`.
    #[arg(long)]
    pub checkpoints: Option<String>,
}

#[derive(Debug, Default, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub replicates: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Check full-history and collapsed simulators against each other and
    /// against exact enumeration.
    #[arg(long)]
    pub differential: bool,
    /// Also write every replicate's checkpoint rows.
    #[arg(long)]
    pub trajectories: bool,
    #[arg(long)]
    pub z_level: Option<f64>,
    #[arg(long)]
    pub confidence: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub max_gen: Option<u64>,
    #[arg(long)]
    pub max_pop: Option<u64>,
}

#[derive(Debug, Default, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Use beta = p/(1-p) for every p.
    #[arg(long)]
    pub critical: bool,
    /// Emit joint moments of total degree <= d.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Emit the exact law of Xi_n by enumeration (n <= 16).
    #[arg(long)]
    pub enumerate: bool,
}

#[derive(Debug, Default, Args)]
pub struct ReportArgs {
    /// Only this row: negative_beta, zero_beta, sub_critical_positive,
    /// critical, localized or goldens.
    #[arg(long)]
    pub regime: Option<String>,
    /// TOML file of golden values [default: built in].
    #[arg(long)]
    pub goldens: Option<PathBuf>,
    /// Replicates per Monte Carlo gate.
    #[arg(long)]
    pub replicates: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub z_level: Option<f64>,
}

/// Keys accepted in the config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub p: Option<Vec<f64>>,
    pub beta: Option<Vec<f64>>,
    pub n: Option<u64>,
    pub checkpoints: Option<String>,
    pub replicates: Option<u64>,
    pub seed: Option<u64>,
    pub mode: Option<Mode>,
    pub differential: Option<bool>,
    pub trajectories: Option<bool>,
    pub z_level: Option<f64>,
    pub confidence: Option<f64>,
    pub epsilon: Option<f64>,
    pub max_gen: Option<u64>,
    pub max_pop: Option<u64>,
    pub critical: Option<bool>,
    pub degree: Option<usize>,
    pub enumerate: Option<bool>,
    pub regime: Option<String>,
    pub goldens: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::ConfigFile { path: path.to_path_buf(), source })?;
        toml::from_str(&text).map_err(|source| CliError::ConfigSyntax { path: path.to_path_buf(), source: Box::new(source) })
    }
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Common {
    pub out_dir: PathBuf,
    pub format: Format,
    pub threads: Option<usize>,
}

pub fn common(cli: &Cli, file: &FileConfig) -> Common {
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| file.out_dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    Common { out_dir, format: cli.format.or(file.format).unwrap_or(Format::Csv), threads: cli.threads.or(file.threads) }
}

fn pick<T: Clone>(flag: &[T], file: &Option<Vec<T>>, default: &[T]) -> Vec<T> {
    if !flag.is_empty() {
        flag.to_vec()
    } else {
        file.clone().unwrap_or_else(|| default.to_vec())
    }
}

pub fn parse_checkpoints(spec: &str) -> CliResult<Checkpoints> {
    let bad = || CliError::Config(format!("cannot parse checkpoints {spec:?}"));
    if let Some(r) = spec.strip_prefix("geometric:") {
        Ok(Checkpoints::Geometric { ratio: r.trim().parse().map_err(|_| bad())? })
    } else if let Some(e) = spec.strip_prefix("linear:") {
        Ok(Checkpoints::Linear { every: e.trim().parse().map_err(|_| bad())? })
    } else {
        let ns: Result<Vec<u64>, _> = spec.split(',').map(|s| s.trim().parse()).collect();
        Ok(Checkpoints::Explicit(ns.map_err(|_| bad())?))
    }
}

/// Every `(p, beta)` combination, validated before anything runs.
pub fn grid(ps: &[f64], betas: &[f64]) -> CliResult<Vec<ModelParams>> {
    let mut out = Vec::new();
    for &p in ps {
        for &beta in betas {
            out.push(ModelParams::new(p, beta)?);
        }
    }
    Ok(out)
}

/// Short hex digest of the resolved configuration.
pub fn config_hash<T: Serialize>(resolved: &T) -> String {
    let json = serde_json::to_vec(resolved).expect("configuration serializes");
    let digest = Sha256::digest(&json);
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchingCaps {
    pub epsilon: f64,
    pub max_gen: u64,
    pub max_pop: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateConfig {
    pub grid: Vec<ModelParams>,
    pub n: u64,
    pub replicates: u64,
    pub seed: u64,
    pub checkpoints: Checkpoints,
    pub mode: Mode,
    pub differential: bool,
    pub trajectories: bool,
    pub z_level: f64,
    pub confidence: f64,
    pub branching: BranchingCaps,
    pub format: Format,
}

fn check_positive(name: &str, x: f64) -> CliResult<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        config_err(format!("{name} must be a positive number, got {x}"))
    }
}

impl SimulateConfig {
    pub fn resolve(args: &SimulateArgs, file: &FileConfig, common: &Common) -> CliResult<Self> {
        let grid = grid(&pick(&args.grid.p, &file.p, &[0.5]), &pick(&args.grid.beta, &file.beta, &[1.0]))?;
        let seed = match args.seed.or(file.seed) {
            Some(s) => s,
            None => return config_err("simulate needs --seed (or `seed` in the config file)"),
        };
        let n = args.grid.n.or(file.n).unwrap_or(1_000);
        if n < 1 {
            return config_err("--n must be >= 1");
        }
        let replicates = args.replicates.or(file.replicates).unwrap_or(1_000);
        if replicates < 1 {
            return config_err("--replicates must be >= 1");
        }
        let checkpoints = match args.grid.checkpoints.as_ref().or(file.checkpoints.as_ref()) {
            Some(spec) => parse_checkpoints(spec)?,
            None => Checkpoints::default(),
        };
        checkpoints.expand(n)?;
        let z_level = args.z_level.or(file.z_level).unwrap_or(erw_core::analysis::DEFAULT_Z_LEVEL);
        check_positive("z_level", z_level)?;
        let confidence = args.confidence.or(file.confidence).unwrap_or(0.95);
        if !(confidence > 0.0 && confidence < 1.0) {
            return config_err(format!("confidence must lie in (0, 1), got {confidence}"));
        }
        let branching = BranchingCaps {
            epsilon: args.epsilon.or(file.epsilon).unwrap_or(erw_core::branching::DEFAULT_EPSILON),
            max_gen: args.max_gen.or(file.max_gen).unwrap_or(erw_core::branching::DEFAULT_MAX_GEN),
            max_pop: args.max_pop.or(file.max_pop).unwrap_or(erw_core::branching::DEFAULT_MAX_POP),
        };
        let mode = args.mode.or(file.mode).unwrap_or(Mode::Collapsed);
        if mode == Mode::Branching {
            for pr in &grid {
                erw_core::branching::BranchingParams::from_model(*pr)?
                    .with_epsilon(branching.epsilon)?
                    .with_caps(branching.max_gen, branching.max_pop)?;
            }
        }
        let differential = args.differential || file.differential.unwrap_or(false);
        if differential && mode == Mode::Branching {
            return config_err("--differential applies to walk simulators, not branching");
        }
        Ok(Self {
            grid,
            n,
            replicates,
            seed,
            checkpoints,
            mode,
            differential,
            trajectories: args.trajectories || file.trajectories.unwrap_or(false),
            z_level,
            confidence,
            branching,
            format: common.format,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactConfig {
    pub grid: Vec<ModelParams>,
    pub n: u64,
    pub checkpoints: Checkpoints,
    pub critical: bool,
    pub degree: Option<usize>,
    pub enumerate: bool,
    pub format: Format,
}

impl ExactConfig {
    pub fn resolve(args: &ExactArgs, file: &FileConfig, common: &Common) -> CliResult<Self> {
        let critical = args.critical || file.critical.unwrap_or(false);
        let ps = pick(&args.grid.p, &file.p, &[0.5]);
        let grid = if critical {
            if !args.grid.beta.is_empty() {
                return config_err("--critical sets beta = p/(1-p); do not pass --beta as well");
            }
            ps.iter().map(|&p| ModelParams::critical(p)).collect::<Result<Vec<_>, _>>()?
        } else {
            grid(&ps, &pick(&args.grid.beta, &file.beta, &[1.0]))?
        };
        let enumerate = args.enumerate || file.enumerate.unwrap_or(false);
        let n = args.grid.n.or(file.n).unwrap_or(if enumerate { 12 } else { 1_000 });
        if n < 1 {
            return config_err("--n must be >= 1");
        }
        let checkpoints = match args.grid.checkpoints.as_ref().or(file.checkpoints.as_ref()) {
            Some(spec) => parse_checkpoints(spec)?,
            None => Checkpoints::Geometric { ratio: 10f64.powf(0.1) },
        };
        checkpoints.expand(n)?;
        let degree = args.degree.or(file.degree);
        if let Some(d) = degree {
            if !(1..=erw_core::exact_engine::MAX_DEGREE).contains(&d) {
                return config_err(format!("--degree must lie in 1..={}", erw_core::exact_engine::MAX_DEGREE));
            }
        }
        if enumerate && !(2..=erw_core::exact_engine::MAX_ENUMERATION_STEPS).contains(&n) {
            return config_err(format!(
                "--enumerate needs 2 <= n <= {}, got {n}",
                erw_core::exact_engine::MAX_ENUMERATION_STEPS
            ));
        }
        Ok(Self { grid, n, checkpoints, critical, degree, enumerate, format: common.format })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportConfig {
    pub regime: Option<String>,
    pub goldens: Option<PathBuf>,
    pub replicates: u64,
    pub seed: u64,
    pub z_level: f64,
}

impl ReportConfig {
    pub fn resolve(args: &ReportArgs, file: &FileConfig) -> CliResult<Self> {
        let regime = args.regime.clone().or_else(|| file.regime.clone());
        if let Some(r) = &regime {
            if r != "goldens" {
                r.parse::<erw_core::analysis::Regime>()?;
            }
        }
        let z_level = args.z_level.or(file.z_level).unwrap_or(erw_core::analysis::DEFAULT_Z_LEVEL);
        check_positive("z_level", z_level)?;
        let replicates = args.replicates.or(file.replicates).unwrap_or(10_000);
        if replicates < 100 {
            return config_err("report gates need --replicates >= 100");
        }
        Ok(Self {
            regime,
            goldens: args.goldens.clone().or_else(|| file.goldens.clone()),
            replicates,
            seed: args.seed.or(file.seed).unwrap_or(1),
            z_level,
        })
    }
}

/// `0.5` -> `0.5`, `-0.5` -> `m0.5`; used in file names.
pub fn tag_number(x: f64) -> String {
    let s = format!("{x}");
    match s.strip_prefix('-') {
        Some(rest) => format!("m{rest}"),
        None => s,
    }
}

pub fn params_stem(prefix: &str, pr: &ModelParams) -> String {
    format!("{prefix}_p{}_beta{}", tag_number(pr.p()), tag_number(pr.beta()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_specs() {
        assert_eq!(parse_checkpoints("geometric:2").unwrap(), Checkpoints::Geometric { ratio: 2.0 });
        assert_eq!(parse_checkpoints("linear:10").unwrap(), Checkpoints::Linear { every: 10 });
        assert_eq!(parse_checkpoints("1, 10,100").unwrap(), Checkpoints::Explicit(vec![1, 10, 100]));
        assert!(parse_checkpoints("sometimes").is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = config_hash(&(1, "x"));
        assert_eq!(a, config_hash(&(1, "x")));
        assert_ne!(a, config_hash(&(2, "x")));
        assert_eq!(a.len(), 16);
    }

    #[test]
    fn file_names() {
        let pr = ModelParams::new(0.5, -0.5).unwrap();
        assert_eq!(params_stem("simulate", &pr), "simulate_p0.5_betam0.5");
    }

    #[test]
    fn flags_win_over_file() {
        let file: FileConfig = toml::from_str("n = 50\nseed = 3\nreplicates = 7\np = [0.2]").unwrap();
        let args = SimulateArgs { grid: GridArgs { n: Some(20), ..Default::default() }, ..Default::default() };
        let common = Common { out_dir: "x".into(), format: Format::Csv, threads: None };
        let cfg = SimulateConfig::resolve(&args, &file, &common).unwrap();
        assert_eq!((cfg.n, cfg.seed, cfg.replicates), (20, 3, 7));
        assert_eq!(cfg.grid[0].p(), 0.2);
        assert!(toml::from_str::<FileConfig>("bogus = 1").is_err());
    }
}
