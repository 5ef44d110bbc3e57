mod config;
mod error;
mod exact;
mod goldens;
mod output;
mod report;
mod simulate;

use std::process::ExitCode;

use clap::Parser;
use erw_core::export::Metadata;

use config::{Cli, Command, ExactConfig, FileConfig, ReportConfig, SimulateConfig};
use error::CliResult;
use output::Staging;

/// Outcome of a successful invocation.
enum Outcome {
    Pass,
    GateFailed,
}

fn run(cli: Cli) -> CliResult<Outcome> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let common = config::common(&cli, &file);
    if let Some(t) = common.threads {
        if t == 0 {
            return error::config_err("--threads must be >= 1");
        }
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match &cli.command {
        Command::Simulate(args) => {
            let cfg = SimulateConfig::resolve(args, &file, &common)?;
            let mut stage = Staging::new(&common.out_dir)?;
            let gates = simulate::run(&cfg, &mut stage)?;
            let files = stage.commit()?;
            for g in &gates {
                println!("{}  {}  {}", if g.pass { "PASS" } else { "FAIL" }, g.name, g.detail);
            }
            report_files(&files);
            Ok(if gates.iter().all(|g| g.pass) { Outcome::Pass } else { Outcome::GateFailed })
        }
        Command::Exact(args) => {
            let cfg = ExactConfig::resolve(args, &file, &common)?;
            let mut stage = Staging::new(&common.out_dir)?;
            exact::run(&cfg, &mut stage)?;
            report_files(&stage.commit()?);
            Ok(Outcome::Pass)
        }
        Command::Report(args) => {
            let cfg = ReportConfig::resolve(args, &file)?;
            let rep = report::run(&cfg)?;
            report::print_table(&rep);
            let mut stage = Staging::new(&common.out_dir)?;
            let meta = Metadata::new("report", &config::config_hash(&cfg), Some(cfg.seed))
                .with("replicates", cfg.replicates)
                .with("z_level", cfg.z_level);
            stage.json("report", &meta, &rep)?;
            report_files(&stage.commit()?);
            Ok(if rep.pass { Outcome::Pass } else { Outcome::GateFailed })
        }
    }
}

fn report_files(files: &[std::path::PathBuf]) {
    for f in files {
        eprintln!("wrote {}", f.display());
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::GateFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("erw: {e}");
            ExitCode::from(2)
        }
    }
}
