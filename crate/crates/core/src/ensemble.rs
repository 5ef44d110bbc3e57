//! Parallel, schedule-independent Monte Carlo ensembles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::EnsembleReport;
use crate::error::{domain, Result};
use crate::rng::{stream, tag, StreamRng};
use crate::walkers::{run_collapsed, run_full, CheckpointRow, Checkpoints, ModelParams, WalkKernel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimulatorKind {
    #[default]
    Collapsed,
    Full,
}

impl SimulatorKind {
    fn tag(self) -> u64 {
        match self {
            SimulatorKind::Collapsed => tag::WALK,
            SimulatorKind::Full => tag::FULL_WALK,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub params: ModelParams,
    pub n_steps: u64,
    pub replicates: u64,
    pub seed: u64,
    #[serde(default)]
    pub checkpoints: Checkpoints,
    #[serde(default)]
    pub simulator: SimulatorKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub config: EnsembleConfig,
    pub checkpoints: Vec<u64>,
    /// One row per checkpoint for each replicate, in replicate order.
    pub trajectories: Vec<Vec<CheckpointRow>>,
}

impl Ensemble {
    pub fn xi_matrix(&self) -> Vec<Vec<u64>> {
        self.trajectories.iter().map(|t| t.iter().map(|r| r.xi).collect()).collect()
    }

    pub fn m_matrix(&self) -> Vec<Vec<f64>> {
        self.trajectories.iter().map(|t| t.iter().map(|r| r.m).collect()).collect()
    }

    /// `Xi` at the last checkpoint of every replicate.
    pub fn final_xi(&self) -> Vec<u64> {
        self.trajectories.iter().map(|t| t.last().map_or(0, |r| r.xi)).collect()
    }

    pub fn report(&self, confidence: f64) -> Result<EnsembleReport> {
        EnsembleReport::build(self.config.params, &self.checkpoints, &self.xi_matrix(), &self.m_matrix(), confidence)
    }
}

/// Evaluates `f(i, rng_i)` for every replicate `i` in parallel, where
/// `rng_i` is the replicate's own stream. Output order is replicate order.
pub fn map_replicates<T, F>(seed: u64, stream_tag: u64, replicates: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut StreamRng) -> Result<T> + Sync,
{
    (0..replicates)
        .into_par_iter()
        .map(|i| f(i, &mut stream(seed, stream_tag, i)))
        .collect()
}

pub fn run_ensemble(config: &EnsembleConfig) -> Result<Ensemble> {
    if config.replicates < 1 {
        return domain("an ensemble needs at least one replicate");
    }
    let checkpoints = config.checkpoints.expand(config.n_steps)?;
    let kernel = WalkKernel::new(config.params, config.n_steps)?;
    let kind = config.simulator;
    let trajectories = map_replicates(config.seed, kind.tag(), config.replicates, |_, rng| match kind {
        SimulatorKind::Collapsed => run_collapsed(&kernel, config.n_steps, &checkpoints, rng),
        SimulatorKind::Full => run_full(&kernel, config.n_steps, &checkpoints, rng),
    })?;
    Ok(Ensemble { config: config.clone(), checkpoints, trajectories })
}
