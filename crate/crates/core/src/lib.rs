//! Lazy elephant random walk with power-law memory.
//!
//! The crate is organised bottom-up:
//!
//! * [`gamma_kernel`]: `c_n(xi)` sequences and telescoping Gamma-ratio sums.
//! * [`memory_law`]: the recall distribution over past times and its sampler.
//! * [`walkers`]: collapsed and full-history simulators, the comparison LERW
//!   and the monotone coupling between the two.
//! * [`exact_engine`]: closed-form means, the exact mixed-moment propagator,
//!   exhaustive enumeration for short walks and localization bounds.
//! * [`branching`]: the multi-type branching process that dominates the set
//!   of occupied times for `beta > 0`.
//! * [`ensemble`] and [`analysis`]: parallel Monte Carlo ensembles and the
//!   statistics used to judge them against exact values.
//! * [`export`]: CSV and JSON writers with metadata headers.

pub mod analysis;
pub mod branching;
pub mod ensemble;
pub mod error;
pub mod exact_engine;
pub mod export;
pub mod gamma_kernel;
pub mod memory_law;
pub mod rng;
pub mod sum;
pub mod walkers;

pub use error::{Error, Result};
pub use walkers::ModelParams;
