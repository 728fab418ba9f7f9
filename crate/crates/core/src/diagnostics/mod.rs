//! Empirical checks of the process: generator identity, Gibbs invariance
//! against an independent sampler, coupling claims and convergence rates.

mod coupling;
mod generator;
mod gibbs;
mod rate;
pub mod stats;

use thiserror::Error;

pub use coupling::{coupling_check, CouplingReport, MarginalTest};
pub use generator::{generator_check, GeneratorEstimate, GeneratorReport, TestFunction};
pub use gibbs::{
    birth_acceptance_ratio, compare_samples, death_acceptance_ratio, gibbs_invariance_check, gibbs_oracle_calibration, mcmc_gibbs_oracle,
    mcmc_gibbs_oracle_with, model_potential, nearest_neighbour_distances, process_samples, GibbsCheckOptions, GibbsReport, OracleOptions,
};
pub use rate::{erlang_tail, rate_estimate, rate_estimate_with, RateEstimate, RateOptions};

use crate::bd_chain::Verdict;
use crate::engine::EngineError;
use crate::jump_kernels::KernelError;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("the oracle needs a bounded domain")]
    UnboundedDomain,
    #[error("model birth rate is not a Gibbs family: {0}")]
    NotGibbs(String),
    #[error("dominating chain is not certified ergodic: {0:?}")]
    NotErgodic(Verdict),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}
