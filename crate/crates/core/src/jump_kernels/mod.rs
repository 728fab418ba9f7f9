//! Intensities `β`, `δ` with their bound `α*`, and the birth and death
//! transition kernels.

mod birth;
mod death;
mod intensity;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use birth::{BirthKernel, BirthKind, DistanceTerm, MixtureBirth, SiteTerm, DEFAULT_MAX_PROPOSALS};
pub use death::{DeathKernel, DeathWeight};
pub use intensity::{BirthRate, CountNorm, CustomRate, DeathRate, IntensitySpec, RateSequences, DEFAULT_LINEAR_DEATH_CAP};

use crate::config_space::{ConfigError, Configuration, Domain};
use crate::potentials::PotentialError;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("configuration is empty")]
    EmptyConfiguration,
    #[error("no proposal accepted after {0} attempts")]
    RejectionBudgetExceeded(usize),
    #[error("total jump intensity is zero")]
    ZeroIntensity,
    #[error("kernel needs a bounded domain")]
    UnboundedDomain,
    #[error("no closed-form sup/inf for intensity family {0}")]
    UnsupportedFamily(String),
    #[error("alpha_star = {alpha_star} is below an observed intensity {observed}")]
    AlphaStarTooSmall { observed: f64, alpha_star: f64 },
    #[error("invalid kernel parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpType {
    Birth,
    Death,
}

/// Draws the jump type with probability `β(x)/α(x)` for a birth, then the
/// new state from the matching kernel.
pub fn sample_jump<S: Scalar, R: Rng + ?Sized>(
    intens: &IntensitySpec<S>,
    bk: &BirthKernel<S>,
    dk: &DeathKernel,
    domain: &Domain<S>,
    x: &Configuration<S>,
    rng: &mut R,
) -> Result<(Configuration<S>, JumpType), KernelError> {
    let b = intens.beta(domain, x)?;
    let d = intens.delta(x);
    let a = b + d;
    if !(a > 0.0) {
        return Err(KernelError::ZeroIntensity);
    }
    jump_given_rates(b, d, bk, dk, domain, x, rng.random::<f64>() * a, rng)
}

/// Birth when `u < β`, death otherwise; `u` is uniform on `[0, β + δ)`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn jump_given_rates<S: Scalar, R: Rng + ?Sized>(
    b: f64,
    d: f64,
    bk: &BirthKernel<S>,
    dk: &DeathKernel,
    domain: &Domain<S>,
    x: &Configuration<S>,
    u: f64,
    rng: &mut R,
) -> Result<(Configuration<S>, JumpType), KernelError> {
    if u < b || d == 0.0 {
        Ok((bk.sample(domain, x, rng)?, JumpType::Birth))
    } else {
        Ok((dk.sample(x, rng)?, JumpType::Death))
    }
}
