//! Finite point configurations in a box `W ⊂ ℝ^d` and the metrics on them.

mod assignment;
mod configuration;
mod domain;
mod metrics;

use thiserror::Error;

pub use assignment::min_cost_assignment;
pub use configuration::Configuration;
pub use domain::{Domain, Interval};
pub use metrics::{d1, hausdorff};
pub(crate) use metrics::euclid;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("point {0:?} lies outside the domain")]
    PointOutsideDomain(Vec<f64>),
    #[error("index {index} out of range for a configuration of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("configuration is empty")]
    EmptyConfiguration,
    #[error("configuration has repeated points")]
    NonSimpleConfiguration,
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
}
