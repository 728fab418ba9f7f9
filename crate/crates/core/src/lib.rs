//! Simulation and validation of birth-death-move processes on finite point
//! configurations in `ℝ^d`.

pub mod bd_chain;
pub mod config_space;
pub mod diagnostics;
pub mod engine;
pub mod jump_kernels;
pub mod movers;
pub mod potentials;
pub mod rng;
pub mod scalar;

pub use scalar::Scalar;

pub type Configuration32 = config_space::Configuration<f32>;
pub type Configuration64 = config_space::Configuration<f64>;
pub type Domain32 = config_space::Domain<f32>;
pub type Domain64 = config_space::Domain<f64>;
pub type ModelSpec32 = engine::ModelSpec<f32>;
pub type ModelSpec64 = engine::ModelSpec<f64>;
pub type TrajectoryLog32 = engine::TrajectoryLog<f32>;
pub type TrajectoryLog64 = engine::TrajectoryLog<f64>;
