//! Simulated scenarios and Monte Carlo accuracy studies.

mod dgp;
mod monte_carlo;
pub mod presets;

pub use dgp::{generate, generate_with, Distribution, ScenarioSpec};
pub use monte_carlo::{
    mean_absolute_error, monte_carlo, replication_rng, BenchmarkReport, MonteCarloConfig,
};
