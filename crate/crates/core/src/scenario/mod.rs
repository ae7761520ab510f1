//! Scenario assembly and experiments: configuration, UE placement,
//! per-trial game construction, coverage maps, Monte Carlo sweeps and the
//! admission-level replays.

pub mod build;
pub mod config;
pub mod coverage;
pub mod placement;
pub mod replay;
pub mod sweep;

pub use build::{build_game, TrialScenario, UeKind, UeLink};
pub use config::{ConfigError, ScenarioConfig};
pub use coverage::{coverage_map, CoverageGrid, GridCell, Server};
pub use placement::{place_ues, UePlacement};
pub use replay::{admission_outage, demand_utilization, parse_events, replay_trace, AllocEvent, TraceRow};
pub use sweep::{
    capacity_cdf, evaluate_trial, linspace, run_sweep, CapacityCdf, CdfPoint, SweepRecord,
    SweepSpec, SweepVariable, TrialMetrics,
};

use thiserror::Error;

/// Umbrella error for scenario construction and experiments.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Propagation(#[from] crate::propagation::PropagationError),
    #[error(transparent)]
    Game(#[from] crate::game::GameError),
    #[error(transparent)]
    Sinr(#[from] crate::sinr::SinrError),
    #[error(transparent)]
    Alloc(#[from] crate::channels::AllocError),
    #[error("{0}")]
    InvalidArgument(String),
}
