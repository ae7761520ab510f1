//! System-level simulator for two-tier heterogeneous networks.
//!
//! The crate models a macrocell overlaid with an indoor femtocell and an
//! optical (LED-based) access point, and provides:
//!
//! - empirical path-loss and received-power computations ([`propagation`]),
//! - a count-based cell-selection game with a potential function, a
//!   best-response Nash-equilibrium solver and operator revenue ([`game`]),
//! - per-band SINR across the three receiver tiers and Rayleigh outage
//!   probability ([`sinr`]),
//! - a voice/data channel pool with cross-borrowing and lighting control
//!   ([`channels`]),
//! - scenario assembly, coverage maps, Monte Carlo sweeps and CSV/SVG
//!   emitters ([`scenario`] and [`output`]).
//!
//! All randomness flows through explicitly seeded ChaCha streams; a scenario
//! configuration plus a master seed fully determines every output byte.

pub mod channels;
pub mod game;
pub mod output;
pub mod propagation;
pub mod rng;
pub mod scenario;
pub mod sinr;

pub use channels::{AllocationRequest, ChannelPool, Outcome, TrafficKind};
pub use game::{AccessGameSpec, CountGame, NeResult, PlayerPopulation, PricingSpec, StrategyProfile};
pub use propagation::{FemtoPathLossParams, MacroPathLossParams, Position, PowerLevel};
pub use scenario::ScenarioConfig;
pub use sinr::{ChannelRealizations, LinkCategory, NoiseAndThreshold, PowerAllocation, Tier, Topology};
