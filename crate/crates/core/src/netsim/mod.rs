//! Discrete-event simulation of a tree of ICN caches.

mod config;
mod engine;
mod link;
mod presets;
mod topology;

pub use config::{PolicyChoice, PolicyDefaults, ScenarioConfig};
pub use engine::{run, run_with_limits, RunLimits};
pub use link::Link;
pub use presets::{line, preset, repository_link, single, tree, DEFAULT_REQUESTS_PER_USER, PRESET_NAMES};
pub use topology::{LinkSpec, NodeKind, NodeSpec, Topology};
