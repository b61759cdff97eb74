//! Deterministic discrete-event engine: topology, CBR traffic, radio-time
//! accounting, harvesting and residual-energy metrics.

mod compare;
mod engine;
mod metrics;
mod radio;
mod scenario;
mod topology;

pub use compare::{
    compare_protocols, comparison_csv, Comparison, ComparisonAggregate, ComparisonRow,
};
pub use engine::{run, run_detailed, RunOutput};
pub use metrics::{
    tables_csv, timeline_csv, MessageCounts, MetricSample, MetricsTimeline, NodeReport, RunSummary,
    TIMELINE_HEADER,
};
pub use radio::StateLedger;
pub use scenario::{HarvestConfig, Scenario};
pub use topology::{generate_topology, is_connected, Topology};

use thiserror::Error;

use crate::energy::EnergyError;
use crate::harvester::HarvestError;
use crate::routing::RoutingError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error(
        "no connected topology for {count} nodes in {width} x {height} m with {range} m range after {attempts} attempts"
    )]
    Disconnected {
        count: usize,
        width: f64,
        height: f64,
        range: f64,
        attempts: u32,
    },
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error(transparent)]
    Harvest(#[from] HarvestError),
}
