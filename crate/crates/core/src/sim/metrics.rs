use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::radio::StateLedger;
use super::scenario::Scenario;
use crate::routing::{ProtocolKind, TableRow};

/// Column order of [`timeline_csv`].
pub const TIMELINE_HEADER: &str =
    "time_s,avg_residual,min_residual,packets_delivered,packets_generated,ants_launched,ants_completed";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub time_s: f64,
    /// Mean residual charge fraction over all nodes.
    pub avg_residual: f64,
    /// Smallest residual charge fraction of any node.
    pub min_residual: f64,
    pub packets_delivered: u64,
    pub packets_generated: u64,
    pub ants_launched: u64,
    pub ants_completed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsTimeline {
    pub samples: Vec<MetricSample>,
}

impl MetricsTimeline {
    pub fn last(&self) -> Option<&MetricSample> {
        self.samples.last()
    }
}

/// Fate of every generated message at the horizon. A message counts as
/// delivered once all its parts reached the sink and as dropped once any
/// part was dropped; the rest are still in flight.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageCounts {
    pub generated: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub in_flight: u64,
    pub dropped_duplicate: u64,
    pub dropped_dead_end: u64,
    pub dropped_no_route: u64,
    pub dropped_depleted: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeReport {
    pub node: u32,
    pub position: (f64, f64),
    pub residual: f64,
    pub charge_mah: f64,
    pub ledger: StateLedger,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub protocol: ProtocolKind,
    pub final_avg_residual: f64,
    pub final_min_residual: f64,
    pub messages: MessageCounts,
    pub ants_launched: u64,
    pub ants_completed: u64,
    pub ants_eliminated: u64,
    pub ants_lost: u64,
    pub route_discoveries: u64,
    pub nodes: Vec<NodeReport>,
    /// The scenario exactly as run.
    pub scenario: Scenario,
}

/// Timeline as CSV with [`TIMELINE_HEADER`] and fixed precision.
pub fn timeline_csv(timeline: &MetricsTimeline) -> String {
    let mut out = String::with_capacity(64 * (timeline.samples.len() + 1));
    out.push_str(TIMELINE_HEADER);
    out.push('\n');
    for s in &timeline.samples {
        let _ = writeln!(
            out,
            "{:.3},{:.9},{:.9},{},{},{},{}",
            s.time_s,
            s.avg_residual,
            s.min_residual,
            s.packets_delivered,
            s.packets_generated,
            s.ants_launched,
            s.ants_completed
        );
    }
    out
}

/// Routing-table dump: `node,destination,neighbor,tau,probability`.
pub fn tables_csv(rows: &[TableRow]) -> String {
    let mut out = String::from("node,destination,neighbor,tau,probability\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.9},{:.9}",
            r.node.0, r.destination.0, r.neighbor.0, r.tau, r.probability
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let t = MetricsTimeline {
            samples: vec![MetricSample {
                time_s: 60.0,
                avg_residual: 0.5,
                min_residual: 0.25,
                packets_delivered: 3,
                packets_generated: 4,
                ants_launched: 5,
                ants_completed: 2,
            }],
        };
        assert_eq!(
            timeline_csv(&t),
            format!("{TIMELINE_HEADER}\n60.000,0.500000000,0.250000000,3,4,5,2\n")
        );
    }
}
