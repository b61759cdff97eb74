use std::collections::VecDeque;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SimError;
use crate::types::NodeId;

const MAX_ATTEMPTS: u32 = 1000;

/// Node placement and unit-disk neighbourhoods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topology {
    /// Position of node `i` in metres.
    pub positions: Vec<(f64, f64)>,
    /// Sorted neighbours of node `i`.
    pub adjacency: Vec<Vec<NodeId>>,
}

impl Topology {
    /// Unit-disk graph: nodes closer than `range` are neighbours.
    pub fn from_positions(positions: Vec<(f64, f64)>, range: f64) -> Self {
        let n = positions.len();
        let mut adjacency = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                if distance(positions[i], positions[j]) < range {
                    adjacency[i].push(NodeId::from(j));
                    adjacency[j].push(NodeId::from(i));
                }
            }
        }
        Self {
            positions,
            adjacency,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn neighbors(&self, n: NodeId) -> &[NodeId] {
        &self.adjacency[n.index()]
    }
}

pub fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

pub fn is_connected(adjacency: &[Vec<NodeId>]) -> bool {
    if adjacency.is_empty() {
        return true;
    }
    let mut seen = vec![false; adjacency.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for v in &adjacency[u] {
            if !seen[v.index()] {
                seen[v.index()] = true;
                count += 1;
                queue.push_back(v.index());
            }
        }
    }
    count == adjacency.len()
}

/// Uniform random placement over `area`, redrawn from the same stream until
/// the unit-disk graph is connected.
pub fn generate_topology(
    rng: &mut ChaCha8Rng,
    node_count: usize,
    area: (f64, f64),
    radio_range: f64,
) -> Result<Topology, SimError> {
    if !(area.0 > 0.0 && area.1 > 0.0 && radio_range > 0.0) {
        return Err(SimError::InvalidScenario(
            "area and radio range must be positive".into(),
        ));
    }
    for _ in 0..MAX_ATTEMPTS {
        let positions: Vec<(f64, f64)> = (0..node_count)
            .map(|_| (rng.gen_range(0.0..area.0), rng.gen_range(0.0..area.1)))
            .collect();
        let topo = Topology::from_positions(positions, radio_range);
        if is_connected(&topo.adjacency) {
            return Ok(topo);
        }
    }
    Err(SimError::Disconnected {
        count: node_count,
        width: area.0,
        height: area.1,
        range: radio_range,
        attempts: MAX_ATTEMPTS,
    })
}
