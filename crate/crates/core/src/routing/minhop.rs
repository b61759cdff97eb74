use std::collections::{BTreeMap, VecDeque};

use super::RoutingError;
use crate::types::NodeId;

/// Shortest path by hop count from `source` to `sink` over nodes for which
/// `alive` holds. Among equally short paths the lexicographically smallest
/// node sequence wins.
///
/// `adjacency[i]` lists the neighbours of node `i`.
pub fn min_hop_route(
    adjacency: &[Vec<NodeId>],
    source: NodeId,
    sink: NodeId,
    alive: impl Fn(NodeId) -> bool,
) -> Result<Vec<NodeId>, RoutingError> {
    let fail = RoutingError::Disconnected { from: source, sink };
    if !alive(source) || !alive(sink) {
        return Err(fail);
    }
    if source == sink {
        return Ok(vec![source]);
    }
    // BFS visiting neighbours in ascending order; the first discoverer of a
    // node is the parent with the smallest path prefix.
    let mut parent: Vec<Option<NodeId>> = vec![None; adjacency.len()];
    let mut seen = vec![false; adjacency.len()];
    let mut queue = VecDeque::from([source]);
    seen[source.index()] = true;
    while let Some(u) = queue.pop_front() {
        let mut nbrs = adjacency[u.index()].clone();
        nbrs.sort_unstable();
        for v in nbrs {
            if seen[v.index()] || !alive(v) {
                continue;
            }
            seen[v.index()] = true;
            parent[v.index()] = Some(u);
            if v == sink {
                let mut path = vec![sink];
                let mut at = sink;
                while let Some(p) = parent[at.index()] {
                    path.push(p);
                    at = p;
                }
                path.reverse();
                return Ok(path);
            }
            queue.push_back(v);
        }
    }
    Err(fail)
}

/// Result of a route lookup by [`MinHopRouter`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteLookup {
    pub path: Vec<NodeId>,
    /// True when the route had to be (re)discovered for this lookup.
    pub discovered: bool,
}

/// Reactive route cache: a route is kept until one of its nodes dies.
#[derive(Debug, Clone, Default)]
pub struct MinHopRouter {
    routes: BTreeMap<NodeId, Vec<NodeId>>,
}

impl MinHopRouter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn route(
        &mut self,
        adjacency: &[Vec<NodeId>],
        source: NodeId,
        sink: NodeId,
        alive: impl Fn(NodeId) -> bool,
    ) -> Result<RouteLookup, RoutingError> {
        if let Some(path) = self.routes.get(&source) {
            if path.iter().all(|&n| alive(n)) {
                return Ok(RouteLookup {
                    path: path.clone(),
                    discovered: false,
                });
            }
        }
        self.routes.remove(&source);
        let path = min_hop_route(adjacency, source, sink, alive)?;
        self.routes.insert(source, path.clone());
        Ok(RouteLookup {
            path,
            discovered: true,
        })
    }

    pub fn cached(&self, source: NodeId) -> Option<&[NodeId]> {
        self.routes.get(&source).map(Vec::as_slice)
    }
}
