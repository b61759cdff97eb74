use std::collections::BTreeMap;

use serde::Serialize;

use super::{
    destination_aware_probabilities, uniform_probability, visibility, BackwardAnt, Candidate,
    ProtocolParams, RoutingError,
};
use crate::scalar::Scalar;
use crate::types::NodeId;

/// Per-node pheromone table: destination → neighbour → τ.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingTable<S> {
    owner: NodeId,
    alpha: S,
    tau_min: S,
    entries: BTreeMap<NodeId, BTreeMap<NodeId, S>>,
}

/// One line of a table dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub node: NodeId,
    pub destination: NodeId,
    pub neighbor: NodeId,
    pub tau: f64,
    pub probability: f64,
}

impl<S: Scalar> RoutingTable<S> {
    pub fn new(owner: NodeId, params: &ProtocolParams<S>) -> Self {
        Self {
            owner,
            alpha: params.alpha,
            tau_min: params.tau_min,
            entries: BTreeMap::new(),
        }
    }

    pub fn owner(&self) -> NodeId {
        self.owner
    }

    pub fn destinations(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.entries.keys().copied()
    }

    pub fn neighbors(&self, destination: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.entries
            .get(&destination)
            .into_iter()
            .flat_map(|m| m.keys().copied())
    }

    pub fn pheromone(&self, destination: NodeId, neighbor: NodeId) -> Option<S> {
        self.entries.get(&destination)?.get(&neighbor).copied()
    }

    /// Pheromone level whose `α`-th power equals `probability`, so that with
    /// equal visibilities selection reproduces the starting distribution.
    fn tau_for(&self, probability: S) -> S {
        let tau = if self.alpha == S::one() {
            probability
        } else {
            probability.powf(S::one() / self.alpha)
        };
        tau.max(self.tau_min)
    }

    fn sorted_unique(neighbors: &[NodeId]) -> Vec<NodeId> {
        let mut v = neighbors.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Uniform start for each destination in `destinations` other than the
    /// owner itself.
    pub fn init_uniform(
        &mut self,
        neighbors: &[NodeId],
        destinations: &[NodeId],
    ) -> Result<(), RoutingError> {
        let neighbors = Self::sorted_unique(neighbors);
        if neighbors.is_empty() {
            return Err(RoutingError::IsolatedNode(self.owner));
        }
        let tau = self.tau_for(uniform_probability(neighbors.len()));
        for &d in destinations.iter().filter(|&&d| d != self.owner) {
            self.entries
                .insert(d, neighbors.iter().map(|&n| (n, tau)).collect());
            self.debug_check(d);
        }
        Ok(())
    }

    /// Destination-aware start for one destination: a neighbouring
    /// destination takes `P_dd`, the other neighbours `P_dm`. Falls back to
    /// the uniform start when the destination is not a neighbour.
    pub fn init_destination_aware(
        &mut self,
        neighbors: &[NodeId],
        destination: NodeId,
    ) -> Result<(), RoutingError> {
        let neighbors = Self::sorted_unique(neighbors);
        if neighbors.is_empty() {
            return Err(RoutingError::IsolatedNode(self.owner));
        }
        if destination == self.owner {
            return Ok(());
        }
        if !neighbors.contains(&destination) {
            return self.init_uniform(&neighbors, &[destination]);
        }
        let (p_dd, p_dm) = destination_aware_probabilities::<S>(neighbors.len());
        let (tau_dd, tau_dm) = (self.tau_for(p_dd), self.tau_for(p_dm));
        let row = neighbors
            .iter()
            .map(|&n| (n, if n == destination { tau_dd } else { tau_dm }))
            .collect();
        self.entries.insert(destination, row);
        self.debug_check(destination);
        Ok(())
    }

    pub fn init_destination_aware_all(
        &mut self,
        neighbors: &[NodeId],
        destinations: &[NodeId],
    ) -> Result<(), RoutingError> {
        if neighbors.is_empty() {
            return Err(RoutingError::IsolatedNode(self.owner));
        }
        for &d in destinations {
            self.init_destination_aware(neighbors, d)?;
        }
        Ok(())
    }

    /// Selection probabilities with equal visibilities: `τ^α / Σ τ^α`.
    pub fn probabilities(&self, destination: NodeId) -> Vec<(NodeId, S)> {
        let Some(row) = self.entries.get(&destination) else {
            return Vec::new();
        };
        let weights: Vec<(NodeId, S)> =
            row.iter().map(|(&n, &t)| (n, t.powf(self.alpha))).collect();
        let total = weights.iter().fold(S::zero(), |a, (_, w)| a + *w);
        weights.into_iter().map(|(n, w)| (n, w / total)).collect()
    }

    /// Candidates towards `destination`: neighbours with a known energy that
    /// are not excluded.
    pub fn candidates(
        &self,
        destination: NodeId,
        neighbor_energies: &BTreeMap<NodeId, S>,
        params: &ProtocolParams<S>,
        exclude: impl Fn(&NodeId) -> bool,
    ) -> Vec<Candidate<S>> {
        let Some(row) = self.entries.get(&destination) else {
            return Vec::new();
        };
        row.iter()
            .filter(|(n, _)| !exclude(n))
            .filter_map(|(&node, &tau)| {
                let e = *neighbor_energies.get(&node)?;
                Some(Candidate {
                    node,
                    tau,
                    visibility: visibility(params.initial_energy, e, params.visibility_epsilon),
                })
            })
            .collect()
    }

    /// `τ ← (1 − ρ)·τ + Δτ / (φ·Bd)`, floored at `τ_min`. Returns the new τ.
    pub fn reinforce(
        &mut self,
        destination: NodeId,
        neighbor: NodeId,
        deposit: S,
        backward_hops: u32,
        rho: S,
        phi: S,
    ) -> Result<S, RoutingError> {
        if backward_hops == 0 {
            return Err(RoutingError::ZeroBackwardHops);
        }
        let owner = self.owner;
        let tau_min = self.tau_min;
        let tau = self
            .entries
            .get_mut(&destination)
            .and_then(|row| row.get_mut(&neighbor))
            .ok_or(RoutingError::UnknownLink {
                node: owner,
                destination,
                neighbor,
            })?;
        let bd = S::lit(f64::from(backward_hops));
        *tau = ((S::one() - rho) * *tau + deposit / (phi * bd)).max(tau_min);
        let new = *tau;
        self.debug_check(destination);
        Ok(new)
    }

    pub fn rows(&self) -> Vec<TableRow> {
        let mut out = Vec::new();
        for &d in self.entries.keys() {
            let probs = self.probabilities(d);
            for (n, p) in probs {
                out.push(TableRow {
                    node: self.owner,
                    destination: d,
                    neighbor: n,
                    tau: self.entries[&d][&n].as_f64(),
                    probability: p.as_f64(),
                });
            }
        }
        out
    }

    /// Largest `|Σ P − 1|` over all destinations.
    pub fn normalization_error(&self) -> f64 {
        self.entries
            .keys()
            .map(|&d| {
                let s = self
                    .probabilities(d)
                    .iter()
                    .fold(S::zero(), |a, (_, p)| a + *p);
                (s.as_f64() - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    #[inline]
    fn debug_check(&self, destination: NodeId) {
        if cfg!(debug_assertions) {
            let probs = self.probabilities(destination);
            if probs.is_empty() {
                return;
            }
            let sum = probs.iter().fold(S::zero(), |a, (_, p)| a + *p).as_f64();
            let tol = (S::epsilon().as_f64() * 64.0).max(1e-9);
            debug_assert!(
                (sum - 1.0).abs() <= tol,
                "probabilities of {} towards {} sum to {sum}",
                self.owner,
                destination
            );
            debug_assert!(self.entries[&destination]
                .values()
                .all(|&t| t >= self.tau_min));
        }
    }
}

/// Applies a backward ant's reinforcement on link `(owner, toward)` of `table`.
pub fn apply_backward_update<S: Scalar>(
    table: &mut RoutingTable<S>,
    ant: &BackwardAnt<S>,
    toward: NodeId,
    rho: S,
    phi: S,
) -> Result<S, RoutingError> {
    table.reinforce(
        ant.destination,
        toward,
        ant.deposit,
        ant.hops_from_sink,
        rho,
        phi,
    )
}
