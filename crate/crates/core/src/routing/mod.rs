//! Ant-based energy-aware routing (IEEABR and the EEABR baseline) and a
//! min-hop reactive baseline.
//!
//! Routing tables store pheromone `τ` per (destination, neighbour). Forward
//! ants sample next hops from `τ^α · E^β` where `E = 1 / (c − e)` is the
//! energy visibility of a neighbour; backward ants retrace the path and
//! reinforce it with a deposit derived from the path's minimum and mean
//! energy. IEEABR differs from EEABR only in how tables start out and in
//! data packets going straight to a destination that is a neighbour.

mod ant;
mod minhop;
mod packet;
mod table;

pub use ant::{
    Admission, AntId, AntMemory, AntNode, AntRecord, BackwardAnt, BackwardOutcome, DataOutcome,
    DropReason, EliminationReason, ForwardAnt, ForwardOutcome,
};
pub use minhop::{min_hop_route, MinHopRouter, RouteLookup};
pub use packet::{reassemble, split_payload, CodeId, DataPacket, MessageId, SequenceNumber};
pub use table::{apply_backward_update, RoutingTable, TableRow};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{FromPrimitive, Num};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::types::NodeId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RoutingError {
    #[error("node {0} has no neighbours")]
    IsolatedNode(NodeId),
    #[error("dead end: every neighbour of {0} is in the ant's memory")]
    DeadEnd(NodeId),
    #[error("node {node} has no table entry for link to {neighbor} towards {destination}")]
    UnknownLink {
        node: NodeId,
        destination: NodeId,
        neighbor: NodeId,
    },
    #[error("backward ant hop count must be >= 1")]
    ZeroBackwardHops,
    #[error("no route from {from} to {sink}")]
    Disconnected { from: NodeId, sink: NodeId },
    #[error("payload must be non-empty and split into at least one part")]
    InvalidSplit,
    #[error("unknown protocol {0:?} (valid: IEEABR, EEABR, MinHop)")]
    UnknownProtocol(String),
    #[error("invalid protocol parameter {0}")]
    InvalidParameter(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProtocolKind {
    #[serde(rename = "IEEABR")]
    Ieeabr,
    #[serde(rename = "EEABR")]
    Eeabr,
    #[serde(rename = "MinHop")]
    MinHop,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 3] = [
        ProtocolKind::Ieeabr,
        ProtocolKind::Eeabr,
        ProtocolKind::MinHop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Ieeabr => "IEEABR",
            Self::Eeabr => "EEABR",
            Self::MinHop => "MinHop",
        }
    }

    pub fn uses_ants(self) -> bool {
        !matches!(self, Self::MinHop)
    }

    /// Whether initial tables and data forwarding favour a neighbouring
    /// destination.
    pub fn destination_aware(self) -> bool {
        matches!(self, Self::Ieeabr)
    }

    /// Whether bystanders can drop a frame after its next-hop header. The
    /// min-hop baseline carries no such field, so every node in range
    /// receives the whole frame.
    pub fn header_discard(self) -> bool {
        self.uses_ants()
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = RoutingError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ieeabr" => Ok(Self::Ieeabr),
            "eeabr" => Ok(Self::Eeabr),
            "minhop" | "min-hop" | "min_hop" => Ok(Self::MinHop),
            _ => Err(RoutingError::UnknownProtocol(s.to_string())),
        }
    }
}

/// Tunables of the ant protocols. None of these have published values; the
/// defaults are this crate's choices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProtocolParams<S> {
    /// Pheromone exponent α.
    pub alpha: S,
    /// Visibility exponent β.
    pub beta: S,
    /// Evaporation rate ρ in (0, 1).
    pub rho: S,
    /// Deposit attenuation coefficient φ.
    pub phi: S,
    pub tau_min: S,
    /// Normalised initial node energy `c`; ant energies are residual
    /// fractions scaled by it.
    pub initial_energy: S,
    /// Visibility regulariser as a fraction of `initial_energy`.
    pub visibility_epsilon: S,
    pub deposit_min: S,
    pub deposit_max: S,
    pub record_timeout_s: f64,
    pub ant_interval_s: f64,
    /// Number of data parts a message is split into.
    pub data_parts: u32,
}

impl<S: Scalar> Default for ProtocolParams<S> {
    fn default() -> Self {
        Self {
            alpha: S::one(),
            beta: S::one(),
            rho: S::lit(0.1),
            phi: S::one(),
            tau_min: S::lit(1e-4),
            initial_energy: S::lit(2.0),
            visibility_epsilon: S::lit(1e-6),
            deposit_min: S::lit(1e-6),
            deposit_max: S::lit(10.0),
            record_timeout_s: 5.0,
            ant_interval_s: 10.0,
            data_parts: 4,
        }
    }
}

impl<S: Scalar> ProtocolParams<S> {
    pub fn validate(&self) -> Result<(), RoutingError> {
        let pos = |v: S| v > S::zero() && v.is_finite();
        if !pos(self.alpha) {
            return Err(RoutingError::InvalidParameter("alpha"));
        }
        if !(self.beta >= S::zero()) || !self.beta.is_finite() {
            return Err(RoutingError::InvalidParameter("beta"));
        }
        if !(self.rho > S::zero() && self.rho < S::one()) {
            return Err(RoutingError::InvalidParameter("rho"));
        }
        if !pos(self.phi) {
            return Err(RoutingError::InvalidParameter("phi"));
        }
        if !pos(self.tau_min) {
            return Err(RoutingError::InvalidParameter("tau_min"));
        }
        if !pos(self.initial_energy) {
            return Err(RoutingError::InvalidParameter("initial_energy"));
        }
        if !pos(self.visibility_epsilon) {
            return Err(RoutingError::InvalidParameter("visibility_epsilon"));
        }
        if !pos(self.deposit_min) || !(self.deposit_max >= self.deposit_min) {
            return Err(RoutingError::InvalidParameter("deposit bounds"));
        }
        if !(self.record_timeout_s > 0.0) {
            return Err(RoutingError::InvalidParameter("record_timeout_s"));
        }
        if !(self.ant_interval_s > 0.0) {
            return Err(RoutingError::InvalidParameter("ant_interval_s"));
        }
        if self.data_parts == 0 {
            return Err(RoutingError::InvalidParameter("data_parts"));
        }
        Ok(())
    }
}

/// Uniform start: every one of `n_k` neighbours gets `1 / n_k`.
pub fn uniform_probability<T: Num + FromPrimitive>(n_k: usize) -> T {
    T::one() / T::from_usize(n_k).expect("neighbour count representable")
}

/// Starting probabilities when the destination is itself a neighbour:
/// `(P_dd, P_dm) = ((9N − 5) / 4N², (4N − 5) / 4N²)`, with `P_dm = 0` for a
/// single neighbour. Generic so it can be checked in exact arithmetic.
pub fn destination_aware_probabilities<T: Num + FromPrimitive + Clone>(n_k: usize) -> (T, T) {
    assert!(
        n_k >= 1,
        "destination-aware start needs at least one neighbour"
    );
    let n = T::from_usize(n_k).expect("neighbour count representable");
    let c = |v: usize| T::from_usize(v).expect("small constant");
    let denom = c(4) * n.clone() * n.clone();
    let p_dd = (c(9) * n.clone() - c(5)) / denom.clone();
    let p_dm = if n_k > 1 {
        (c(4) * n - c(5)) / denom
    } else {
        T::zero()
    };
    (p_dd, p_dm)
}

/// Energy visibility `1 / (c − e + ε·c)`. Increases with `node_energy`.
pub fn visibility<S: Scalar>(initial_energy: S, node_energy: S, epsilon: S) -> S {
    let e = node_energy.max(S::zero()).min(initial_energy);
    S::one() / (initial_energy - e + epsilon * initial_energy)
}

/// Result of the pheromone-deposit computation at the sink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deposit<S> {
    pub value: S,
    /// Set when the raw value was undefined or outside the allowed range.
    pub clamped: bool,
}

/// Deposit carried by a backward ant:
/// `Δτ = 1 / (C − (EMin − Fd) / (EAvg − Fd))`, limited to
/// `[deposit_min, deposit_max]`. A vanishing `EAvg − Fd` or a non-positive
/// denominator yields `deposit_max`.
pub fn compute_deposit<S: Scalar>(
    initial_energy: S,
    emin: S,
    eavg: S,
    fd: S,
    deposit_min: S,
    deposit_max: S,
) -> Deposit<S> {
    let spread = eavg - fd;
    if spread.abs() < S::lit(1e-9) {
        return Deposit {
            value: deposit_max,
            clamped: true,
        };
    }
    let denom = initial_energy - (emin - fd) / spread;
    if !(denom > S::zero()) {
        return Deposit {
            value: deposit_max,
            clamped: true,
        };
    }
    let raw = S::one() / denom;
    if raw > deposit_max {
        Deposit {
            value: deposit_max,
            clamped: true,
        }
    } else if raw < deposit_min {
        Deposit {
            value: deposit_min,
            clamped: true,
        }
    } else {
        Deposit {
            value: raw,
            clamped: false,
        }
    }
}

/// A next-hop candidate: neighbour, its pheromone and its visibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate<S> {
    pub node: NodeId,
    pub tau: S,
    pub visibility: S,
}

/// Normalised `τ^α · E^β` over the candidates.
pub fn transition_probabilities<S: Scalar>(
    candidates: &[Candidate<S>],
    alpha: S,
    beta: S,
) -> Vec<(NodeId, S)> {
    let weights: Vec<S> = candidates
        .iter()
        .map(|c| c.tau.powf(alpha) * c.visibility.powf(beta))
        .collect();
    let total = weights.iter().fold(S::zero(), |a, &w| a + w);
    candidates
        .iter()
        .zip(weights)
        .map(|(c, w)| {
            (
                c.node,
                if total > S::zero() {
                    w / total
                } else {
                    S::one() / S::lit(candidates.len() as f64)
                },
            )
        })
        .collect()
}

/// Samples one candidate with probability proportional to `τ^α · E^β`.
pub fn sample_candidate<S: Scalar, R: Rng + ?Sized>(
    candidates: &[Candidate<S>],
    alpha: S,
    beta: S,
    rng: &mut R,
) -> Option<NodeId> {
    let probs = transition_probabilities(candidates, alpha, beta);
    let last = probs.last()?.0;
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (node, p) in &probs {
        acc += p.as_f64();
        if u < acc {
            return Some(*node);
        }
    }
    Some(last)
}

/// Highest `τ^α · E^β`, ties to the lowest node id.
pub fn argmax_candidate<S: Scalar>(
    candidates: &[Candidate<S>],
    alpha: S,
    beta: S,
) -> Option<NodeId> {
    let mut best: Option<(NodeId, S)> = None;
    for c in candidates {
        let w = c.tau.powf(alpha) * c.visibility.powf(beta);
        match best {
            Some((node, bw)) if w < bw || (w == bw && node < c.node) => {}
            _ => best = Some((c.node, w)),
        }
    }
    best.map(|(n, _)| n)
}

/// Next hop for a forward ant at `table`'s owner. Neighbours missing from
/// `neighbor_energies` are treated as unreachable; those in the ant's
/// memory are excluded.
pub fn select_next_hop<S: Scalar, R: Rng + ?Sized>(
    table: &RoutingTable<S>,
    ant: &ForwardAnt<S>,
    neighbor_energies: &BTreeMap<NodeId, S>,
    params: &ProtocolParams<S>,
    rng: &mut R,
) -> Result<NodeId, RoutingError> {
    let candidates = table.candidates(ant.destination, neighbor_energies, params, |n| {
        ant.memory.contains(n)
    });
    sample_candidate(&candidates, params.alpha, params.beta, rng)
        .ok_or(RoutingError::DeadEnd(table.owner()))
}
