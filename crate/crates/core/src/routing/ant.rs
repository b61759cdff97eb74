use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    apply_backward_update, argmax_candidate, compute_deposit, select_next_hop, DataPacket,
    MessageId, ProtocolKind, ProtocolParams, RoutingError, RoutingTable, SequenceNumber,
};
use crate::scalar::Scalar;
use crate::types::{NodeId, SimTime};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AntId(pub u64);

/// The two most recently visited nodes, oldest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AntMemory {
    slots: [Option<NodeId>; 2],
}

impl AntMemory {
    pub fn push(&mut self, node: NodeId) {
        self.slots = [self.slots[1], Some(node)];
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        self.slots.iter().any(|s| s.as_ref() == Some(node))
    }

    pub fn last(&self) -> Option<NodeId> {
        self.slots[1]
    }

    pub fn len(&self) -> usize {
        self.slots.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.slots.iter().flatten().copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardAnt<S> {
    pub id: AntId,
    pub source: NodeId,
    pub destination: NodeId,
    pub memory: AntMemory,
    /// Forwarding steps taken so far (`Fd`).
    pub hops_so_far: u32,
    /// Smallest node energy seen (`EMin`).
    pub min_energy_seen: S,
    energy_sum: S,
    energy_samples: u32,
}

impl<S: Scalar> ForwardAnt<S> {
    pub fn new(id: AntId, source: NodeId, destination: NodeId) -> Self {
        Self {
            id,
            source,
            destination,
            memory: AntMemory::default(),
            hops_so_far: 0,
            min_energy_seen: S::infinity(),
            energy_sum: S::zero(),
            energy_samples: 0,
        }
    }

    pub fn observe(&mut self, energy: S) {
        self.min_energy_seen = self.min_energy_seen.min(energy);
        self.energy_sum = self.energy_sum + energy;
        self.energy_samples += 1;
    }

    /// Mean energy of visited nodes (`EAvg`).
    pub fn avg_energy(&self) -> S {
        if self.energy_samples == 0 {
            return S::zero();
        }
        self.energy_sum / S::lit(f64::from(self.energy_samples))
    }

    pub fn visited(&self) -> u32 {
        self.energy_samples
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackwardAnt<S> {
    pub id: AntId,
    /// Node where the forward ant started; the backward ant dies there.
    pub source: NodeId,
    /// Destination whose table entries are reinforced.
    pub destination: NodeId,
    pub deposit: S,
    pub deposit_clamped: bool,
    /// Nodes visited on the way back (`Bd`).
    pub hops_from_sink: u32,
}

/// What a node remembers about an ant that passed through it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AntRecord {
    pub ant_id: AntId,
    pub previous_node: Option<NodeId>,
    pub forward_node: NodeId,
    pub expires_at: SimTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EliminationReason {
    /// The node still holds a record of this ant.
    Loop,
    /// Every neighbour is in the ant's memory or unreachable.
    DeadEnd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admission {
    Eliminated(EliminationReason),
    Arrived,
    Explore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForwardOutcome {
    Forwarded(NodeId),
    Eliminated(EliminationReason),
    ArrivedAtSink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackwardOutcome {
    Forward(NodeId),
    /// Reached the node that launched the forward ant.
    Completed,
    /// No live record to follow back.
    Lost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DropReason {
    DuplicateSequence,
    DeadEnd,
    NoRoute,
    NodeDepleted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataOutcome {
    Forwarded(NodeId),
    DiscardedOverheard,
    Delivered { message_complete: Option<Vec<u8>> },
    Dropped(DropReason),
}

/// Protocol state of one node running an ant protocol.
#[derive(Debug, Clone)]
pub struct AntNode<S> {
    pub id: NodeId,
    pub kind: ProtocolKind,
    pub table: RoutingTable<S>,
    records: BTreeMap<AntId, AntRecord>,
    seen: BTreeSet<SequenceNumber>,
    reassembly: BTreeMap<MessageId, BTreeMap<u32, Vec<u8>>>,
}

impl<S: Scalar> AntNode<S> {
    /// Node with its table initialised for `destinations` according to `kind`.
    pub fn new(
        id: NodeId,
        kind: ProtocolKind,
        neighbors: &[NodeId],
        destinations: &[NodeId],
        params: &ProtocolParams<S>,
    ) -> Result<Self, RoutingError> {
        let mut table = RoutingTable::new(id, params);
        if kind.destination_aware() {
            table.init_destination_aware_all(neighbors, destinations)?;
        } else {
            table.init_uniform(neighbors, destinations)?;
        }
        Ok(Self {
            id,
            kind,
            table,
            records: BTreeMap::new(),
            seen: BTreeSet::new(),
            reassembly: BTreeMap::new(),
        })
    }

    pub fn purge_records(&mut self, now: SimTime) {
        self.records.retain(|_, r| r.expires_at > now);
    }

    pub fn record(&self, ant: AntId) -> Option<&AntRecord> {
        self.records.get(&ant)
    }

    /// Drops a record whose timeout fired, unless it was refreshed since.
    pub fn expire_record(&mut self, ant: AntId, now: SimTime) {
        if self.records.get(&ant).is_some_and(|r| r.expires_at <= now) {
            self.records.remove(&ant);
        }
    }

    /// Loop check, arrival check and statistics update for an incoming
    /// forward ant. `own_energy` is this node's energy on the ant scale.
    pub fn admit_forward_ant(
        &mut self,
        ant: &mut ForwardAnt<S>,
        own_energy: S,
        now: SimTime,
    ) -> Admission {
        self.purge_records(now);
        if self.records.contains_key(&ant.id) {
            return Admission::Eliminated(EliminationReason::Loop);
        }
        if self.id == ant.destination {
            return Admission::Arrived;
        }
        ant.observe(own_energy);
        Admission::Explore
    }

    /// Records the ant and moves it one step towards `next`.
    pub fn commit_forward(
        &mut self,
        ant: &mut ForwardAnt<S>,
        next: NodeId,
        now: SimTime,
        params: &ProtocolParams<S>,
    ) {
        let record = AntRecord {
            ant_id: ant.id,
            previous_node: ant.memory.last(),
            forward_node: next,
            expires_at: now + SimTime::from_secs_f64(params.record_timeout_s),
        };
        self.records.insert(ant.id, record);
        ant.memory.push(self.id);
        ant.hops_so_far += 1;
    }

    pub fn handle_forward_ant<R: Rng + ?Sized>(
        &mut self,
        ant: &mut ForwardAnt<S>,
        own_energy: S,
        neighbor_energies: &BTreeMap<NodeId, S>,
        now: SimTime,
        params: &ProtocolParams<S>,
        rng: &mut R,
    ) -> ForwardOutcome {
        match self.admit_forward_ant(ant, own_energy, now) {
            Admission::Eliminated(r) => ForwardOutcome::Eliminated(r),
            Admission::Arrived => ForwardOutcome::ArrivedAtSink,
            Admission::Explore => {
                match select_next_hop(&self.table, ant, neighbor_energies, params, rng) {
                    Ok(next) => {
                        self.commit_forward(ant, next, now, params);
                        ForwardOutcome::Forwarded(next)
                    }
                    Err(_) => ForwardOutcome::Eliminated(EliminationReason::DeadEnd),
                }
            }
        }
    }

    /// Turns an arrived forward ant into a backward ant and returns it with
    /// the first hop back.
    pub fn make_backward_ant(
        &self,
        ant: &ForwardAnt<S>,
        params: &ProtocolParams<S>,
    ) -> Option<(BackwardAnt<S>, NodeId)> {
        let first_hop = ant.memory.last()?;
        let d = compute_deposit(
            params.initial_energy,
            ant.min_energy_seen,
            ant.avg_energy(),
            S::lit(f64::from(ant.hops_so_far)),
            params.deposit_min,
            params.deposit_max,
        );
        let back = BackwardAnt {
            id: ant.id,
            source: ant.source,
            destination: ant.destination,
            deposit: d.value,
            deposit_clamped: d.clamped,
            hops_from_sink: 0,
        };
        Some((back, first_hop))
    }

    /// Reinforces the link back to `from` and picks the next hop towards the
    /// ant's source.
    pub fn handle_backward_ant(
        &mut self,
        ant: &mut BackwardAnt<S>,
        from: NodeId,
        now: SimTime,
        params: &ProtocolParams<S>,
    ) -> Result<BackwardOutcome, RoutingError> {
        self.purge_records(now);
        ant.hops_from_sink += 1;
        apply_backward_update(&mut self.table, ant, from, params.rho, params.phi)?;
        let record = self.records.remove(&ant.id);
        if self.id == ant.source {
            return Ok(BackwardOutcome::Completed);
        }
        Ok(match record.and_then(|r| r.previous_node) {
            Some(prev) => BackwardOutcome::Forward(prev),
            None => BackwardOutcome::Lost,
        })
    }

    /// Data next hop: a neighbouring destination directly under the
    /// destination-aware rule, otherwise the best `τ^α·E^β` neighbour other
    /// than the one the packet came from.
    pub fn data_next_hop(
        &self,
        destination: NodeId,
        from: NodeId,
        neighbor_energies: &BTreeMap<NodeId, S>,
        params: &ProtocolParams<S>,
    ) -> Option<NodeId> {
        if self.kind.destination_aware()
            && destination != from
            && neighbor_energies.contains_key(&destination)
        {
            return Some(destination);
        }
        let candidates = self
            .table
            .candidates(destination, neighbor_energies, params, |n| *n == from);
        argmax_candidate(&candidates, params.alpha, params.beta)
    }

    /// Processes a data frame heard by this node. `from` is the transmitter.
    pub fn handle_data_packet(
        &mut self,
        pkt: &mut DataPacket,
        from: NodeId,
        neighbor_energies: &BTreeMap<NodeId, S>,
        params: &ProtocolParams<S>,
    ) -> DataOutcome {
        if pkt.next_node != self.id {
            return DataOutcome::DiscardedOverheard;
        }
        if self.id == pkt.destination {
            pkt.visited_count += 1;
            let id = pkt.sequence_number.message;
            let parts = self.reassembly.entry(id).or_default();
            parts.insert(pkt.part_index(), pkt.payload.clone());
            let message_complete = if parts.len() as u32 == pkt.part_count {
                let parts = self.reassembly.remove(&id).unwrap_or_default();
                Some(parts.into_values().flatten().collect())
            } else {
                None
            };
            return DataOutcome::Delivered { message_complete };
        }
        if self.seen.contains(&pkt.sequence_number) {
            return DataOutcome::Dropped(DropReason::DuplicateSequence);
        }
        let Some(next) = self.data_next_hop(pkt.destination, from, neighbor_energies, params)
        else {
            return DataOutcome::Dropped(DropReason::DeadEnd);
        };
        self.seen.insert(pkt.sequence_number);
        pkt.visited_count += 1;
        pkt.next_node = next;
        DataOutcome::Forwarded(next)
    }
}
