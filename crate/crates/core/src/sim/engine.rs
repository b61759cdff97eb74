use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::metrics::{MessageCounts, MetricSample, MetricsTimeline, NodeReport, RunSummary};
use super::radio::NodeRadio;
use super::scenario::Scenario;
use super::topology::{generate_topology, Topology};
use super::SimError;
use crate::energy::RadioState;
use crate::routing::{
    split_payload, AntId, AntNode, BackwardAnt, BackwardOutcome, CodeId, DataOutcome, DataPacket,
    DropReason, ForwardAnt, ForwardOutcome, MessageId, MinHopRouter, SequenceNumber, TableRow,
};
use crate::types::{NodeId, SimTime};

const TOPOLOGY_STREAM: u64 = 0;
const TRAFFIC_STREAM: u64 = 1;
const PROTOCOL_STREAM: u64 = 2;

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub timeline: MetricsTimeline,
    pub summary: RunSummary,
    pub topology: Topology,
    /// Final routing tables of every node (empty for min-hop).
    pub tables: Vec<TableRow>,
}

/// Runs `scenario` to its horizon and returns the sampled metrics.
pub fn run(scenario: &Scenario) -> Result<MetricsTimeline, SimError> {
    Ok(run_detailed(scenario)?.timeline)
}

/// Runs `scenario` and returns metrics, per-node ledgers and the topology.
pub fn run_detailed(scenario: &Scenario) -> Result<RunOutput, SimError> {
    scenario.validate()?;
    let topology = generate_topology(
        &mut stream(scenario.seed, TOPOLOGY_STREAM),
        scenario.node_count,
        scenario.area_m,
        scenario.radio_range_m,
    )?;
    Ok(Engine::new(scenario, topology)?.run())
}

pub(crate) fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone)]
enum Frame {
    Forward(ForwardAnt<f64>),
    Backward(BackwardAnt<f64>),
    Data(DataPacket),
    /// Min-hop data frame travelling along a source route.
    Routed {
        message: MessageId,
        path: Vec<NodeId>,
        hop: usize,
    },
}

/// A frame waiting in a node's transmit queue. `to = None` is a broadcast;
/// `frame = None` only occupies the air.
#[derive(Debug, Clone)]
struct Outgoing {
    to: Option<NodeId>,
    bits: u64,
    frame: Option<Frame>,
}

#[derive(Debug, Clone)]
enum Event {
    HarvestTick,
    TransmissionComplete { from: NodeId, frame: Frame },
    TxReady,
    RecordTimeout { ant: AntId },
    AntLaunch { k: u64 },
    CbrGenerate { k: u64 },
    MetricSample,
}

impl Event {
    /// Tie-break rank at equal times: charge first, sample last.
    fn priority(&self) -> u8 {
        match self {
            Event::HarvestTick => 0,
            Event::TransmissionComplete { .. } => 1,
            Event::TxReady => 2,
            Event::RecordTimeout { .. } => 3,
            Event::AntLaunch { .. } => 4,
            Event::CbrGenerate { .. } => 5,
            Event::MetricSample => 6,
        }
    }
}

type EventKey = (SimTime, u8, u32, u64);

#[derive(Debug, Clone, Copy, Default)]
struct MessageState {
    parts_delivered: u32,
    delivered: bool,
    dropped: bool,
}

struct Engine<'a> {
    s: &'a Scenario,
    topology: Topology,
    sink: NodeId,
    horizon: SimTime,
    now: SimTime,
    queue: BTreeMap<EventKey, Event>,
    next_seq: u64,
    radios: Vec<NodeRadio>,
    tx_queues: Vec<VecDeque<Outgoing>>,
    wake_at: Vec<Option<SimTime>>,
    ant_nodes: Vec<AntNode<f64>>,
    router: MinHopRouter,
    rng: ChaCha8Rng,
    harvest_ua: Vec<f64>,
    cbr_phase: Vec<f64>,
    ant_phase: Vec<f64>,
    message_seq: Vec<u32>,
    messages: BTreeMap<MessageId, MessageState>,
    counts: MessageCounts,
    next_ant: u64,
    ants_launched: u64,
    ants_completed: u64,
    ants_eliminated: u64,
    ants_lost: u64,
    route_discoveries: u64,
    timeline: MetricsTimeline,
}

impl<'a> Engine<'a> {
    fn new(s: &'a Scenario, topology: Topology) -> Result<Self, SimError> {
        let n = s.node_count;
        let sink = s.sink();
        let ant_nodes = if s.protocol.uses_ants() {
            (0..n)
                .map(|i| {
                    AntNode::new(
                        NodeId::from(i),
                        s.protocol,
                        &topology.adjacency[i],
                        &[sink],
                        &s.protocol_params,
                    )
                })
                .collect::<Result<Vec<_>, _>>()?
        } else {
            Vec::new()
        };
        let harvest_ua = match &s.harvesting {
            Some(h) => {
                let src = h.source()?;
                topology
                    .positions
                    .iter()
                    .map(|&p| src.harvest_for(p).current_ua)
                    .collect()
            }
            None => vec![0.0; n],
        };
        // Phases come from one stream in a fixed order so every protocol sees
        // the same generation times.
        let mut traffic = stream(s.seed, TRAFFIC_STREAM);
        let cbr_phase = (0..n)
            .map(|_| traffic.gen_range(0.0..s.cbr_interval_s))
            .collect();
        let ant_phase = (0..n)
            .map(|_| traffic.gen_range(0.0..s.protocol_params.ant_interval_s))
            .collect();
        Ok(Self {
            s,
            topology,
            sink,
            horizon: s.duration(),
            now: SimTime::ZERO,
            queue: BTreeMap::new(),
            next_seq: 0,
            radios: vec![NodeRadio::new(s.battery); n],
            tx_queues: vec![VecDeque::new(); n],
            wake_at: vec![None; n],
            ant_nodes,
            router: MinHopRouter::new(),
            rng: stream(s.seed, PROTOCOL_STREAM),
            harvest_ua,
            cbr_phase,
            ant_phase,
            message_seq: vec![0; n],
            messages: BTreeMap::new(),
            counts: MessageCounts::default(),
            next_ant: 0,
            ants_launched: 0,
            ants_completed: 0,
            ants_eliminated: 0,
            ants_lost: 0,
            route_discoveries: 0,
            timeline: MetricsTimeline::default(),
        })
    }

    fn schedule(&mut self, time: SimTime, node: NodeId, event: Event) {
        if time > self.horizon {
            return;
        }
        debug_assert!(time >= self.now, "event scheduled in the past");
        let key = (time, event.priority(), node.0, self.next_seq);
        self.next_seq += 1;
        self.queue.insert(key, event);
    }

    fn run(mut self) -> RunOutput {
        self.schedule_initial();
        while let Some(((time, _, node, _), event)) = self.queue.pop_first() {
            debug_assert!(time >= self.now && time <= self.horizon);
            self.now = time;
            self.dispatch(NodeId(node), event);
        }
        self.now = self.horizon;
        self.advance_all();
        self.finish()
    }

    fn schedule_initial(&mut self) {
        let samples = (self.s.duration_s / self.s.sample_interval_s + 1e-9).floor() as u64;
        for k in 0..=samples {
            let t = SimTime::from_secs_f64(k as f64 * self.s.sample_interval_s);
            self.schedule(t, NodeId(0), Event::MetricSample);
        }
        if self.s.harvesting.is_some() {
            let ticks = (self.s.duration_s / self.s.harvest_tick_s + 1e-9).floor() as u64;
            for k in 1..=ticks {
                let t = SimTime::from_secs_f64(k as f64 * self.s.harvest_tick_s);
                self.schedule(t, NodeId(0), Event::HarvestTick);
            }
        }
        if !self.s.traffic {
            return;
        }
        for i in 0..self.s.node_count {
            let node = NodeId::from(i);
            if node == self.sink {
                continue;
            }
            self.schedule(self.cbr_time(node, 0), node, Event::CbrGenerate { k: 0 });
            if self.s.protocol.uses_ants() {
                self.schedule(self.ant_time(node, 0), node, Event::AntLaunch { k: 0 });
            }
        }
    }

    fn cbr_time(&self, node: NodeId, k: u64) -> SimTime {
        SimTime::from_secs_f64(self.cbr_phase[node.index()] + k as f64 * self.s.cbr_interval_s)
    }

    fn ant_time(&self, node: NodeId, k: u64) -> SimTime {
        SimTime::from_secs_f64(
            self.ant_phase[node.index()] + k as f64 * self.s.protocol_params.ant_interval_s,
        )
    }

    fn dispatch(&mut self, node: NodeId, event: Event) {
        match event {
            Event::MetricSample => self.sample(),
            Event::HarvestTick => self.harvest_tick(),
            Event::RecordTimeout { ant } => {
                self.ant_nodes[node.index()].expire_record(ant, self.now)
            }
            Event::CbrGenerate { k } => {
                let next = self.cbr_time(node, k + 1);
                self.schedule(next, node, Event::CbrGenerate { k: k + 1 });
                self.generate(node);
            }
            Event::AntLaunch { k } => {
                let next = self.ant_time(node, k + 1);
                self.schedule(next, node, Event::AntLaunch { k: k + 1 });
                self.launch_ant(node);
            }
            Event::TransmissionComplete { from, frame } => self.receive(from, node, frame),
            Event::TxReady => {
                if self.wake_at[node.index()] == Some(self.now) {
                    self.wake_at[node.index()] = None;
                }
                self.service(node);
            }
        }
    }

    // ----- energy -----

    fn advance(&mut self, n: NodeId) {
        self.radios[n.index()].advance(self.now, &self.s.consumption);
    }

    fn advance_all(&mut self) {
        for r in &mut self.radios {
            r.advance(self.now, &self.s.consumption);
        }
    }

    fn alive(&mut self, n: NodeId) -> bool {
        self.advance(n);
        self.radios[n.index()].is_alive()
    }

    fn alive_mask(&mut self) -> Vec<bool> {
        self.advance_all();
        self.radios.iter().map(NodeRadio::is_alive).collect()
    }

    /// Energy of live neighbours on the ant scale `residual × C`.
    fn neighbor_energies(&mut self, n: NodeId) -> BTreeMap<NodeId, f64> {
        let c = self.s.protocol_params.initial_energy;
        let mut out = BTreeMap::new();
        for i in 0..self.topology.adjacency[n.index()].len() {
            let m = self.topology.adjacency[n.index()][i];
            if self.alive(m) {
                out.insert(m, self.radios[m.index()].battery.residual_fraction() * c);
            }
        }
        out
    }

    fn own_energy(&mut self, n: NodeId) -> f64 {
        self.advance(n);
        self.radios[n.index()].battery.residual_fraction() * self.s.protocol_params.initial_energy
    }

    fn harvest_tick(&mut self) {
        let secs = self.s.harvest_tick_s;
        for i in 0..self.radios.len() {
            self.radios[i].advance(self.now, &self.s.consumption);
            self.radios[i].harvest(self.harvest_ua[i], secs);
        }
    }

    fn sample(&mut self) {
        self.advance_all();
        let residuals: Vec<f64> = self
            .radios
            .iter()
            .map(|r| r.battery.residual_fraction())
            .collect();
        let avg = residuals.iter().sum::<f64>() / residuals.len() as f64;
        let min = residuals.iter().copied().fold(f64::INFINITY, f64::min);
        // Guard the mean against rounding above the minimum's bound.
        let avg = avg.max(min);
        debug_assert!(min <= avg && avg <= 1.0 + 1e-12);
        self.timeline.samples.push(MetricSample {
            time_s: self.now.as_secs_f64(),
            avg_residual: avg,
            min_residual: min,
            packets_delivered: self.counts.delivered,
            packets_generated: self.counts.generated,
            ants_launched: self.ants_launched,
            ants_completed: self.ants_completed,
        });
    }

    // ----- radio -----

    /// Queues a frame at `from` and starts it if the channel allows.
    fn transmit(&mut self, from: NodeId, to: Option<NodeId>, bits: u64, frame: Option<Frame>) {
        self.tx_queues[from.index()].push_back(Outgoing { to, bits, frame });
        self.service(from);
    }

    fn wake(&mut self, node: NodeId, at: SimTime) {
        if self.wake_at[node.index()].is_some_and(|w| w >= self.now && w <= at) {
            return;
        }
        self.wake_at[node.index()] = Some(at);
        self.schedule(at, node, Event::TxReady);
    }

    /// Starts the head of `node`'s queue when both ends are free now;
    /// otherwise arranges to retry when the blocking radio frees up. A node
    /// with queued frames stays awake.
    fn service(&mut self, node: NodeId) {
        loop {
            if self.tx_queues[node.index()].is_empty() {
                self.radios[node.index()].set_awake(self.now, false, &self.s.consumption);
                return;
            }
            if !self.alive(node) {
                while let Some(out) = self.tx_queues[node.index()].pop_front() {
                    self.undeliverable(node, out);
                }
                continue;
            }
            self.radios[node.index()].set_awake(self.now, true, &self.s.consumption);
            let busy = self.radios[node.index()].busy_until();
            if busy > self.now {
                self.wake(node, busy);
                return;
            }
            let to = self.tx_queues[node.index()][0].to;
            if let Some(t) = to {
                if !self.alive(t) {
                    let out = self.tx_queues[node.index()]
                        .pop_front()
                        .expect("non-empty queue");
                    self.undeliverable(node, out);
                    continue;
                }
                let busy = self.radios[t.index()].busy_until();
                if busy > self.now {
                    self.wake(node, busy);
                    return;
                }
            }
            let out = self.tx_queues[node.index()]
                .pop_front()
                .expect("non-empty queue");
            let end = self.start_transmission(node, out);
            self.wake(node, end);
            return;
        }
    }

    /// Puts `out` on the air now. The addressee receives it in full; free
    /// bystanders hear the header only (ant protocols) or the whole frame
    /// (min-hop, broadcasts). Returns the end of the transmission.
    fn start_transmission(&mut self, from: NodeId, out: Outgoing) -> SimTime {
        let now = self.now;
        let air = SimTime::airtime(out.bits, self.s.data_rate_bps);
        let end = now + air;
        self.radios[from.index()].reserve(now, end, RadioState::Tx);
        if let Some(t) = out.to {
            self.radios[t.index()].reserve(now, end, RadioState::Rx);
        }
        let listen = if out.to.is_some() && self.s.protocol.header_discard() {
            SimTime::airtime(self.s.header_bits.min(out.bits), self.s.data_rate_bps)
        } else {
            air
        };
        for i in 0..self.topology.adjacency[from.index()].len() {
            let b = self.topology.adjacency[from.index()][i];
            if Some(b) == out.to || !self.alive(b) || !self.radios[b.index()].is_free_at(now) {
                continue;
            }
            self.radios[b.index()].reserve(now, now + listen, RadioState::Rx);
        }
        if let (Some(t), Some(frame)) = (out.to, out.frame) {
            self.schedule(end, t, Event::TransmissionComplete { from, frame });
        }
        end
    }

    /// A queued frame whose sender or addressee died.
    fn undeliverable(&mut self, at: NodeId, out: Outgoing) {
        match out.frame {
            Some(Frame::Data(pkt)) => {
                self.drop_message(pkt.sequence_number.message, DropReason::NodeDepleted)
            }
            Some(Frame::Routed { message, .. }) if self.alive(at) => {
                self.route_min_hop(at, message)
            }
            Some(Frame::Routed { message, .. }) => {
                self.drop_message(message, DropReason::NodeDepleted)
            }
            Some(Frame::Forward(_)) => self.ants_eliminated += 1,
            Some(Frame::Backward(_)) => self.ants_lost += 1,
            None => {}
        }
    }

    fn data_bits(&self) -> u64 {
        let body = if self.s.protocol.uses_ants() {
            self.s
                .packet_size_bits
                .div_ceil(u64::from(self.s.protocol_params.data_parts))
        } else {
            self.s.packet_size_bits
        };
        body + self.s.header_bits
    }

    // ----- data -----

    fn generate(&mut self, source: NodeId) {
        if !self.alive(source) {
            return;
        }
        let seq = self.message_seq[source.index()];
        self.message_seq[source.index()] += 1;
        let message = MessageId { source, seq };
        self.messages.insert(message, MessageState::default());
        self.counts.generated += 1;
        if self.s.protocol.uses_ants() {
            let mut raw = source.0.to_le_bytes().to_vec();
            raw.extend_from_slice(&seq.to_le_bytes());
            let m = self.s.protocol_params.data_parts;
            let parts =
                split_payload(&raw, m as usize).expect("payload and part count are non-empty");
            for (part, payload) in parts.into_iter().enumerate() {
                let pkt = DataPacket {
                    code_id: CodeId::Data,
                    next_node: source,
                    sequence_number: SequenceNumber {
                        message,
                        part: part as u32,
                    },
                    visited_count: 0,
                    destination: self.sink,
                    part_count: m,
                    payload,
                };
                self.handle_data(source, source, pkt);
            }
        } else {
            self.route_min_hop(source, message);
        }
    }

    fn handle_data(&mut self, at: NodeId, from: NodeId, mut pkt: DataPacket) {
        let message = pkt.sequence_number.message;
        if !self.alive(at) {
            self.drop_message(message, DropReason::NodeDepleted);
            return;
        }
        let energies = self.neighbor_energies(at);
        let outcome = self.ant_nodes[at.index()].handle_data_packet(
            &mut pkt,
            from,
            &energies,
            &self.s.protocol_params,
        );
        match outcome {
            DataOutcome::Forwarded(next) => {
                let bits = self.data_bits();
                self.transmit(at, Some(next), bits, Some(Frame::Data(pkt)));
            }
            DataOutcome::Delivered { message_complete } => {
                let st = self.messages.entry(message).or_default();
                st.parts_delivered += 1;
                if message_complete.is_some() && !st.dropped && !st.delivered {
                    st.delivered = true;
                    self.counts.delivered += 1;
                }
            }
            DataOutcome::Dropped(reason) => self.drop_message(message, reason),
            DataOutcome::DiscardedOverheard => {}
        }
    }

    /// Sends a min-hop message from `at`, discovering a route if needed.
    fn route_min_hop(&mut self, at: NodeId, message: MessageId) {
        let alive = self.alive_mask();
        match self
            .router
            .route(&self.topology.adjacency, at, self.sink, |n| {
                alive[n.index()]
            }) {
            Ok(lookup) => {
                if lookup.discovered {
                    self.discover(at, &lookup.path, &alive);
                }
                let bits = self.data_bits();
                let next = lookup.path[1];
                self.transmit(
                    at,
                    Some(next),
                    bits,
                    Some(Frame::Routed {
                        message,
                        path: lookup.path,
                        hop: 1,
                    }),
                );
            }
            Err(_) => self.drop_message(message, DropReason::NoRoute),
        }
    }

    /// Charges a route discovery: every live node reachable from `origin`
    /// rebroadcasts the request once, then a reply walks `path` back.
    fn discover(&mut self, origin: NodeId, path: &[NodeId], alive: &[bool]) {
        self.route_discoveries += 1;
        let bits = self.s.control_bits;
        let mut seen = vec![false; alive.len()];
        let mut queue = VecDeque::from([origin]);
        seen[origin.index()] = true;
        while let Some(u) = queue.pop_front() {
            self.transmit(u, None, bits, None);
            for i in 0..self.topology.adjacency[u.index()].len() {
                let v = self.topology.adjacency[u.index()][i];
                if alive[v.index()] && !seen[v.index()] {
                    seen[v.index()] = true;
                    queue.push_back(v);
                }
            }
        }
        for w in path.windows(2).rev() {
            self.transmit(w[1], Some(w[0]), bits, None);
        }
    }

    fn drop_message(&mut self, message: MessageId, reason: DropReason) {
        let st = self.messages.entry(message).or_default();
        if st.dropped || st.delivered {
            return;
        }
        st.dropped = true;
        self.counts.dropped += 1;
        match reason {
            DropReason::DuplicateSequence => self.counts.dropped_duplicate += 1,
            DropReason::DeadEnd => self.counts.dropped_dead_end += 1,
            DropReason::NoRoute => self.counts.dropped_no_route += 1,
            DropReason::NodeDepleted => self.counts.dropped_depleted += 1,
        }
    }

    // ----- ants -----

    fn launch_ant(&mut self, source: NodeId) {
        if !self.alive(source) {
            return;
        }
        let id = AntId(self.next_ant);
        self.next_ant += 1;
        self.ants_launched += 1;
        self.forward_ant_at(source, ForwardAnt::new(id, source, self.sink));
    }

    fn forward_ant_at(&mut self, at: NodeId, mut ant: ForwardAnt<f64>) {
        let own = self.own_energy(at);
        let energies = self.neighbor_energies(at);
        let params = self.s.protocol_params;
        let outcome = self.ant_nodes[at.index()].handle_forward_ant(
            &mut ant,
            own,
            &energies,
            self.now,
            &params,
            &mut self.rng,
        );
        match outcome {
            ForwardOutcome::Forwarded(next) => {
                let id = ant.id;
                self.transmit(
                    at,
                    Some(next),
                    self.s.control_bits,
                    Some(Frame::Forward(ant)),
                );
                let expiry = self.now + SimTime::from_secs_f64(params.record_timeout_s);
                self.schedule(expiry, at, Event::RecordTimeout { ant: id });
            }
            ForwardOutcome::Eliminated(_) => self.ants_eliminated += 1,
            ForwardOutcome::ArrivedAtSink => {
                match self.ant_nodes[at.index()].make_backward_ant(&ant, &params) {
                    Some((back, first)) if self.alive(first) => {
                        self.transmit(
                            at,
                            Some(first),
                            self.s.control_bits,
                            Some(Frame::Backward(back)),
                        );
                    }
                    _ => self.ants_lost += 1,
                }
            }
        }
    }

    fn backward_ant_at(&mut self, at: NodeId, from: NodeId, mut ant: BackwardAnt<f64>) {
        let params = self.s.protocol_params;
        match self.ant_nodes[at.index()].handle_backward_ant(&mut ant, from, self.now, &params) {
            Ok(BackwardOutcome::Completed) => self.ants_completed += 1,
            Ok(BackwardOutcome::Forward(prev)) if self.alive(prev) => {
                self.transmit(
                    at,
                    Some(prev),
                    self.s.control_bits,
                    Some(Frame::Backward(ant)),
                );
            }
            _ => self.ants_lost += 1,
        }
    }

    fn receive(&mut self, from: NodeId, to: NodeId, frame: Frame) {
        let alive = self.alive(to);
        match frame {
            Frame::Data(pkt) => self.handle_data(to, from, pkt),
            Frame::Routed { message, .. } if !alive => {
                self.drop_message(message, DropReason::NodeDepleted)
            }
            Frame::Routed { message, path, hop } => {
                if to == self.sink {
                    let st = self.messages.entry(message).or_default();
                    if !st.dropped && !st.delivered {
                        st.delivered = true;
                        st.parts_delivered = 1;
                        self.counts.delivered += 1;
                    }
                } else if self.alive(path[hop + 1]) {
                    let bits = self.data_bits();
                    let next = path[hop + 1];
                    self.transmit(
                        to,
                        Some(next),
                        bits,
                        Some(Frame::Routed {
                            message,
                            path,
                            hop: hop + 1,
                        }),
                    );
                } else {
                    self.route_min_hop(to, message);
                }
            }
            Frame::Forward(_) if !alive => self.ants_eliminated += 1,
            Frame::Forward(ant) => self.forward_ant_at(to, ant),
            Frame::Backward(_) if !alive => self.ants_lost += 1,
            Frame::Backward(ant) => self.backward_ant_at(to, from, ant),
        }
    }

    fn finish(mut self) -> RunOutput {
        self.counts.in_flight = self.counts.generated - self.counts.delivered - self.counts.dropped;
        let last = self.timeline.last().copied();
        let nodes = self
            .radios
            .iter()
            .enumerate()
            .map(|(i, r)| NodeReport {
                node: i as u32,
                position: self.topology.positions[i],
                residual: r.battery.residual_fraction(),
                charge_mah: r.battery.charge_mah,
                ledger: r.ledger,
            })
            .collect();
        let summary = RunSummary {
            seed: self.s.seed,
            protocol: self.s.protocol,
            final_avg_residual: last.map_or(1.0, |l| l.avg_residual),
            final_min_residual: last.map_or(1.0, |l| l.min_residual),
            messages: self.counts,
            ants_launched: self.ants_launched,
            ants_completed: self.ants_completed,
            ants_eliminated: self.ants_eliminated,
            ants_lost: self.ants_lost,
            route_discoveries: self.route_discoveries,
            nodes,
            scenario: self.s.clone(),
        };
        let tables = self.ant_nodes.iter().flat_map(|n| n.table.rows()).collect();
        RunOutput {
            timeline: self.timeline,
            summary,
            topology: self.topology,
            tables,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harvester::{Antenna, Receiver};
    use crate::routing::ProtocolKind;
    use crate::sim::HarvestConfig;
    use approx::assert_relative_eq;

    fn quiet(protocol: ProtocolKind) -> Scenario {
        Scenario {
            protocol,
            traffic: false,
            ..Scenario::default()
        }
    }

    #[test]
    fn idle_network_drains_sleep_current_only() {
        let out = run_detailed(&quiet(ProtocolKind::MinHop)).unwrap();
        for n in &out.summary.nodes {
            assert_relative_eq!(1150.0 - n.charge_mah, 0.062, max_relative = 1e-9);
            assert_eq!(
                n.ledger.state_nanos[RadioState::Sleep.index()],
                SimTime::from_secs(3600).nanos()
            );
        }
        assert_eq!(out.timeline.samples.len(), 61);
    }

    #[test]
    fn adjacent_harvester_keeps_batteries_full() {
        let s = Scenario {
            area_m: (0.5, 0.5),
            harvesting: Some(HarvestConfig::new(
                Receiver::P2110,
                Antenna::Dipole,
                (0.25, 0.25),
            )),
            ..quiet(ProtocolKind::Ieeabr)
        };
        let t = run(&s).unwrap();
        assert_eq!(t.last().unwrap().avg_residual, 1.0);
        assert_eq!(t.last().unwrap().min_residual, 1.0);
    }

    #[test]
    fn same_seed_same_timeline() {
        let s = Scenario {
            duration_s: 600.0,
            ..Scenario::default()
        };
        assert_eq!(run(&s).unwrap(), run(&s).unwrap());
    }

    #[test]
    fn ledger_and_conservation_hold_for_every_protocol() {
        for protocol in [
            ProtocolKind::Ieeabr,
            ProtocolKind::Eeabr,
            ProtocolKind::MinHop,
        ] {
            let s = Scenario {
                protocol,
                duration_s: 900.0,
                packet_size_bits: 20_000,
                ..Scenario::default()
            };
            let out = run_detailed(&s).unwrap();
            for n in &out.summary.nodes {
                assert_eq!(n.ledger.total_nanos(), s.duration().nanos());
                let lhs = s.battery.charge_mah - n.charge_mah;
                assert!((lhs - (n.ledger.drained_mah - n.ledger.harvested_mah)).abs() < 1e-6);
            }
            let m = out.summary.messages;
            assert!(m.generated > 0 && m.delivered > 0, "{protocol:?}: {m:?}");
            assert_eq!(m.delivered + m.dropped + m.in_flight, m.generated);
            if protocol.uses_ants() {
                assert!(out.summary.ants_completed > 0);
            } else {
                assert!(out.summary.route_discoveries > 0);
            }
            for w in out.timeline.samples.windows(2) {
                assert!(w[0].time_s < w[1].time_s);
            }
            for smp in &out.timeline.samples {
                assert!(
                    0.0 <= smp.min_residual
                        && smp.min_residual <= smp.avg_residual
                        && smp.avg_residual <= 1.0
                );
            }
        }
    }

    #[test]
    fn protocols_share_topology_and_generation_times() {
        let a = run_detailed(&Scenario {
            protocol: ProtocolKind::Ieeabr,
            duration_s: 300.0,
            ..Scenario::default()
        })
        .unwrap();
        let b = run_detailed(&Scenario {
            protocol: ProtocolKind::MinHop,
            duration_s: 300.0,
            ..Scenario::default()
        })
        .unwrap();
        assert_eq!(a.topology, b.topology);
        let ga: Vec<u64> = a
            .timeline
            .samples
            .iter()
            .map(|s| s.packets_generated)
            .collect();
        let gb: Vec<u64> = b
            .timeline
            .samples
            .iter()
            .map(|s| s.packets_generated)
            .collect();
        assert_eq!(ga, gb);
    }

    #[test]
    fn table_dump_covers_every_ant_node() {
        let s = Scenario {
            duration_s: 120.0,
            ..Scenario::default()
        };
        let out = run_detailed(&s).unwrap();
        let owners: std::collections::BTreeSet<u32> = out.tables.iter().map(|r| r.node.0).collect();
        assert_eq!(
            owners.len(),
            s.node_count - 1,
            "every node but the sink routes towards it"
        );
        let csv = crate::sim::tables_csv(&out.tables);
        assert_eq!(csv.lines().count(), out.tables.len() + 1);
        let minhop = run_detailed(&Scenario {
            protocol: ProtocolKind::MinHop,
            ..s
        })
        .unwrap();
        assert!(minhop.tables.is_empty());
    }

    #[test]
    fn dead_nodes_stop_generating() {
        let s = Scenario {
            battery: crate::energy::Battery::full(0.5, 3.7, 1.0).unwrap(),
            packet_size_bits: 1_000_000,
            protocol: ProtocolKind::MinHop,
            ..Scenario::default()
        };
        let out = run_detailed(&s).unwrap();
        assert!(out.summary.nodes.iter().any(|n| n.charge_mah == 0.0));
        let m = out.summary.messages;
        assert_eq!(m.delivered + m.dropped + m.in_flight, m.generated);
        assert!(m.generated < 9 * 60);
    }
}
