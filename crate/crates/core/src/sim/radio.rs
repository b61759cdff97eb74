use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::energy::{Battery, ConsumptionProfile, RadioState};
use crate::types::SimTime;

/// Per-node totals of the energy ledger.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StateLedger {
    /// Nanoseconds spent in each [`RadioState`], indexed by `RadioState::index`.
    pub state_nanos: [u64; 4],
    /// `Σ current × time` over all states, in mAh, before the battery floor.
    pub nominal_drain_mah: f64,
    /// Charge actually removed from the battery, in mAh.
    pub drained_mah: f64,
    /// Charge actually stored from harvesting, in mAh.
    pub harvested_mah: f64,
}

impl StateLedger {
    pub fn total_nanos(&self) -> u64 {
        self.state_nanos.iter().sum()
    }

    pub fn seconds_in(&self, state: RadioState) -> f64 {
        SimTime(self.state_nanos[state.index()]).as_secs_f64()
    }
}

#[derive(Debug, Clone, Copy)]
struct Activity {
    start: SimTime,
    end: SimTime,
    state: RadioState,
}

/// One node's battery and radio. Reservations are appended in time order;
/// time not covered by any reservation is spent idle while the node is
/// awake and asleep otherwise. The battery is brought up to date lazily by
/// [`NodeRadio::advance`].
#[derive(Debug, Clone)]
pub struct NodeRadio {
    pub battery: Battery<f64>,
    pub ledger: StateLedger,
    cursor: SimTime,
    busy_until: SimTime,
    awake: bool,
    pending: VecDeque<Activity>,
}

impl NodeRadio {
    pub fn new(battery: Battery<f64>) -> Self {
        Self {
            battery,
            ledger: StateLedger::default(),
            cursor: SimTime::ZERO,
            busy_until: SimTime::ZERO,
            awake: false,
            pending: VecDeque::new(),
        }
    }

    pub fn busy_until(&self) -> SimTime {
        self.busy_until
    }

    pub fn is_free_at(&self, t: SimTime) -> bool {
        self.busy_until <= t
    }

    /// Switches between idle and sleep for unreserved time from `now` on.
    pub fn set_awake(&mut self, now: SimTime, awake: bool, profile: &ConsumptionProfile<f64>) {
        self.advance(now, profile);
        self.awake = awake;
    }

    /// Reserves `[start, end)` in `state`. `start` must not precede the end
    /// of the previous reservation.
    pub fn reserve(&mut self, start: SimTime, end: SimTime, state: RadioState) {
        debug_assert!(
            start >= self.busy_until && start >= self.cursor,
            "overlapping radio reservation"
        );
        if end > start {
            self.pending.push_back(Activity { start, end, state });
            self.busy_until = end;
        }
    }

    /// Accounts all time up to `t`.
    pub fn advance(&mut self, t: SimTime, profile: &ConsumptionProfile<f64>) {
        while self.cursor < t {
            match self.pending.front().copied() {
                Some(a) if a.start <= self.cursor => {
                    let end = a.end.min(t);
                    self.spend(a.state, end, profile);
                    if end == a.end {
                        self.pending.pop_front();
                    }
                }
                Some(a) => self.spend(self.gap_state(), a.start.min(t), profile),
                None => self.spend(self.gap_state(), t, profile),
            }
        }
    }

    fn gap_state(&self) -> RadioState {
        if self.awake {
            RadioState::Idle
        } else {
            RadioState::Sleep
        }
    }

    fn spend(&mut self, state: RadioState, until: SimTime, profile: &ConsumptionProfile<f64>) {
        let dt = until - self.cursor;
        let secs = dt.as_secs_f64();
        let current = profile.state_current_ma(state);
        self.ledger.state_nanos[state.index()] += dt.nanos();
        self.ledger.nominal_drain_mah += current * secs / 3600.0;
        self.ledger.drained_mah += self.battery.discharge(current, secs);
        self.cursor = until;
    }

    /// Adds harvested charge; the caller advances the node first.
    pub fn harvest(&mut self, current_ua: f64, seconds: f64) {
        if current_ua > 0.0 {
            self.ledger.harvested_mah += self.battery.recharge(current_ua, seconds);
        }
    }

    pub fn is_alive(&self) -> bool {
        !self.battery.is_depleted()
    }
}
