use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

/// Dense node identifier; nodes of an `n`-node network are `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(u32::try_from(i).expect("node index fits in u32"))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Simulated time in integer nanoseconds.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct SimTime(pub u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);
    const NANOS_PER_SEC: u64 = 1_000_000_000;

    pub fn from_secs(s: u64) -> Self {
        SimTime(s * Self::NANOS_PER_SEC)
    }

    /// Rounds to the nearest nanosecond.
    pub fn from_secs_f64(s: f64) -> Self {
        assert!(
            s.is_finite() && s >= 0.0,
            "simulated time must be non-negative, got {s}"
        );
        SimTime((s * Self::NANOS_PER_SEC as f64).round() as u64)
    }

    /// Time needed to clock `bits` out at `bits_per_second`, rounded up.
    pub fn airtime(bits: u64, bits_per_second: u64) -> Self {
        let num = u128::from(bits) * u128::from(Self::NANOS_PER_SEC);
        let den = u128::from(bits_per_second);
        SimTime(u64::try_from(num.div_ceil(den)).expect("airtime overflow"))
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / Self::NANOS_PER_SEC as f64
    }

    pub fn nanos(self) -> u64 {
        self.0
    }
}

impl Add for SimTime {
    type Output = SimTime;
    fn add(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}

impl Sub for SimTime {
    type Output = SimTime;
    fn sub(self, rhs: SimTime) -> SimTime {
        SimTime(self.0 - rhs.0)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6}s", self.as_secs_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn airtime_is_exact_for_radio_rates() {
        assert_eq!(SimTime::airtime(1_000_000, 250_000), SimTime::from_secs(4));
        assert_eq!(SimTime::airtime(64, 250_000), SimTime(256_000));
        assert_eq!(SimTime::airtime(1, 3), SimTime(333_333_334));
    }
}
