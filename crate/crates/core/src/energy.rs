//! Battery and consumption accounting.
//!
//! Charge is tracked in mAh. Discharge runtimes follow Peukert's law with
//! capacity in ampere-hours and time in hours. Radio states draw the
//! currents of a [`ConsumptionProfile`]; transmit and receive include the
//! processor current, sleep does not.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnergyError {
    #[error("discharge current must be positive, got {0} A")]
    NonPositiveDraw(f64),
    #[error("rated capacity must be positive, got {0} mAh")]
    NonPositiveCapacity(f64),
    #[error("charge {charge} mAh outside [0, {capacity}] mAh")]
    ChargeOutOfRange { charge: f64, capacity: f64 },
    #[error("Peukert exponent must be >= 1, got {0}")]
    InvalidPeukert(f64),
    #[error("battery voltage must be positive, got {0} V")]
    NonPositiveVoltage(f64),
    #[error("{0} current must be positive")]
    NonPositiveCurrent(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RadioState {
    Sleep,
    Idle,
    Tx,
    Rx,
}

impl RadioState {
    pub const ALL: [RadioState; 4] = [
        RadioState::Sleep,
        RadioState::Idle,
        RadioState::Tx,
        RadioState::Rx,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RadioState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Sleep => "sleep",
            Self::Idle => "idle",
            Self::Tx => "tx",
            Self::Rx => "rx",
        })
    }
}

/// Node current draw per operating mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsumptionProfile<S> {
    pub sleep_current_ua: S,
    pub idle_processor_current_ma: S,
    pub tx_current_ma: S,
    pub rx_current_ma: S,
}

impl<S: Scalar> ConsumptionProfile<S> {
    /// Waspmote figures: 62 µA sleep, 9 mA processor, 50.26 mA TX, 49.56 mA RX.
    pub fn waspmote() -> Self {
        Self {
            sleep_current_ua: S::lit(62.0),
            idle_processor_current_ma: S::lit(9.0),
            tx_current_ma: S::lit(50.26),
            rx_current_ma: S::lit(49.56),
        }
    }

    pub fn validate(&self) -> Result<(), EnergyError> {
        let checks = [
            ("sleep", self.sleep_current_ua),
            ("idle", self.idle_processor_current_ma),
            ("tx", self.tx_current_ma),
            ("rx", self.rx_current_ma),
        ];
        for (name, v) in checks {
            if !(v > S::zero()) || !v.is_finite() {
                return Err(EnergyError::NonPositiveCurrent(name));
            }
        }
        Ok(())
    }

    /// Total node current in `state`, mA.
    pub fn state_current_ma(&self, state: RadioState) -> S {
        match state {
            RadioState::Sleep => self.sleep_current_ua / S::lit(1000.0),
            RadioState::Idle => self.idle_processor_current_ma,
            RadioState::Tx => self.tx_current_ma + self.idle_processor_current_ma,
            RadioState::Rx => self.rx_current_ma + self.idle_processor_current_ma,
        }
    }
}

impl<S: Scalar> Default for ConsumptionProfile<S> {
    fn default() -> Self {
        Self::waspmote()
    }
}

/// Rechargeable cell. `0 <= charge_mah <= rated_capacity_mah` always holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Battery<S> {
    pub rated_capacity_mah: S,
    pub voltage: S,
    pub charge_mah: S,
    pub peukert_n: S,
}

impl<S: Scalar> Battery<S> {
    pub fn new(
        rated_capacity_mah: S,
        voltage: S,
        charge_mah: S,
        peukert_n: S,
    ) -> Result<Self, EnergyError> {
        let b = Self {
            rated_capacity_mah,
            voltage,
            charge_mah,
            peukert_n,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn full(rated_capacity_mah: S, voltage: S, peukert_n: S) -> Result<Self, EnergyError> {
        Self::new(rated_capacity_mah, voltage, rated_capacity_mah, peukert_n)
    }

    /// 1150 mAh, 3.7 V Waspmote pack, fully charged, `n = 1`.
    pub fn waspmote() -> Self {
        Self {
            rated_capacity_mah: S::lit(1150.0),
            voltage: S::lit(3.7),
            charge_mah: S::lit(1150.0),
            peukert_n: S::one(),
        }
    }

    pub fn validate(&self) -> Result<(), EnergyError> {
        let cap = self.rated_capacity_mah;
        if !(cap > S::zero()) || !cap.is_finite() {
            return Err(EnergyError::NonPositiveCapacity(cap.as_f64()));
        }
        if !(self.voltage > S::zero()) {
            return Err(EnergyError::NonPositiveVoltage(self.voltage.as_f64()));
        }
        if !(self.peukert_n >= S::one()) || !self.peukert_n.is_finite() {
            return Err(EnergyError::InvalidPeukert(self.peukert_n.as_f64()));
        }
        if !(self.charge_mah >= S::zero() && self.charge_mah <= cap) {
            return Err(EnergyError::ChargeOutOfRange {
                charge: self.charge_mah.as_f64(),
                capacity: cap.as_f64(),
            });
        }
        Ok(())
    }

    pub fn is_depleted(&self) -> bool {
        self.charge_mah <= S::zero()
    }

    pub fn residual_fraction(&self) -> S {
        self.charge_mah / self.rated_capacity_mah
    }

    /// Discharge current at the 1C rate (rated capacity over one hour), mA.
    pub fn one_c_current_ma(&self) -> S {
        self.rated_capacity_mah
    }

    /// Charge removed by drawing `current_ma` for `seconds`, before flooring.
    /// Above 1C the draw is inflated by `(I / I_1C)^(n-1)`.
    pub fn effective_draw_mah(&self, current_ma: S, seconds: S) -> S {
        let nominal = current_ma * seconds / S::lit(3600.0);
        let ratio = current_ma / self.one_c_current_ma();
        if self.peukert_n > S::one() && ratio > S::one() {
            nominal * ratio.powf(self.peukert_n - S::one())
        } else {
            nominal
        }
    }

    /// Draws `current_ma` for `seconds`; returns the charge actually removed.
    pub fn discharge(&mut self, current_ma: S, seconds: S) -> S {
        let want = self.effective_draw_mah(current_ma, seconds);
        let applied = want.min(self.charge_mah).max(S::zero());
        self.charge_mah = self.charge_mah - applied;
        applied
    }

    /// Adds `current_ua` for `seconds`; returns the charge actually stored.
    pub fn recharge(&mut self, current_ua: S, seconds: S) -> S {
        let offered = current_ua * seconds / S::lit(3.6e6);
        let room = self.rated_capacity_mah - self.charge_mah;
        let applied = offered.min(room).max(S::zero());
        self.charge_mah = if applied == room {
            self.rated_capacity_mah
        } else {
            self.charge_mah + applied
        };
        applied
    }

    /// Hours until empty at a constant `current_ma`.
    pub fn hours_to_depletion(&self, current_ma: S) -> S {
        self.charge_mah / (self.effective_draw_mah(current_ma, S::lit(3600.0)))
    }
}

impl<S: Scalar> Default for Battery<S> {
    fn default() -> Self {
        Self::waspmote()
    }
}

/// Peukert runtime `T = C / I^n`, with `C` in Ah, `I` in A and `T` in hours.
pub fn peukert_runtime<S: Scalar>(battery: &Battery<S>, draw_a: S) -> Result<S, EnergyError> {
    if !(draw_a > S::zero()) || !draw_a.is_finite() {
        return Err(EnergyError::NonPositiveDraw(draw_a.as_f64()));
    }
    let capacity_ah = battery.rated_capacity_mah / S::lit(1000.0);
    if battery.peukert_n == S::one() {
        return Ok(capacity_ah / draw_a);
    }
    Ok(capacity_ah / draw_a.powf(battery.peukert_n))
}

/// Battery after spending `duration_s` in `state`.
pub fn drain<S: Scalar>(
    battery: &Battery<S>,
    profile: &ConsumptionProfile<S>,
    state: RadioState,
    duration_s: S,
) -> Battery<S> {
    let mut b = *battery;
    b.discharge(profile.state_current_ma(state), duration_s.max(S::zero()));
    b
}

/// Battery after charging at `current_ua` for `duration_s`.
pub fn charge<S: Scalar>(battery: &Battery<S>, current_ua: S, duration_s: S) -> Battery<S> {
    let mut b = *battery;
    b.recharge(current_ua.max(S::zero()), duration_s.max(S::zero()));
    b
}

pub fn residual_fraction<S: Scalar>(battery: &Battery<S>) -> S {
    battery.residual_fraction()
}
