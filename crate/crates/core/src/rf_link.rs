//! Free-space link budget: antenna gain conversion, wavelength, Friis received
//! power and radiated power density.
//!
//! Everything is SI internally (watts, metres, hertz). Decibel values only
//! appear in [`AntennaGain`]. The Friis formula is a far-field result; short
//! ranges are accepted as-is and are not checked against the antenna near
//! field.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Propagation speed used for wavelength conversion, in m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinkError {
    #[error("{quantity} must be finite, got {value}")]
    NonFinite { quantity: &'static str, value: f64 },
    #[error("{quantity} must be strictly positive, got {value}")]
    NonPositive { quantity: &'static str, value: f64 },
}

fn finite<S: Scalar>(quantity: &'static str, v: S) -> Result<S, LinkError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(LinkError::NonFinite {
            quantity,
            value: v.as_f64(),
        })
    }
}

fn positive<S: Scalar>(quantity: &'static str, v: S) -> Result<S, LinkError> {
    let v = finite(quantity, v)?;
    if v > S::zero() {
        Ok(v)
    } else {
        Err(LinkError::NonPositive {
            quantity,
            value: v.as_f64(),
        })
    }
}

/// Antenna gain stored in dBi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaGain<S> {
    pub value_dbi: S,
}

impl<S: Scalar> AntennaGain<S> {
    pub fn from_dbi(value_dbi: S) -> Result<Self, LinkError> {
        finite("antenna gain (dBi)", value_dbi).map(|value_dbi| Self { value_dbi })
    }

    pub fn from_linear(ratio: S) -> Result<Self, LinkError> {
        let ratio = positive("antenna gain (linear)", ratio)?;
        Ok(Self {
            value_dbi: S::lit(10.0) * ratio.log10(),
        })
    }

    /// Unit gain, 0 dBi.
    pub fn isotropic() -> Self {
        Self {
            value_dbi: S::zero(),
        }
    }

    pub fn linear(&self) -> S {
        S::lit(10.0).powf(self.value_dbi / S::lit(10.0))
    }
}

/// `G = 10^(G_dB / 10)`.
pub fn dbi_to_linear<S: Scalar>(gain_db: S) -> Result<S, LinkError> {
    AntennaGain::from_dbi(gain_db).map(|g| g.linear())
}

/// `λ = c / f`.
pub fn wavelength<S: Scalar>(frequency_hz: S) -> Result<S, LinkError> {
    let f = positive("frequency", frequency_hz)?;
    Ok(S::lit(SPEED_OF_LIGHT) / f)
}

/// A point-to-point radio link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget<S> {
    /// Transmitter output power, W.
    pub tx_power: S,
    pub tx_gain: AntennaGain<S>,
    pub rx_gain: AntennaGain<S>,
    /// Carrier frequency, Hz.
    pub frequency: S,
    /// Antenna separation, m.
    pub distance: S,
}

impl<S: Scalar> LinkBudget<S> {
    pub fn new(
        tx_power: S,
        tx_gain: AntennaGain<S>,
        rx_gain: AntennaGain<S>,
        frequency: S,
        distance: S,
    ) -> Result<Self, LinkError> {
        let link = Self {
            tx_power,
            tx_gain,
            rx_gain,
            frequency,
            distance,
        };
        link.validate()?;
        Ok(link)
    }

    pub fn validate(&self) -> Result<(), LinkError> {
        positive("transmit power", self.tx_power)?;
        positive("frequency", self.frequency)?;
        positive("distance", self.distance)?;
        finite("transmit gain (dBi)", self.tx_gain.value_dbi)?;
        finite("receive gain (dBi)", self.rx_gain.value_dbi)?;
        Ok(())
    }

    /// Effective isotropic radiated power `P_t · G_t`, W.
    pub fn eirp(&self) -> S {
        self.tx_power * self.tx_gain.linear()
    }
}

/// Received power `P_r = P_t · G_t · G_r · (λ / 4πR)²`, in watts.
pub fn friis_received_power<S: Scalar>(link: &LinkBudget<S>) -> Result<S, LinkError> {
    link.validate()?;
    let lambda = wavelength(link.frequency)?;
    let path = lambda / (S::lit(4.0 * PI) * link.distance);
    Ok(link.tx_power * link.tx_gain.linear() * link.rx_gain.linear() * path * path)
}

/// `P_D = P_t / 4πR²`, in W/m².
pub fn isotropic_power_density<S: Scalar>(tx_power: S, distance: S) -> Result<S, LinkError> {
    finite("transmit power", tx_power)?;
    let r = positive("distance", distance)?;
    Ok(tx_power / (S::lit(4.0 * PI) * r * r))
}

/// `P_D = P_t · G_t / 4πR²`, in W/m². Identical to
/// [`isotropic_power_density`] for a unit gain.
pub fn directional_power_density<S: Scalar>(
    tx_power: S,
    tx_gain: AntennaGain<S>,
    distance: S,
) -> Result<S, LinkError> {
    let g = tx_gain.linear();
    if g == S::one() {
        return isotropic_power_density(tx_power, distance);
    }
    isotropic_power_density(tx_power * g, distance)
}

/// Antenna gain as the ratio of peak radiation intensity to that of an
/// isotropic radiator fed with the same power.
pub fn gain_from_intensities<S: Scalar>(
    actual_intensity: S,
    isotropic_intensity: S,
) -> Result<S, LinkError> {
    let actual = positive("actual radiation intensity", actual_intensity)?;
    let iso = positive("isotropic radiation intensity", isotropic_intensity)?;
    Ok(actual / iso)
}

pub fn watts_to_dbm<S: Scalar>(watts: S) -> S {
    S::lit(10.0) * (watts * S::lit(1000.0)).log10()
}
